#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"

namespace pdist {

inline constexpr const char* kToolVersion = "1.0.0";

using json = nlohmann::ordered_json;

// Rounds to 12 significant digits so serialized reports are stable
// golden-file targets.
double sig12(double x);

// Number -> JSON with sig12 rounding; non-finite values map to null.
json jnum(double x);

// Applies jnum to every float in the tree, in place.
void round_numbers(json& j);

json matrix_json(const Eigen::MatrixXd& m);
json matrix_json(const Eigen::MatrixXcd& m);  // [re, im] pairs

// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

struct RunReport {
    std::string command;
    json inputs = json::object();      // path -> digest
    json parameters = json::object();  // flags, seeds
    json results = json::object();
    std::vector<std::string> warnings;
};

// Adds the version, rounds all numbers, and serializes with 2-space
// indentation. Reports carry no timestamps: rerunning the embedded
// parameters must reproduce the output byte for byte.
std::string dump_report(const RunReport& report);

}  // namespace pdist
