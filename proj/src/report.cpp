#include "pdist/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "pdist/errors.hpp"

namespace pdist {

double sig12(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

json jnum(double x) {
    if (!std::isfinite(x)) return nullptr;
    return sig12(x);
}

void round_numbers(json& j) {
    if (j.is_number_float()) {
        j = jnum(j.get<double>());
    } else if (j.is_object() || j.is_array()) {
        for (auto& item : j) round_numbers(item);
    }
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json matrix_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= std::uint64_t(static_cast<unsigned char>(buf[i]));
            h *= 0x100000001b3ULL;
        }
        if (got < std::streamsize(sizeof buf)) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

std::string dump_report(const RunReport& report) {
    json j = json::object();
    j["tool_version"] = kToolVersion;
    j["command"] = report.command;
    j["inputs"] = report.inputs;
    j["parameters"] = report.parameters;
    j["results"] = report.results;
    j["warnings"] = report.warnings;
    round_numbers(j);
    return j.dump(2) + "\n";
}

}  // namespace pdist
