// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pencilbench/errors.hpp"
#include "pencilbench/properties.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

/// Scientific notation with 17 significant digits; "inf", "-inf", "nan" otherwise.
[[nodiscard]] inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

[[nodiscard]] inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path, 0);
    out << content;
    if (!out) throw FormatError("write failed for " + path, 0);
}

// tns3: header line "tns3 n1 n2 n3", then n1*n2*n3 values in storage order,
// one n3-fiber per line. Blank lines and '#' comments are ignored.

[[nodiscard]] inline std::string to_tns3(const Tensor3& t) {
    std::string s = "tns3 " + std::to_string(t.dim(0)) + " " + std::to_string(t.dim(1)) + " " +
                    std::to_string(t.dim(2)) + "\n";
    char buf[32];
    const Index n3 = t.dim(2);
    for (Index k = 0; k < t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", t.data()(k));
        s += buf;
        s += (k % n3 == n3 - 1) ? '\n' : ' ';
    }
    return s;
}

[[nodiscard]] inline Tensor3 parse_tns3(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    Dims d{};
    Eigen::VectorXd data;
    Index filled = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string tok;
        if (!have_header) {
            if (!(ls >> tok)) continue;
            if (tok != "tns3") throw FormatError("expected header 'tns3 n1 n2 n3'", lineno);
            long long n[3];
            for (auto& v : n)
                if (!(ls >> v) || v < 1) throw FormatError("invalid dimension in header", lineno);
            if (ls >> tok) throw FormatError("trailing token in header: " + tok, lineno);
            d = {static_cast<Index>(n[0]), static_cast<Index>(n[1]), static_cast<Index>(n[2])};
            data.resize(d[0] * d[1] * d[2]);
            have_header = true;
            continue;
        }
        while (ls >> tok) {
            if (filled == data.size()) throw FormatError("more values than n1*n2*n3", lineno);
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tok.size()) throw FormatError("not a number: '" + tok + "'", lineno);
            if (!std::isfinite(v)) throw FormatError("non-finite value", lineno);
            data(filled++) = v;
        }
    }
    if (!have_header) throw FormatError("missing header", lineno);
    if (filled != data.size())
        throw FormatError("expected " + std::to_string(data.size()) + " values, found " + std::to_string(filled), lineno);
    return Tensor3(d, std::move(data));
}

[[nodiscard]] inline Tensor3 read_tns3(const std::string& path) {
    try {
        return parse_tns3(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what(), e.line());
    }
}

// cpd.json: {"dims": [n1, n2, n3], "rank": r, "factors": {"A": [[col 0], ...], "B": ..., "C": ...}}

[[nodiscard]] inline nlohmann::json cpd_to_json(const Cpd& cpd) {
    nlohmann::json j;
    const Dims d = cpd.dims();
    j["dims"] = {d[0], d[1], d[2]};
    j["rank"] = cpd.rank();
    const char* names[3] = {"A", "B", "C"};
    for (int k = 0; k < 3; ++k) {
        const Eigen::MatrixXd F = cpd.factor(k);
        nlohmann::json cols = nlohmann::json::array();
        for (Index i = 0; i < F.cols(); ++i) cols.push_back(std::vector<double>(F.col(i).begin(), F.col(i).end()));
        j["factors"][names[k]] = std::move(cols);
    }
    return j;
}

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace detail

[[nodiscard]] inline Cpd parse_cpd_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what(), detail::line_of_offset(text, e.byte));
    }
    try {
        const auto dims = j.at("dims").get<std::vector<Index>>();
        if (dims.size() != 3) throw FormatError("'dims' must have 3 entries", 0);
        const auto& f = j.at("factors");
        Eigen::MatrixXd M[3];
        const char* names[3] = {"A", "B", "C"};
        Index r = -1;
        for (int k = 0; k < 3; ++k) {
            const auto cols = f.at(names[k]).get<std::vector<std::vector<double>>>();
            if (r < 0) r = static_cast<Index>(cols.size());
            if (static_cast<Index>(cols.size()) != r) throw FormatError("factor column counts differ", 0);
            M[k].resize(dims[static_cast<std::size_t>(k)], r);
            for (Index i = 0; i < r; ++i) {
                const auto& c = cols[static_cast<std::size_t>(i)];
                if (static_cast<Index>(c.size()) != dims[static_cast<std::size_t>(k)])
                    throw FormatError(std::string("factor ") + names[k] + " column length does not match dims", 0);
                M[k].col(i) = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Index>(c.size()));
            }
        }
        if (j.contains("rank") && j["rank"].get<Index>() != r) throw FormatError("'rank' disagrees with factors", 0);
        if (r < 1) throw FormatError("empty decomposition", 0);
        return Cpd::from_factors(M[0], M[1], M[2]);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed cpd.json: ") + e.what(), 0);
    }
}

[[nodiscard]] inline Cpd read_cpd_json(const std::string& path) {
    try {
        return parse_cpd_json(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what(), e.line());
    } catch (const Error& e) {
        throw FormatError(path + ": " + e.what(), 0);
    }
}

inline void write_cpd_json(const std::string& path, const Cpd& cpd) { write_file(path, cpd_to_json(cpd).dump(2) + "\n"); }

[[nodiscard]] inline nlohmann::json checks_to_json(const std::vector<CheckReport>& checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"trials", c.trials},
                       {"failures", c.failures},
                       {"errors", c.errors},
                       {"worst_margin", format_double(c.worst_margin)}});
    }
    return {{"checks", arr}};
}

}  // namespace pencilbench
