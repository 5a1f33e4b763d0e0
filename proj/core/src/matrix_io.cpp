// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo/matrix_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "qmimo/errors.hpp"

namespace qmimo {

namespace {

constexpr char kMagic[4] = {'Q', 'M', 'X', '1'};

bool has_csv_extension(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void put_u64_le(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64_le(std::ostream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64_le(out, bits);
}

double get_f64_le(std::istream& in) {
    std::uint64_t bits = get_u64_le(in);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

std::vector<double> parse_number_line(const std::string& line, const std::string& path) {
    std::vector<double> out;
    std::istringstream in(line);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw config_error(path + ": cannot parse number '" + tok + "'");
        }
    }
    return out;
}

} // namespace

void save_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ostringstream body;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) body << ',';
            body << fmt17(m(i, j).real()) << ',' << fmt17(m(i, j).imag());
        }
        body << '\n';
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << body.str();
    if (!out) throw config_error("write failed: " + path);
}

Eigen::MatrixXcd load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(parse_number_line(line, path));
        if (rows.back().size() != rows.front().size())
            throw config_error(path + ": ragged rows");
        if (rows.back().size() % 2 != 0)
            throw config_error(path + ": odd entry count, expected re,im pairs");
    }
    if (rows.empty()) throw config_error(path + ": no data");
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.front().size() / 2);
    Eigen::MatrixXcd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = std::complex<double>(rows[i][2 * j], rows[i][2 * j + 1]);
    return m;
}

void save_matrix_bin(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ostringstream body(std::ios::binary);
    body.write(kMagic, 4);
    put_u64_le(body, static_cast<std::uint64_t>(m.rows()));
    put_u64_le(body, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put_f64_le(body, m(i, j).real());
            put_f64_le(body, m(i, j).imag());
        }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot open for writing: " + path);
    const std::string s = body.str();
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw config_error("write failed: " + path);
}

Eigen::MatrixXcd load_matrix_bin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw config_error(path + ": not a matrix dump (bad magic)");
    const std::uint64_t r = get_u64_le(in);
    const std::uint64_t c = get_u64_le(in);
    if (!in || r > (1ULL << 32) || c > (1ULL << 32))
        throw config_error(path + ": implausible dimensions");
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double re = get_f64_le(in);
            const double im = get_f64_le(in);
            m(i, j) = std::complex<double>(re, im);
        }
    if (!in) throw config_error(path + ": truncated matrix dump");
    return m;
}

void save_matrix(const std::string& path, const Eigen::MatrixXcd& m) {
    if (has_csv_extension(path))
        save_matrix_csv(path, m);
    else
        save_matrix_bin(path, m);
}

Eigen::MatrixXcd load_matrix(const std::string& path) {
    return has_csv_extension(path) ? load_matrix_csv(path) : load_matrix_bin(path);
}

Eigen::VectorXd load_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open: " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (double v : parse_number_line(line, path)) vals.push_back(v);
    }
    if (vals.empty()) throw config_error(path + ": no data");
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

void save_vector_csv(const std::string& path, const Eigen::VectorXd& v) {
    std::ostringstream body;
    for (Eigen::Index i = 0; i < v.size(); ++i) body << fmt17(v(i)) << '\n';
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << body.str();
    if (!out) throw config_error("write failed: " + path);
}

} // namespace qmimo
