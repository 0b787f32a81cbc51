#include "locallaw/matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "locallaw/ensemble.hpp"

namespace locallaw {

namespace {

double parse_double(std::string_view token, std::size_t line_no) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse number '" +
                                 std::string(token) + "'");
    }
    return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        return true;
    }
    return false;
}

void write_matrix_rows(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

void write_profile(std::ostream& out, const VarianceProfile& profile) {
    out << profile.dim() << ' ' << format_double(profile.m_bound()) << ' '
        << (profile.gap() ? format_double(*profile.gap()) : std::string("nan")) << '\n';
    write_matrix_rows(out, profile.entries());
}

VarianceProfile read_profile(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!next_data_line(in, line, line_no)) throw std::runtime_error("profile: missing header line");
    const auto header = split_ws(line);
    if (header.size() != 3) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": header must be 'dim M rho'");
    }
    const double dim_value = parse_double(header[0], line_no);
    if (!(dim_value >= 1.0) || dim_value != std::floor(dim_value) || dim_value > 1e6) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": invalid dim");
    }
    const auto dim = static_cast<Eigen::Index>(dim_value);
    const double m_bound = parse_double(header[1], line_no);
    const double rho = parse_double(header[2], line_no);

    Eigen::MatrixXd entries(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (!next_data_line(in, line, line_no)) {
            throw std::runtime_error("profile: expected " + std::to_string(dim) + " rows, got " +
                                     std::to_string(i));
        }
        const auto tokens = split_ws(line);
        if (static_cast<Eigen::Index>(tokens.size()) != dim) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(dim) + " values");
        }
        for (Eigen::Index j = 0; j < dim; ++j) entries(i, j) = parse_double(tokens[static_cast<std::size_t>(j)], line_no);
    }
    try {
        return VarianceProfile(std::move(entries), m_bound,
                               std::isnan(rho) ? std::nullopt : std::optional<double>(rho));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("profile: ") + e.what());
    }
}

void save_profile(const std::filesystem::path& path, const VarianceProfile& profile) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_profile(out, profile);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

VarianceProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile file " + path.string());
    return read_profile(in);
}

void write_sample(std::ostream& out, const SampledMatrix& sample, double m_bound,
                  const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << sample.dim() << ' ' << format_double(m_bound) << " nan\n";
    write_matrix_rows(out, sample.re);
    if (sample.is_complex()) {
        out << "# imag\n";
        write_matrix_rows(out, sample.im);
    }
}

}  // namespace locallaw
