#include "treebo/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace treebo {

Dataset::Dataset(int num_features, std::vector<double> x, std::vector<double> y)
    : num_features_(num_features), x_(std::move(x)), y_(std::move(y)) {
    if (num_features_ <= 0) throw std::invalid_argument("dataset: num_features must be positive");
    if (y_.empty()) throw std::invalid_argument("dataset: needs at least one row");
    if (x_.size() != y_.size() * static_cast<std::size_t>(num_features_))
        throw std::invalid_argument("dataset: feature/target row count mismatch");
    for (double v : x_)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature value");
    for (double v : y_)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite target value");
}

void Dataset::append(std::span<const double> x, double y) {
    if (static_cast<int>(x.size()) != num_features_)
        throw std::invalid_argument("dataset: appended row has wrong dimension");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature value");
    if (!std::isfinite(y)) throw std::invalid_argument("dataset: non-finite target value");
    x_.insert(x_.end(), x.begin(), x.end());
    y_.push_back(y);
}

std::vector<double> Standardizer::standardize(std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = to_std(static_cast<int>(i), x[i]);
    return z;
}

std::vector<double> Standardizer::destandardize(std::span<const double> z) const {
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = to_raw(static_cast<int>(i), z[i]);
    return x;
}

Standardizer fit_standardizer(const Dataset& data) {
    const int n = data.num_features();
    const double count = static_cast<double>(data.size());
    Standardizer s;
    s.mean.assign(n, 0.0);
    s.std.assign(n, 0.0);
    for (std::size_t r = 0; r < data.size(); ++r) {
        auto row = data.row(r);
        for (int i = 0; i < n; ++i) s.mean[i] += row[i];
    }
    for (int i = 0; i < n; ++i) s.mean[i] /= count;
    for (std::size_t r = 0; r < data.size(); ++r) {
        auto row = data.row(r);
        for (int i = 0; i < n; ++i) {
            const double d = row[i] - s.mean[i];
            s.std[i] += d * d;
        }
    }
    for (int i = 0; i < n; ++i) {
        s.std[i] = std::sqrt(s.std[i] / count);
        if (s.std[i] <= 0.0) s.std[i] = 1.0;
    }
    return s;
}

double target_variance(const Dataset& data) {
    const double count = static_cast<double>(data.size());
    double mean = 0.0;
    for (std::size_t r = 0; r < data.size(); ++r) mean += data.target(r);
    mean /= count;
    double var = 0.0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double d = data.target(r) - mean;
        var += d * d;
    }
    return var / count;
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

double parse_double(const std::string& token, const std::string& context) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw std::runtime_error(context + ": cannot parse number '" + token + "'");
    return v;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset file '" + path.string() + "' is empty");
    const std::size_t columns = split_csv_line(line).size();
    if (columns < 2)
        throw std::runtime_error("dataset file '" + path.string() +
                                 "' needs at least one feature column and one target column");
    const int n = static_cast<int>(columns) - 1;

    std::vector<double> x;
    std::vector<double> y;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (fields.size() != columns)
            throw std::runtime_error(where + ": expected " + std::to_string(columns) +
                                     " fields, got " + std::to_string(fields.size()));
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            const double v = parse_double(fields[i], where);
            if (!std::isfinite(v)) throw std::runtime_error(where + ": non-finite feature value");
            x.push_back(v);
        }
        const double t = parse_double(fields.back(), where);
        if (!std::isfinite(t)) throw std::runtime_error(where + ": non-finite target value");
        y.push_back(t);
    }
    if (y.empty()) throw std::runtime_error("dataset file '" + path.string() + "' has no data rows");
    return Dataset(n, std::move(x), std::move(y));
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write dataset file '" + path.string() + "'");
    for (int i = 0; i < data.num_features(); ++i) out << "x" << i << ",";
    out << "y\n";
    for (std::size_t r = 0; r < data.size(); ++r) {
        auto row = data.row(r);
        for (double v : row) out << format_double(v) << ",";
        out << format_double(data.target(r)) << "\n";
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace treebo
