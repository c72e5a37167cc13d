#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace treebo {

/// Observations (X, y). Rows are stored contiguously, row-major.
class Dataset {
public:
    Dataset() = default;
    Dataset(int num_features, std::vector<double> x, std::vector<double> y);

    int num_features() const { return num_features_; }
    std::size_t size() const { return y_.size(); }

    std::span<const double> row(std::size_t i) const {
        return {x_.data() + i * static_cast<std::size_t>(num_features_),
                static_cast<std::size_t>(num_features_)};
    }
    double target(std::size_t i) const { return y_[i]; }
    std::span<const double> targets() const { return y_; }
    std::span<const double> features_flat() const { return x_; }

    void append(std::span<const double> x, double y);

private:
    int num_features_ = 0;
    std::vector<double> x_;
    std::vector<double> y_;
};

/// Per-dimension mean and population standard deviation; zero deviations are
/// replaced by 1 so standardization stays defined on constant columns.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std;

    int dim() const { return static_cast<int>(mean.size()); }
    double to_std(int i, double x) const { return (x - mean[i]) / std[i]; }
    double to_raw(int i, double z) const { return mean[i] + std[i] * z; }
    std::vector<double> standardize(std::span<const double> x) const;
    std::vector<double> destandardize(std::span<const double> z) const;
};

Standardizer fit_standardizer(const Dataset& data);

/// Population variance of the raw targets.
double target_variance(const Dataset& data);

/// CSV with a header row, feature columns first, one target column last.
/// Parsing is locale independent; rejects non-finite and ragged rows.
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

/// Shortest decimal form that round-trips binary64; used by every text format.
std::string format_double(double v);
double parse_double(const std::string& token, const std::string& context);

}  // namespace treebo
