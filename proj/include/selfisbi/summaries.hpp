#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace selfisbi {

/// Probability mass inside the 1, 2 and 3 sigma equal-tailed intervals.
inline constexpr std::array<double, 3> kSigmaLevels = {0.6827, 0.9545, 0.9973};

struct CredibleInterval {
    double level = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct PosteriorSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    /// intervals[j][k]: parameter j at level kSigmaLevels[k].
    std::vector<std::array<CredibleInterval, 3>> intervals;

    Eigen::VectorXd sd() const { return covariance.diagonal().cwiseSqrt(); }
    double correlation(Eigen::Index i, Eigen::Index j) const;
};

/// Sample moments and equal-tailed intervals of `samples` (one sample per row).
/// Throws InsufficientData for fewer than two samples.
PosteriorSummary posterior_summaries(const Eigen::MatrixXd& samples);

/// Binned joint density of columns (i, j) for corner plots.
struct Histogram2D {
    Eigen::Index i = 0, j = 0;
    std::vector<double> edges_i, edges_j;  // bins + 1 edges each
    Eigen::MatrixXi counts;                // bins x bins, row = bin of column i
};

Histogram2D histogram_2d(const Eigen::MatrixXd& samples, Eigen::Index i, Eigen::Index j, int bins);

/// All pairs i < j.
std::vector<Histogram2D> corner_histograms(const Eigen::MatrixXd& samples, int bins);

}  // namespace selfisbi
