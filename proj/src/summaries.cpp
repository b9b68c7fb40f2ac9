#include "selfisbi/summaries.hpp"

#include "selfisbi/covariance.hpp"
#include "selfisbi/errors.hpp"
#include "selfisbi/selfi.hpp"

#include <algorithm>
#include <cmath>

namespace selfisbi {

double PosteriorSummary::correlation(Eigen::Index i, Eigen::Index j) const {
    const double denom = std::sqrt(covariance(i, i) * covariance(j, j));
    return denom > 0.0 ? covariance(i, j) / denom : 0.0;
}

PosteriorSummary posterior_summaries(const Eigen::MatrixXd& samples) {
    if (samples.rows() < 2) {
        throw InsufficientData("posterior summaries need at least two samples, got " +
                               std::to_string(samples.rows()));
    }
    PosteriorSummary s;
    s.mean = sample_mean(samples);
    s.covariance = sample_covariance(samples);
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
        std::vector<double> col(samples.col(j).data(), samples.col(j).data() + samples.rows());
        std::array<CredibleInterval, 3> iv;
        for (std::size_t k = 0; k < kSigmaLevels.size(); ++k) {
            const double tail = 0.5 * (1.0 - kSigmaLevels[k]);
            iv[k] = {kSigmaLevels[k], percentile(col, tail), percentile(col, 1.0 - tail)};
        }
        s.intervals.push_back(iv);
    }
    return s;
}

namespace {

std::vector<double> edges_for(const Eigen::VectorXd& v, int bins) {
    double lo = v.minCoeff(), hi = v.maxCoeff();
    if (!(hi > lo)) {
        const double pad = 0.5 * std::max(std::abs(lo), 1.0) * 1e-6;
        lo -= pad;
        hi += pad;
    }
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    return edges;
}

int bin_of(double x, const std::vector<double>& edges) {
    const int bins = static_cast<int>(edges.size()) - 1;
    const double lo = edges.front(), hi = edges.back();
    const int b = static_cast<int>(std::floor((x - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
}

}  // namespace

Histogram2D histogram_2d(const Eigen::MatrixXd& samples, Eigen::Index i, Eigen::Index j,
                         int bins) {
    if (bins < 1) throw PreconditionError("histogram needs at least one bin");
    if (samples.rows() < 1) throw InsufficientData("histogram of an empty sample");
    if (i < 0 || j < 0 || i >= samples.cols() || j >= samples.cols()) {
        throw DimensionError("histogram column out of range");
    }
    Histogram2D h;
    h.i = i;
    h.j = j;
    h.edges_i = edges_for(samples.col(i), bins);
    h.edges_j = edges_for(samples.col(j), bins);
    h.counts = Eigen::MatrixXi::Zero(bins, bins);
    for (Eigen::Index n = 0; n < samples.rows(); ++n) {
        ++h.counts(bin_of(samples(n, i), h.edges_i), bin_of(samples(n, j), h.edges_j));
    }
    return h;
}

std::vector<Histogram2D> corner_histograms(const Eigen::MatrixXd& samples, int bins) {
    std::vector<Histogram2D> out;
    for (Eigen::Index i = 0; i < samples.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < samples.cols(); ++j) {
            out.push_back(histogram_2d(samples, i, j, bins));
        }
    }
    return out;
}

}  // namespace selfisbi
