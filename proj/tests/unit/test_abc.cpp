#include "selfisbi/abc.hpp"
#include "selfisbi/summaries.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace selfisbi;

namespace {

/// omega~ = omega + N(0, noise^2 I): a cheap chain with a known likelihood.
SummaryChain noisy_identity(double noise) {
    return [noise](const ParamVector& w, Rng& rng) -> Eigen::VectorXd {
        std::normal_distribution<double> g(0.0, noise);
        Eigen::VectorXd out = w;
        for (int j = 0; j < 4; ++j) out[j] += g(rng);
        return out;
    };
}

Eigen::MatrixXd fisher_for(const ParamPrior& prior, double noise) {
    (void)prior;
    return Eigen::MatrixXd::Identity(4, 4) / (noise * noise);
}

}  // namespace

TEST_CASE("prior draws are redrawn until nonnegative") {
    ParamPrior p;
    p.mean = ParamVector(0.01, 0.01, 0.01, 0.01);
    p.sd = ParamVector(0.02, 0.02, 0.02, 0.02);
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) CHECK((p.sample(rng).array() >= 0.0).all());
    p.sd[1] = 0.0;
    CHECK_THROWS_AS(p.validate(), PreconditionError);
}

TEST_CASE("infinite epsilon reproduces the prior") {
    const ParamPrior prior;
    AbcSettings s;
    s.epsilon = std::numeric_limits<double>::infinity();
    s.n_accept_target = 10000;
    s.max_draws = 10000;
    s.seed_root = 5;
    const auto r = rejection_sample(prior, noisy_identity(0.01), prior.mean, fisher_for(prior, 0.01), s);
    CHECK(r.n_accepted == 10000);
    CHECK(r.n_draws() == 10000);
    const Eigen::MatrixXd acc = r.accepted_samples();
    for (int j = 0; j < 4; ++j) {
        std::vector<double> col(acc.col(j).data(), acc.col(j).data() + acc.rows());
        const double mu = prior.mean[j], sd = prior.sd[j];
        const double p = oracle::ks_pvalue(col, [&](double x) { return oracle::normal_cdf((x - mu) / sd); });
        CHECK(p > 0.01);
    }
}

TEST_CASE("posterior spread shrinks as epsilon decreases") {
    const ParamPrior prior;
    const double noise = 0.005;
    const Eigen::VectorXd obs = prior.mean + Eigen::Vector4d(0.01, 0.0, -0.003, 0.0);
    double last = std::numeric_limits<double>::infinity();
    for (double eps : {std::numeric_limits<double>::infinity(), 4.0, 2.0}) {
        AbcSettings s;
        s.epsilon = eps;
        s.n_accept_target = 1500;
        s.seed_root = 8;
        const auto r = rejection_sample(prior, noisy_identity(noise), obs, fisher_for(prior, noise), s);
        const double tr = posterior_summaries(r.accepted_samples()).covariance.trace();
        CHECK(tr <= last);
        last = tr;
    }
}

TEST_CASE("accepted draws satisfy the threshold and the record is complete") {
    const ParamPrior prior;
    AbcSettings s;
    s.epsilon = 3.0;
    s.n_accept_target = 300;
    s.seed_root = 13;
    const auto F = fisher_for(prior, 0.01);
    const auto r = rejection_sample(prior, noisy_identity(0.01), prior.mean, F, s);
    CHECK(r.n_accepted == 300);
    CHECK(r.accepted.back() == 1);  // stops at the draw reaching the target
    for (std::size_t n = 0; n < r.n_draws(); ++n) {
        const auto i = static_cast<Eigen::Index>(n);
        const double d = fisher_rao_distance(r.omega_tilde.row(i).transpose(), prior.mean, F);
        CHECK(d == doctest::Approx(r.distance[i]));
        CHECK(static_cast<bool>(r.accepted[n]) == (r.distance[i] < 3.0));
    }
    CHECK(r.n_evaluated >= r.n_draws());
}

TEST_CASE("failed chains are rejected, not fatal") {
    const ParamPrior prior;
    const SummaryChain flaky = [](const ParamVector& w, Rng& rng) -> Eigen::VectorXd {
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.2) throw std::runtime_error("diverged");
        return w;
    };
    AbcSettings s;
    s.epsilon = std::numeric_limits<double>::infinity();
    s.n_accept_target = 500;
    s.seed_root = 2;
    const auto r = rejection_sample(prior, flaky, prior.mean, fisher_for(prior, 1.0), s);
    CHECK(r.n_accepted == 500);
    CHECK(r.n_failed > 0);
    CHECK(r.n_failed + r.n_accepted == r.n_draws());
}

TEST_CASE("budget exhaustion carries partial results") {
    const ParamPrior prior;
    AbcSettings s;
    s.epsilon = 1e-6;
    s.n_accept_target = 10;
    s.max_draws = 1000;
    s.seed_root = 1;
    try {
        rejection_sample(prior, noisy_identity(0.01), prior.mean, fisher_for(prior, 0.01), s);
        FAIL("expected BudgetExhausted");
    } catch (const BudgetExhausted& e) {
        CHECK(e.partial().n_draws() == 1000);
        CHECK(e.partial().n_accepted < 10);
    }
    s.epsilon = 0.0;
    CHECK_THROWS_AS(rejection_sample(prior, noisy_identity(0.01), prior.mean, fisher_for(prior, 0.01), s),
                    PreconditionError);
}

TEST_CASE("posterior summaries") {
    Eigen::MatrixXd same = Eigen::MatrixXd::Ones(10, 4);
    const auto s0 = posterior_summaries(same);
    CHECK(s0.covariance.isZero(0));
    for (const auto& iv : s0.intervals[0]) {
        CHECK(iv.lo == 1.0);
        CHECK(iv.hi == 1.0);
    }
    CHECK_THROWS_AS(posterior_summaries(Eigen::MatrixXd::Ones(1, 4)), InsufficientData);

    const int n = 20000;
    Rng rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd x(n, 2);
    for (int k = 0; k < n; ++k) {
        const double a = g(rng), b = g(rng);
        x(k, 0) = 1.0 + 2.0 * a;
        x(k, 1) = -1.0 + 0.5 * (0.6 * a + 0.8 * b);
    }
    const auto s = posterior_summaries(x);
    CHECK(std::abs(s.mean[0] - 1.0) < 4.0 * 2.0 / std::sqrt(n));
    CHECK(std::abs(s.covariance(0, 0) - 4.0) < 4.0 * 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s.correlation(0, 1) - 0.6) < 4.0 * (1 - 0.36) / std::sqrt(n));
    CHECK(s.intervals[0][1].lo == doctest::Approx(1.0 - 2.0 * 2.0).epsilon(0.03));
    CHECK(s.intervals[0][1].hi == doctest::Approx(1.0 + 2.0 * 2.0).epsilon(0.03));

    // Empirical coverage of the 95% interval on fresh samples.
    int inside = 0;
    for (int k = 0; k < n; ++k) inside += s.intervals[0][1].contains(1.0 + 2.0 * g(rng));
    const double cover = static_cast<double>(inside) / n;
    CHECK(std::abs(cover - 0.9545) < 4.0 * std::sqrt(0.9545 * 0.0455 / n) + 0.005);
}

TEST_CASE("2D histograms") {
    Eigen::MatrixXd x(4, 3);
    x << 0, 0, 5, 1, 1, 5, 0.5, 0.25, 5, 1, 0, 5;
    const auto h = histogram_2d(x, 0, 1, 2);
    CHECK(h.counts.sum() == 4);
    CHECK(h.edges_i.front() == 0.0);
    CHECK(h.edges_i.back() == 1.0);
    CHECK(h.counts(0, 0) == 1);
    CHECK(h.counts(1, 1) == 1);  // 0.5 sits on the upper bin edge
    CHECK(h.counts(1, 0) == 2);
    const auto degenerate = histogram_2d(x, 0, 2, 3);
    CHECK(degenerate.counts.sum() == 4);
    CHECK(corner_histograms(x, 5).size() == 3);
}
