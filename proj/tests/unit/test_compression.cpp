#include "selfisbi/compression.hpp"
#include "selfisbi/ensemble.hpp"
#include "selfisbi/errors.hpp"
#include "selfisbi/simulator.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace selfisbi;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
}

Eigen::MatrixXd random_spd(Eigen::Index n, std::uint64_t seed) {
    const Eigen::MatrixXd a = random_matrix(n, n, seed);
    return a * a.transpose() / static_cast<double>(n) + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

/// Exactly linear hierarchy: T(omega) = M omega + c, Phi = theta + noise.
struct LinearHierarchy {
    Eigen::Index S = 12;
    Eigen::MatrixXd M = random_matrix(12, 4, 1);
    Eigen::VectorXd c = Eigen::VectorXd::Constant(12, 2.0);
    Eigen::MatrixXd sigma = 0.04 * random_spd(12, 2);
    LinearGaussianSimulator sim{Eigen::MatrixXd::Identity(12, 12), Eigen::VectorXd::Zero(12), sigma};
    LatentMap T = [this](const Eigen::VectorXd& w) -> Eigen::VectorXd { return c + M * w; };
    Eigen::VectorXd omega0 = Eigen::Vector4d(0.5, 0.2, 0.2, 0.05);

    /// Exact artifacts: f0 = T(omega0), C0 = Sigma, grad f0 = I.
    ExpansionArtifacts exact() const {
        ExpansionArtifacts a;
        a.theta0 = T(omega0);
        a.f0 = a.theta0;
        a.C0 = sigma;
        a.grad_f0 = Eigen::MatrixXd::Identity(S, S);
        a.layout = sim.layout();
        return a;
    }
};

}  // namespace

TEST_CASE("stencil is exact for linear maps and the identity") {
    const Eigen::MatrixXd M = random_matrix(9, 4, 3);
    const Eigen::VectorXd c = random_matrix(9, 1, 4);
    const LatentMap T = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd { return c + M * w; };
    const Eigen::VectorXd w0 = Eigen::Vector4d(0.3, -0.2, 1.5, 0.01);
    for (double rel : {1e-3, 0.1, 2.0}) {
        CHECK((grad_T(T, w0, default_stencil_steps(w0, rel)) - M).cwiseAbs().maxCoeff() < 1e-9);
    }
    const LatentMap id = [](const Eigen::VectorXd& w) -> Eigen::VectorXd { return w; };
    CHECK((grad_T(id, w0, default_stencil_steps(w0)) - Eigen::MatrixXd::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
}

TEST_CASE("stencil is exact for polynomials of degree six") {
    const LatentMap poly = [](const Eigen::VectorXd& w) -> Eigen::VectorXd {
        Eigen::VectorXd out(1);
        out[0] = std::pow(w[0], 6) + 3.0 * std::pow(w[0], 5) - w[0] * w[0];
        return out;
    };
    const Eigen::VectorXd w0 = Eigen::VectorXd::Constant(1, 0.7);
    const double exact = 6 * std::pow(0.7, 5) + 15 * std::pow(0.7, 4) - 1.4;
    CHECK(grad_T(poly, w0, Eigen::VectorXd::Constant(1, 0.1))(0, 0) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("stencil errors name the component and offset") {
    const LatentMap fragile = [](const Eigen::VectorXd& w) -> Eigen::VectorXd {
        if (w[2] > 1.0) throw SolverDivergence(7, "diverged");
        return w;
    };
    try {
        grad_T(fragile, Eigen::Vector4d(0, 0, 0.95, 0), Eigen::VectorXd::Constant(4, 0.02));
        FAIL("expected divergence");
    } catch (const SolverDivergence& e) {
        const std::string msg = e.what();
        CHECK(msg.find("component 2") != std::string::npos);
        CHECK(msg.find("offset 3") != std::string::npos);
        CHECK(e.step() == 7);
    }
    CHECK_THROWS_AS(grad_T(fragile, Eigen::Vector4d::Zero(), Eigen::VectorXd::Zero(4)), PreconditionError);
}

TEST_CASE("Lotka-Volterra stencil agrees with second-order central differences") {
    const auto T = as_latent_map(LotkaVolterraMap{SolverSettings{}});
    const Eigen::VectorXd w0 = ParamPrior{}.mean;
    const Eigen::VectorXd h = default_stencil_steps(w0);
    const Eigen::MatrixXd six = grad_T(T, w0, h);
    const Eigen::MatrixXd two = oracle::central_difference(T, w0, h / 2);
    // Second-order truncation: |T'''| h^2 / 6, with T''' from a wider third difference.
    for (Eigen::Index j = 0; j < 4; ++j) {
        const double H = 10 * h[j];
        Eigen::VectorXd p1 = w0, p2 = w0, m1 = w0, m2 = w0;
        p1[j] += H; p2[j] += 2 * H; m1[j] -= H; m2[j] -= 2 * H;
        const Eigen::VectorXd third = (T(p2) - 2 * T(p1) + 2 * T(m1) - T(m2)) / (2 * H * H * H);
        for (Eigen::Index r = 0; r < six.rows(); ++r) {
            const double bound = 2.0 * std::abs(third[r]) * std::pow(h[j] / 2, 2) / 6.0 +
                                 1e-9 * (1.0 + std::abs(six(r, j)));
            CHECK(std::abs(six(r, j) - two(r, j)) <= bound);
        }
    }
}

TEST_CASE("chain rule product") {
    const Eigen::MatrixXd G = random_matrix(7, 5, 8), J = random_matrix(5, 3, 9);
    CHECK(grad_f_omega(G, Eigen::MatrixXd::Identity(5, 5)) == G);
    CHECK(grad_f_omega(Eigen::MatrixXd::Zero(7, 5), J).isZero(0));
    const Eigen::MatrixXd naive = oracle::triple_loop_product(G, J);
    CHECK((grad_f_omega(G, J) - naive).cwiseAbs().maxCoeff() <= 1e-12 * naive.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(grad_f_omega(G, random_matrix(4, 3, 1)), DimensionError);
}

TEST_CASE("Fisher matrix") {
    Eigen::MatrixXd Q = random_matrix(6, 4, 10).householderQr().householderQ() * Eigen::MatrixXd::Identity(6, 4);
    const auto f = fisher_matrix(Q, Eigen::MatrixXd::Identity(6, 6));
    CHECK((f.fisher - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::Matrix2d g;
    g << 1, 0, 0, 2;
    const Eigen::Matrix2d c0 = Eigen::Vector2d(1, 4).asDiagonal();
    CHECK((fisher_matrix(g, c0).fisher - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(fisher_matrix(Eigen::MatrixXd::Zero(6, 4), Eigen::MatrixXd::Identity(6, 6)),
                    SingularMatrix);

    const auto r = fisher_matrix(random_matrix(30, 4, 11), random_spd(30, 12));
    CHECK((r.fisher * r.inverse - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.fisher == r.fisher.transpose());
}

TEST_CASE("compression identities") {
    LinearHierarchy lh;
    const auto comp = build_compression_artifacts(lh.exact(), lh.T, lh.omega0,
                                                  default_stencil_steps(lh.omega0));
    const Eigen::VectorXd at_f0 = compress(comp.f0, comp);
    CHECK(((at_f0 - lh.omega0).array().abs() <= 1e-12 * lh.omega0.array().abs()).all());

    const Eigen::VectorXd p1 = comp.f0 + random_matrix(12, 1, 20);
    const Eigen::VectorXd p2 = comp.f0 + random_matrix(12, 1, 21);
    const Eigen::VectorXd lhs = compress(Eigen::VectorXd(p1 + p2 - comp.f0), comp) - lh.omega0;
    const Eigen::VectorXd rhs = (compress(p1, comp) - lh.omega0) + (compress(p2, comp) - lh.omega0);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);

    // Exactly linear chain: compressing the noiseless data at omega recovers omega.
    const Eigen::VectorXd w = lh.omega0 + Eigen::Vector4d(0.01, -0.02, 0.005, 0.001);
    CHECK((compress(lh.T(w), comp) - w).cwiseAbs().maxCoeff() < 1e-9);

    CHECK_THROWS_AS(compress(Eigen::VectorXd::Zero(11), comp), IncompatibleData);
    DataVector other{comp.f0, flat_layout(12)};
    CHECK_NOTHROW(compress(other, comp));
    auto mx = std::vector<int>(12, 1), my = std::vector<int>(12, 0);
    mx[3] = 0;
    my[3] = 1;
    other.layout = DataLayout::from_masks(mx, my);
    CHECK_THROWS_AS(compress(other, comp), IncompatibleData);
}

TEST_CASE("building compression artifacts makes no simulator calls") {
    LinearHierarchy lh;
    const CountingSimulator counter(lh.sim);
    const Eigen::VectorXd theta0 = lh.T(lh.omega0);
    const auto archive = run_expansion_ensembles(theta0, counter, 40, 20, default_fd_steps(theta0), 5);
    const auto calls = counter.calls();
    CHECK(calls == 40 + 20 * 12);
    const auto expansion = build_expansion_artifacts(archive);
    const auto comp = build_compression_artifacts(expansion, lh.T, lh.omega0, default_stencil_steps(lh.omega0));
    CHECK(counter.calls() == calls);
    CHECK(comp.gain.rows() == 4);
    CHECK(comp.gain.cols() == 12);
}

TEST_CASE("summaries are unbiased and saturate Cramer-Rao on the linear model") {
    LinearHierarchy lh;
    const auto comp = build_compression_artifacts(lh.exact(), lh.T, lh.omega0,
                                                  default_stencil_steps(lh.omega0));
    const Eigen::VectorXd w_star = lh.omega0 + Eigen::Vector4d(0.02, -0.01, 0.01, 0.0);
    const Eigen::VectorXd theta = lh.T(w_star);
    const int n = 10000;
    Eigen::MatrixXd draws(n, 4);
    for (int k = 0; k < n; ++k) {
        Rng rng = make_rng(3, Stream::kTest, 0, static_cast<std::uint64_t>(k));
        draws.row(k) = compress(lh.sim.simulate(theta, rng), comp).transpose();
    }
    const Eigen::VectorXd mean = draws.colwise().mean().transpose();
    const Eigen::MatrixXd centered = draws.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1);
    const Eigen::MatrixXd& Finv = comp.fisher_inverse;
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(mean[i] - w_star[i]) < 4.0 * std::sqrt(Finv(i, i) / n));
        for (int j = 0; j < 4; ++j) {
            const double se = std::sqrt((Finv(i, i) * Finv(j, j) + Finv(i, j) * Finv(i, j)) / n);
            CHECK(std::abs(cov(i, j) - Finv(i, j)) < 5.0 * se);
        }
    }
}

TEST_CASE("Fisher-Rao distance") {
    const Eigen::Vector4d a(1, 2, 3, 4), b(0.5, 2, 1, 4.5);
    const Eigen::MatrixXd F = random_spd(4, 30);
    CHECK(fisher_rao_distance(a, a, F) == 0.0);
    CHECK(fisher_rao_distance(a, a + Eigen::Vector4d(0, 0, 1, 0), Eigen::MatrixXd::Identity(4, 4)) == 1.0);
    CHECK(fisher_rao_distance(a, b, F) == fisher_rao_distance(b, a, F));
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Eigen::VectorXd x = random_matrix(4, 1, 100 + s), y = random_matrix(4, 1, 200 + s),
                              z = random_matrix(4, 1, 300 + s);
        const double dxy = fisher_rao_distance(x, y, F);
        const double naive = std::sqrt(oracle::quadratic_form(x - y, F));
        CHECK(std::abs(dxy - naive) <= 1e-12 * naive);
        CHECK(dxy <= fisher_rao_distance(x, z, F) + fisher_rao_distance(z, y, F) + 1e-12);
        CHECK(dxy > 0.0);
    }
}
