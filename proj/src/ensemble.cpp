#include "selfisbi/ensemble.hpp"

#include "selfisbi/errors.hpp"

#include <cmath>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace selfisbi {

namespace {

void check_preconditions(const Eigen::VectorXd& theta0, const StochasticSimulator& simulator,
                         std::size_t N0, std::size_t Ns, const Eigen::VectorXd& h) {
    if (N0 < 2) throw PreconditionError("ensemble: N0 must be at least 2");
    if (Ns < 2) throw PreconditionError("ensemble: Ns must be at least 2");
    if (Ns > N0) {
        throw PreconditionError("ensemble: Ns must not exceed N0 (direction runs are paired "
                                "with expansion runs)");
    }
    if (theta0.size() != simulator.latent_size()) {
        throw DimensionError("ensemble: theta0 has " + std::to_string(theta0.size()) +
                             " entries, simulator expects " +
                             std::to_string(simulator.latent_size()));
    }
    if (h.size() != theta0.size()) throw DimensionError("ensemble: one step per latent component");
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !std::isfinite(h[i])) {
            throw PreconditionError("ensemble: step h_" + std::to_string(i) +
                                    " must be positive and finite");
        }
    }
}

struct Job {
    SimulationArchive archive;
    std::size_t total = 0;
};

Job prepare(const Eigen::VectorXd& theta0, const StochasticSimulator& simulator, std::size_t N0,
            std::size_t Ns, const Eigen::VectorXd& h, std::uint64_t seed_root) {
    check_preconditions(theta0, simulator, N0, Ns, h);
    Job job;
    auto& a = job.archive;
    a.theta0 = theta0;
    a.steps = h;
    a.N0 = N0;
    a.Ns = Ns;
    a.seed_root = seed_root;
    a.layout = simulator.layout();
    const Eigen::Index P = simulator.data_size();
    a.expansion.resize(static_cast<Eigen::Index>(N0), P);
    a.directions.resize(theta0.size() * static_cast<Eigen::Index>(Ns), P);
    job.total = N0 + static_cast<std::size_t>(theta0.size()) * Ns;
    return job;
}

// Simulation j: j < N0 is expansion run j; otherwise direction (j - N0) / Ns, run (j - N0) % Ns.
// Returns an empty string on success, the failure description otherwise.
std::string run_one(std::size_t j, SimulationArchive& a, const StochasticSimulator& simulator) {
    const bool expansion = j < a.N0;
    const std::size_t k = expansion ? j : (j - a.N0) % a.Ns;
    try {
        Rng rng = make_rng(a.seed_root, Stream::kEnsemble, 0, k);
        Eigen::VectorXd phi;
        if (expansion) {
            phi = simulator.simulate(a.theta0, rng);
        } else {
            const auto i = static_cast<Eigen::Index>((j - a.N0) / a.Ns);
            Eigen::VectorXd theta = a.theta0;
            theta[i] += a.steps[i];
            phi = simulator.simulate(theta, rng);
        }
        if (phi.size() != a.expansion.cols()) return "simulator returned a wrongly sized data vector";
        if (!phi.allFinite()) return "non-finite data vector";
        if (expansion) {
            a.expansion.row(static_cast<Eigen::Index>(j)) = phi.transpose();
        } else {
            a.directions.row(static_cast<Eigen::Index>(j - a.N0)) = phi.transpose();
        }
        return {};
    } catch (const std::exception& e) {
        return e.what();
    }
}

void raise_failures(const SimulationArchive& a, const std::vector<std::string>& errors) {
    std::map<std::string, std::size_t> per_group;
    std::string first;
    for (std::size_t j = 0; j < errors.size(); ++j) {
        if (errors[j].empty()) continue;
        if (first.empty()) first = errors[j];
        const std::string group =
            j < a.N0 ? "theta0" : "direction " + std::to_string((j - a.N0) / a.Ns);
        ++per_group[group];
    }
    if (per_group.empty()) return;
    std::string msg = "ensemble aborted: ";
    std::size_t shown = 0;
    for (const auto& [group, count] : per_group) {
        if (shown++ == 5) {
            msg += "... ";
            break;
        }
        msg += group + " lost " + std::to_string(count) + " run(s); ";
    }
    throw EnsembleFailure(msg + "first error: " + first);
}

}  // namespace

Eigen::MatrixXd SimulationArchive::direction_block(Eigen::Index i) const {
    const auto ns = static_cast<Eigen::Index>(Ns);
    if (i < 0 || i >= theta0.size() || (i + 1) * ns > directions.rows()) {
        throw InsufficientData("archive has no simulations for direction " + std::to_string(i));
    }
    return directions.middleRows(i * ns, ns);
}

Eigen::VectorXd default_fd_steps(const Eigen::VectorXd& theta0, double rel) {
    return rel * theta0.cwiseAbs().cwiseMax(1.0);
}

SimulationArchive run_expansion_ensembles(const Eigen::VectorXd& theta0,
                                          const StochasticSimulator& simulator, std::size_t N0,
                                          std::size_t Ns, const Eigen::VectorXd& h,
                                          std::uint64_t seed_root) {
    Job job = prepare(theta0, simulator, N0, Ns, h, seed_root);
    std::vector<std::string> errors(job.total);
    const auto total = static_cast<std::int64_t>(job.total);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t j = 0; j < total; ++j) {
        errors[static_cast<std::size_t>(j)] =
            run_one(static_cast<std::size_t>(j), job.archive, simulator);
    }
    raise_failures(job.archive, errors);
    return std::move(job.archive);
}

SimulationArchive run_expansion_ensembles_serial(const Eigen::VectorXd& theta0,
                                                 const StochasticSimulator& simulator,
                                                 std::size_t N0, std::size_t Ns,
                                                 const Eigen::VectorXd& h,
                                                 std::uint64_t seed_root) {
    Job job = prepare(theta0, simulator, N0, Ns, h, seed_root);
    std::vector<std::string> errors(job.total);
    for (std::size_t j = 0; j < job.total; ++j) errors[j] = run_one(j, job.archive, simulator);
    raise_failures(job.archive, errors);
    return std::move(job.archive);
}

}  // namespace selfisbi
