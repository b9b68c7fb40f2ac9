#include "selfisbi/abc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace selfisbi {

namespace {

struct Draw {
    ParamVector omega;
    ParamVector omega_tilde;
    double distance;
    bool failed;
};

Draw evaluate(std::size_t n, const ParamPrior& prior, const SummaryChain& chain,
              const Eigen::VectorXd& obs, const Eigen::MatrixXd& fisher,
              std::uint64_t seed_root) {
    Rng rng = make_rng(seed_root, Stream::kAbc, 0, n);
    Draw d;
    d.omega = prior.sample(rng);
    try {
        const Eigen::VectorXd s = chain(d.omega, rng);
        if (s.size() != 4 || !s.allFinite()) throw std::runtime_error("bad summary");
        d.omega_tilde = s;
        d.distance = fisher_rao_distance(s, obs, fisher);
        d.failed = false;
    } catch (const std::exception&) {
        d.omega_tilde.setConstant(std::numeric_limits<double>::quiet_NaN());
        d.distance = std::numeric_limits<double>::infinity();
        d.failed = true;
    }
    return d;
}

void check(const ParamPrior& prior, const Eigen::VectorXd& obs, const Eigen::MatrixXd& fisher,
           const AbcSettings& s) {
    prior.validate();
    if (!(s.epsilon > 0.0)) throw PreconditionError("ABC: epsilon must be positive");
    if (s.n_accept_target < 1) throw PreconditionError("ABC: need a positive acceptance target");
    if (s.batch_size < 1) throw PreconditionError("ABC: batch size must be positive");
    if (obs.size() != 4 || fisher.rows() != 4 || fisher.cols() != 4) {
        throw DimensionError("ABC: summaries and Fisher matrix must be 4-dimensional");
    }
}

class Collector {
public:
    explicit Collector(const AbcSettings& s) : s_(s) {}

    // Returns true once the acceptance target is reached.
    bool push(const Draw& d) {
        omega_.push_back(d.omega);
        tilde_.push_back(d.omega_tilde);
        dist_.push_back(d.distance);
        const bool acc = !d.failed && d.distance < s_.epsilon;
        out_.accepted.push_back(acc ? 1 : 0);
        out_.n_accepted += acc;
        out_.n_failed += d.failed;
        return out_.n_accepted >= s_.n_accept_target;
    }

    AbcResult finish(std::size_t n_evaluated) {
        out_.n_evaluated = n_evaluated;
        const auto n = static_cast<Eigen::Index>(dist_.size());
        out_.omega.resize(n, 4);
        out_.omega_tilde.resize(n, 4);
        out_.distance.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out_.omega.row(i) = omega_[static_cast<std::size_t>(i)].transpose();
            out_.omega_tilde.row(i) = tilde_[static_cast<std::size_t>(i)].transpose();
            out_.distance[i] = dist_[static_cast<std::size_t>(i)];
        }
        return std::move(out_);
    }

private:
    const AbcSettings& s_;
    AbcResult out_;
    std::vector<ParamVector> omega_, tilde_;
    std::vector<double> dist_;
};

[[noreturn]] void exhausted(const AbcSettings& s, AbcResult partial) {
    const std::string msg = "ABC budget exhausted: " + std::to_string(partial.n_accepted) +
                            " of " + std::to_string(s.n_accept_target) + " samples accepted in " +
                            std::to_string(partial.n_draws()) + " draws";
    throw BudgetExhausted(msg, std::move(partial));
}

}  // namespace

Eigen::MatrixXd AbcResult::accepted_samples() const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n_accepted), 4);
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        if (accepted[i]) out.row(k++) = omega.row(static_cast<Eigen::Index>(i));
    }
    return out;
}

SummaryChain make_summary_chain(LatentMap T, const StochasticSimulator& simulator,
                                const CompressionArtifacts& artifacts) {
    return [T = std::move(T), &simulator, &artifacts](const ParamVector& omega, Rng& rng) {
        const Eigen::VectorXd theta = T(omega);
        return compress(simulator.simulate(theta, rng), artifacts);
    };
}

AbcResult rejection_sample(const ParamPrior& prior, const SummaryChain& chain,
                           const Eigen::VectorXd& obs, const Eigen::MatrixXd& fisher,
                           const AbcSettings& s) {
    check(prior, obs, fisher, s);
    Collector collector(s);
    std::vector<Draw> batch;
    for (std::size_t start = 0; start < s.max_draws; start += s.batch_size) {
        const std::size_t m = std::min(s.batch_size, s.max_draws - start);
        batch.resize(m);
        const auto mm = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < mm; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            batch[idx] = evaluate(start + idx, prior, chain, obs, fisher, s.seed_root);
        }
        for (const auto& d : batch) {
            if (collector.push(d)) return collector.finish(start + m);
        }
    }
    exhausted(s, collector.finish(s.max_draws));
}

AbcResult rejection_sample_serial(const ParamPrior& prior, const SummaryChain& chain,
                                  const Eigen::VectorXd& obs, const Eigen::MatrixXd& fisher,
                                  const AbcSettings& s) {
    check(prior, obs, fisher, s);
    Collector collector(s);
    for (std::size_t n = 0; n < s.max_draws; ++n) {
        if (collector.push(evaluate(n, prior, chain, obs, fisher, s.seed_root))) {
            return collector.finish(n + 1);
        }
    }
    exhausted(s, collector.finish(s.max_draws));
}

}  // namespace selfisbi
