// Serial reference kernels vs their OpenMP counterparts on the default
// Lotka-Volterra configuration. Outputs are identical; only wall time differs.

#include "selfisbi/abc.hpp"
#include "selfisbi/compression.hpp"
#include "selfisbi/ensemble.hpp"
#include "selfisbi/selfi.hpp"
#include "selfisbi/simulator.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

namespace {

using namespace selfisbi;

struct Fixture {
    LotkaVolterraMap T{SolverSettings{}};
    ModelASimulator sim{ObserverConfig::defaults(50)};
    ParamPrior prior;
    Eigen::VectorXd theta0 = T(prior.mean).values;
    Eigen::VectorXd h = default_fd_steps(theta0);
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

struct AbcFixture {
    CompressionArtifacts comp;
    Eigen::VectorXd obs;
    AbcFixture() {
        auto& f = fixture();
        const auto archive = run_expansion_ensembles(f.theta0, f.sim, 150, 100, f.h, 1);
        const auto exp = build_expansion_artifacts(archive, CovarianceEstimator::kLedoitWolf);
        comp = build_compression_artifacts(exp, as_latent_map(f.T), f.prior.mean,
                                           default_stencil_steps(f.prior.mean));
        Rng rng = make_rng(1, Stream::kMock, 0, 0);
        obs = compress(f.sim.simulate(f.T(ParamVector(0.55, 0.2, 0.2, 0.05)).values, rng), comp);
    }
};

AbcFixture& abc_fixture() {
    static AbcFixture f;
    return f;
}

void BM_EnsembleSerial(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        auto a = run_expansion_ensembles_serial(f.theta0, f.sim, 150, 100, f.h, 7);
        benchmark::DoNotOptimize(a.expansion.data());
    }
    state.SetItemsProcessed(state.iterations() * 10150);
}

void BM_EnsembleOpenMP(benchmark::State& state) {
    auto& f = fixture();
    omp_set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto a = run_expansion_ensembles(f.theta0, f.sim, 150, 100, f.h, 7);
        benchmark::DoNotOptimize(a.expansion.data());
    }
    state.SetItemsProcessed(state.iterations() * 10150);
}

AbcSettings abc_settings() {
    AbcSettings s;
    s.n_accept_target = 200;
    s.max_draws = 200000;
    s.seed_root = 11;
    return s;
}

void BM_AbcSerial(benchmark::State& state) {
    auto& f = fixture();
    auto& a = abc_fixture();
    const auto chain = make_summary_chain(as_latent_map(f.T), f.sim, a.comp);
    for (auto _ : state) {
        auto r = rejection_sample_serial(f.prior, chain, a.obs, a.comp.fisher, abc_settings());
        state.counters["draws"] = static_cast<double>(r.n_draws());
    }
}

void BM_AbcOpenMP(benchmark::State& state) {
    auto& f = fixture();
    auto& a = abc_fixture();
    omp_set_num_threads(static_cast<int>(state.range(0)));
    const auto chain = make_summary_chain(as_latent_map(f.T), f.sim, a.comp);
    for (auto _ : state) {
        auto r = rejection_sample(f.prior, chain, a.obs, a.comp.fisher, abc_settings());
        state.counters["draws"] = static_cast<double>(r.n_draws());
    }
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleOpenMP)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AbcSerial)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AbcOpenMP)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
