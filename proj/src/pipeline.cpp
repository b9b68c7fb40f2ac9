#include "selfisbi/pipeline.hpp"

#include "selfisbi/abc.hpp"
#include "selfisbi/compression.hpp"
#include "selfisbi/ensemble.hpp"
#include "selfisbi/errors.hpp"
#include "selfisbi/manifest.hpp"
#include "selfisbi/matrix_io.hpp"
#include "selfisbi/selfi.hpp"
#include "selfisbi/summaries.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace selfisbi {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kParamNames[4] = {"alpha", "beta", "gamma", "delta"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void check_model_name(const std::string& model) {
    if (model != "A" && model != "B") throw ConfigError("model must be A or B, got " + model);
}

/// Loads the manifest of an existing run and insists it was produced by this config.
RunManifest open_run(const PipelineConfig& config) {
    const fs::path dir = config.output_dir;
    if (!RunManifest::exists(dir)) {
        throw ArtifactError("no run in " + dir.string() + "; run generate-mock first");
    }
    RunManifest m = RunManifest::load(dir);
    if (result_relevant(m.config()) != result_relevant(config.to_json())) {
        throw ConfigError("config (or seed) differs from the one that produced " + dir.string() +
                          "; rerun generate-mock to start a new run");
    }
    if (!m.stage_complete(kMockStage)) {
        throw ArtifactError("mock data missing in " + dir.string() + "; run generate-mock first");
    }
    return m;
}

/// Collects the files a stage writes, with their checksums.
class StageWriter {
public:
    StageWriter(fs::path root, std::string subdir) : root_(std::move(root)), sub_(std::move(subdir)) {}

    void matrix(const std::string& name, const Eigen::MatrixXd& m) {
        record(name, write_matrix(root_ / sub_ / name, m));
    }
    void text(const std::string& name, const std::string& content) {
        record(name, write_file_atomic(root_ / sub_ / name, content));
    }
    StageRecord& record() { return rec_; }

private:
    void record(const std::string& name, std::string sum) { rec_.files[sub_ + "/" + name] = std::move(sum); }

    fs::path root_;
    std::string sub_;
    StageRecord rec_;
};

Eigen::MatrixXd synthetic_matrix(std::size_t S) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(S), 4);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            M(i, j) = 10.0 * (1.0 + 0.5 * std::sin(0.37 * static_cast<double>((i + 1) * (j + 1))));
        }
    }
    return M;
}

std::string species_of(const PipelineConfig& c, Eigen::Index k) {
    if (c.hierarchy() == Hierarchy::kSyntheticLinear) return "latent";
    return k < static_cast<Eigen::Index>(c.solver.n_steps) ? "prey" : "predator";
}

Eigen::Index timestep_of(const PipelineConfig& c, Eigen::Index k) {
    if (c.hierarchy() == Hierarchy::kSyntheticLinear) return k;
    return k % static_cast<Eigen::Index>(c.solver.n_steps);
}

std::string bands_csv(const PipelineConfig& c, const LatentPrior& prior,
                      const SelfiPosterior& post, const Eigen::VectorXd& theta_gt) {
    std::ostringstream out;
    out << "timestep,species,prior_mean,prior_2sigma,gamma,posterior_2sigma,ground_truth\n";
    for (Eigen::Index k = 0; k < prior.mean.size(); ++k) {
        out << timestep_of(c, k) << ',' << species_of(c, k) << ',' << num(prior.mean[k]) << ','
            << num(2.0 * std::sqrt(prior.covariance(k, k))) << ',' << num(post.gamma[k]) << ','
            << num(2.0 * std::sqrt(post.Gamma(k, k))) << ',' << num(theta_gt[k]) << '\n';
    }
    return out.str();
}

std::string samples_csv(const AbcResult& r) {
    std::ostringstream out;
    out << "alpha,beta,gamma,delta,d_FR,accepted\n";
    for (std::size_t n = 0; n < r.n_draws(); ++n) {
        const auto i = static_cast<Eigen::Index>(n);
        for (int j = 0; j < 4; ++j) out << num(r.omega(i, j)) << ',';
        out << num(r.distance[i]) << ',' << static_cast<int>(r.accepted[n]) << '\n';
    }
    return out.str();
}

std::string summary_csv(const PosteriorSummary& s, const PipelineConfig& c) {
    std::ostringstream out;
    out << "parameter,mean,sd,lo_1sigma,hi_1sigma,lo_2sigma,hi_2sigma,lo_3sigma,hi_3sigma,"
           "ground_truth,prior_mean,prior_sd\n";
    for (int j = 0; j < 4; ++j) {
        out << kParamNames[j] << ',' << num(s.mean[j]) << ',' << num(std::sqrt(s.covariance(j, j)));
        for (const auto& iv : s.intervals[static_cast<std::size_t>(j)]) {
            out << ',' << num(iv.lo) << ',' << num(iv.hi);
        }
        out << ',' << num(c.omega_gt[j]) << ',' << num(c.prior.mean[j]) << ',' << num(c.prior.sd[j])
            << '\n';
    }
    return out.str();
}

json histograms_json(const std::vector<Histogram2D>& hs) {
    json out = json::array();
    for (const auto& h : hs) {
        json counts = json::array();
        for (Eigen::Index r = 0; r < h.counts.rows(); ++r) {
            std::vector<int> row(static_cast<std::size_t>(h.counts.cols()));
            for (Eigen::Index k = 0; k < h.counts.cols(); ++k) row[static_cast<std::size_t>(k)] = h.counts(r, k);
            counts.push_back(row);
        }
        out.push_back({{"x", kParamNames[h.i]},
                       {"y", kParamNames[h.j]},
                       {"x_edges", h.edges_i},
                       {"y_edges", h.edges_j},
                       {"counts", counts}});
    }
    return out;
}

json summary_info(const PosteriorSummary& s, const PipelineConfig& c) {
    json params = json::object();
    for (int j = 0; j < 4; ++j) {
        const auto& two = s.intervals[static_cast<std::size_t>(j)][1];
        params[kParamNames[j]] = {{"mean", s.mean[j]},
                                  {"sd", std::sqrt(s.covariance(j, j))},
                                  {"lo_2sigma", two.lo},
                                  {"hi_2sigma", two.hi},
                                  {"ground_truth", c.omega_gt[j]},
                                  {"ground_truth_in_2sigma", two.contains(c.omega_gt[j])},
                                  {"prior_sd", c.prior.sd[j]}};
    }
    return {{"parameters", params}, {"corr_alpha_gamma", s.correlation(0, 2)}};
}

}  // namespace

const StochasticSimulator& ModelSet::observer(const std::string& which) const {
    check_model_name(which);
    return which == "A" ? *model_A : *model_B;
}

ModelSet make_models(const PipelineConfig& c) {
    ModelSet m;
    if (c.hierarchy() == Hierarchy::kSyntheticLinear) {
        const auto S = static_cast<Eigen::Index>(c.synthetic.latent_size);
        const Eigen::MatrixXd M = synthetic_matrix(c.synthetic.latent_size);
        const Eigen::VectorXd offset = Eigen::VectorXd::LinSpaced(S, 5.0, 5.0 + 0.1 * (S - 1));
        m.T = [M, offset](const Eigen::VectorXd& omega) -> Eigen::VectorXd { return offset + M * omega; };
        const Eigen::MatrixXd noise =
            c.synthetic.noise_sd * c.synthetic.noise_sd * Eigen::MatrixXd::Identity(S, S);
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(S, S);
        m.model_A = std::make_unique<LinearGaussianSimulator>(I, Eigen::VectorXd::Zero(S), noise);
        m.model_B = std::make_unique<LinearGaussianSimulator>(
            I, Eigen::VectorXd::Constant(S, c.synthetic.model_b_bias), noise);
    } else {
        m.T = as_latent_map(LotkaVolterraMap(c.solver));
        m.model_A = std::make_unique<ModelASimulator>(c.observer);
        m.model_B = std::make_unique<ModelBSimulator>(c.observer);
    }
    return m;
}

std::string selfi_stage(const std::string& model) { return "selfi_" + model; }
std::string sbi_stage(const std::string& model) { return "compress_sbi_" + model; }

void set_worker_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

std::string cmd_generate_mock(const PipelineConfig& config) {
    config.validate();
    const Stopwatch clock;
    const fs::path dir = config.output_dir;
    const ModelSet models = make_models(config);

    const Eigen::VectorXd theta_gt = models.T(config.omega_gt);
    const CountingSimulator sim(*models.model_A);
    Rng rng = make_rng(config.seed_root, Stream::kMock, 0, 0);
    const Eigen::VectorXd phi = sim.simulate(theta_gt, rng);

    // A new mock invalidates every later stage.
    RunManifest manifest(config.to_json());
    StageWriter w(dir, "mock");
    w.matrix("omega_gt.bin", Eigen::VectorXd(config.omega_gt));
    w.matrix("theta_gt.bin", theta_gt);
    w.matrix("phi_obs.bin", phi);
    auto& rec = w.record();
    rec.complete = true;
    rec.simulations = sim.calls();
    rec.wall_seconds = clock.seconds();
    rec.info = {{"P", phi.size()}, {"S", theta_gt.size()}, {"omega_gt", to_std(config.omega_gt)}};
    manifest.set_stage(kMockStage, rec);
    manifest.save(dir);

    std::ostringstream msg;
    msg << "mock data: P = " << phi.size() << " observations of S = " << theta_gt.size()
        << " latent values, written to " << (dir / "mock").string();
    return msg.str();
}

std::string cmd_selfi(const PipelineConfig& config, const std::string& model) {
    check_model_name(model);
    const Stopwatch clock;
    const fs::path dir = config.output_dir;
    RunManifest manifest = open_run(config);
    const Eigen::VectorXd phi_obs = manifest.read_matrix_verified(dir, kMockStage, "mock/phi_obs.bin");
    const Eigen::VectorXd theta_gt = manifest.read_matrix_verified(dir, kMockStage, "mock/theta_gt.bin");

    const ModelSet models = make_models(config);
    const CountingSimulator sim(models.observer(model));
    const Eigen::VectorXd theta0 = models.T(config.prior.mean);
    const Eigen::VectorXd h = default_fd_steps(theta0, config.fd_relative_step);

    const SimulationArchive archive =
        run_expansion_ensembles(theta0, sim, config.N0, config.Ns, h, config.seed_root);
    const ExpansionArtifacts artifacts = build_expansion_artifacts(
        archive, config.covariance, config.gradient, config.lambda_C_relative);
    const LatentPrior prior =
        build_latent_prior(config.prior, models.T, theta0, config.latent_prior_draws,
                           config.lambda_S_relative, 0.0, config.seed_root);
    const SelfiPosterior post = selfi_posterior(artifacts, prior, phi_obs);

    manifest.remove_stage(kMisspecStage);
    manifest.remove_stage(sbi_stage(model));
    StageWriter w(dir, "model_" + model);
    w.matrix("theta0.bin", theta0);
    w.matrix("fd_steps.bin", h);
    w.matrix("ensemble_theta0.bin", archive.expansion);
    w.matrix("ensemble_directions.bin", archive.directions);
    w.matrix("f0.bin", artifacts.f0);
    w.matrix("C0.bin", artifacts.C0);
    w.matrix("grad_f0.bin", artifacts.grad_f0);
    w.matrix("prior_cov.bin", prior.covariance);
    w.matrix("gamma.bin", post.gamma);
    w.matrix("Gamma.bin", post.Gamma);
    w.text("bands.csv", bands_csv(config, prior, post, theta_gt));

    Eigen::Index inside = 0;
    for (Eigen::Index k = 0; k < theta_gt.size(); ++k) {
        inside += std::abs(theta_gt[k] - post.gamma[k]) <= 2.0 * std::sqrt(post.Gamma(k, k));
    }
    const double coverage = static_cast<double>(inside) / static_cast<double>(theta_gt.size());

    auto& rec = w.record();
    rec.complete = true;
    rec.simulations = sim.calls();
    rec.wall_seconds = clock.seconds();
    rec.info = {{"model", model},
                {"N0", config.N0},
                {"Ns", config.Ns},
                {"S", theta0.size()},
                {"P", artifacts.f0.size()},
                {"expected_simulations", config.N0 + config.Ns * static_cast<std::size_t>(theta0.size())},
                {"lambda_C", artifacts.lambda_C},
                {"shrinkage", artifacts.shrinkage},
                {"lambda_S", prior.lambda_S},
                {"ground_truth_coverage_2sigma", coverage}};
    manifest.set_stage(selfi_stage(model), rec);
    manifest.save(dir);

    std::ostringstream msg;
    msg << "SELFI (model " << model << "): " << sim.calls() << " simulations, "
        << fixed(100.0 * coverage, 1) << "% of ground-truth latent values inside the 2-sigma band";
    return msg.str();
}

std::string cmd_check_misspec(const PipelineConfig& config) {
    const Stopwatch clock;
    const fs::path dir = config.output_dir;
    RunManifest manifest = open_run(config);
    const ModelSet models = make_models(config);

    std::vector<std::string> done;
    for (const std::string m : {"A", "B"}) {
        if (manifest.stage_complete(selfi_stage(m))) done.push_back(m);
    }
    if (done.empty()) throw ArtifactError("no completed SELFI stage; run selfi first");

    StageWriter w(dir, "misspec");
    json per_model = json::object();
    std::ostringstream text;
    std::vector<double> reference;
    text << "Mahalanobis misspecification check\n"
         << "verdict rule: \"suspect\" when d_M(gamma) exceeds the "
         << fixed(100.0 * config.verdict_percentile, 1)
         << "th percentile of the prior-predictive reference distances\n\n";
    for (const auto& m : done) {
        const std::string stage = selfi_stage(m), sub = "model_" + m + "/";
        const Eigen::VectorXd gamma = manifest.read_matrix_verified(dir, stage, sub + "gamma.bin");
        const Eigen::VectorXd theta0 = manifest.read_matrix_verified(dir, stage, sub + "theta0.bin");
        const Eigen::MatrixXd prior_cov = manifest.read_matrix_verified(dir, stage, sub + "prior_cov.bin");
        const MisspecReport r = misspec_report(gamma, theta0, prior_cov, config.prior, models.T,
                                               config.n_ref, config.seed_root,
                                               config.verdict_percentile);
        reference = r.reference;
        per_model[m] = {{"d_M", r.d_posterior},
                        {"reference_mean", r.reference_mean},
                        {"reference_se", r.reference_se},
                        {"quantile", r.quantile},
                        {"threshold", r.threshold},
                        {"verdict", r.verdict}};
        text << "model " << m << ": d_M = " << fixed(r.d_posterior) << ", quantile in reference = "
             << fixed(r.quantile, 3) << ", verdict: " << r.verdict << '\n';
    }
    const auto& first = per_model[done.front()];
    text << "reference ensemble (n = " << config.n_ref << "): mean = "
         << fixed(first["reference_mean"].get<double>()) << " +/- "
         << fixed(first["reference_se"].get<double>()) << ", percentile threshold = "
         << fixed(first["threshold"].get<double>()) << '\n';

    std::ostringstream csv;
    csv << "index,d_M\n";
    for (std::size_t n = 0; n < reference.size(); ++n) csv << n << ',' << num(reference[n]) << '\n';
    w.text("reference_distances.csv", csv.str());
    w.text("report.txt", text.str());
    w.text("summary.json", per_model.dump(2) + "\n");

    auto& rec = w.record();
    rec.complete = true;
    rec.simulations = 0;
    rec.wall_seconds = clock.seconds();
    rec.info = {{"models", per_model},
                {"n_ref", config.n_ref},
                {"verdict_percentile", config.verdict_percentile}};
    manifest.set_stage(kMisspecStage, rec);
    manifest.save(dir);
    return text.str();
}

std::string cmd_compress_and_sbi(const PipelineConfig& config, const std::string& model) {
    check_model_name(model);
    const Stopwatch clock;
    const fs::path dir = config.output_dir;
    RunManifest manifest = open_run(config);
    const std::string stage = selfi_stage(model), sub = "model_" + model + "/";
    if (!manifest.stage_complete(stage)) {
        throw ArtifactError("no completed SELFI stage for model " + model + "; run selfi first");
    }
    const ModelSet models = make_models(config);
    const CountingSimulator sim(models.observer(model));

    ExpansionArtifacts expansion;
    expansion.theta0 = manifest.read_matrix_verified(dir, stage, sub + "theta0.bin");
    expansion.steps = manifest.read_matrix_verified(dir, stage, sub + "fd_steps.bin");
    expansion.f0 = manifest.read_matrix_verified(dir, stage, sub + "f0.bin");
    expansion.C0 = manifest.read_matrix_verified(dir, stage, sub + "C0.bin");
    expansion.grad_f0 = manifest.read_matrix_verified(dir, stage, sub + "grad_f0.bin");
    expansion.layout = sim.layout();
    const Eigen::VectorXd phi_obs = manifest.read_matrix_verified(dir, kMockStage, "mock/phi_obs.bin");

    const Eigen::VectorXd omega0 = config.prior.mean;
    const CompressionArtifacts comp = build_compression_artifacts(
        expansion, models.T, omega0,
        default_stencil_steps(omega0, config.stencil_relative_step, config.stencil_floor));
    const std::uint64_t calls_for_artifacts = sim.calls();
    const Eigen::VectorXd omega_tilde_obs = compress(phi_obs, comp);

    manifest.remove_stage(sbi_stage(model));
    StageWriter w(dir, "sbi_" + model);
    w.matrix("grad_T0.bin", comp.grad_T0);
    w.matrix("grad_f_omega.bin", comp.grad_f_omega);
    w.matrix("fisher.bin", comp.fisher);
    w.matrix("fisher_inverse.bin", comp.fisher_inverse);
    w.matrix("omega_tilde_obs.bin", omega_tilde_obs);

    AbcSettings settings = config.abc;
    settings.seed_root = config.seed_root;
    const SummaryChain chain = make_summary_chain(models.T, sim, comp);
    AbcResult result;
    bool exhausted = false;
    std::string exhausted_msg;
    try {
        result = rejection_sample(config.prior, chain, omega_tilde_obs, comp.fisher, settings);
    } catch (const BudgetExhausted& e) {
        result = e.partial();
        exhausted = true;
        exhausted_msg = e.what();
    }
    w.text("abc_samples.csv", samples_csv(result));

    auto& rec = w.record();
    rec.info = {{"model", model},
                {"simulator_calls_building_artifacts", calls_for_artifacts},
                {"omega_tilde_obs", to_std(omega_tilde_obs)},
                {"epsilon", config.abc.epsilon},
                {"n_draws", result.n_draws()},
                {"n_evaluated", result.n_evaluated},
                {"n_accepted", result.n_accepted},
                {"n_failed", result.n_failed},
                {"acceptance_rate", result.acceptance_rate()},
                {"budget_exhausted", exhausted}};
    if (std::isinf(config.abc.epsilon)) rec.info["epsilon"] = "inf";
    const Eigen::MatrixXd accepted = result.accepted_samples();
    std::optional<PosteriorSummary> summary;
    if (accepted.rows() >= 2) {
        summary = posterior_summaries(accepted);
        w.text("posterior_summary.csv", summary_csv(*summary, config));
        w.matrix("posterior_covariance.bin", summary->covariance);
        w.text("corner_histograms.json",
               histograms_json(corner_histograms(accepted, config.histogram_bins)).dump() + "\n");
        rec.info["posterior"] = summary_info(*summary, config);
    }
    rec.complete = !exhausted;
    rec.simulations = sim.calls();
    rec.wall_seconds = clock.seconds();
    manifest.set_stage(sbi_stage(model), rec);
    manifest.save(dir);
    if (exhausted) throw BudgetExhausted(exhausted_msg + " (partial samples written)", result);

    std::ostringstream msg;
    msg << "compressed observation: (";
    for (int j = 0; j < 4; ++j) msg << (j ? ", " : "") << fixed(omega_tilde_obs[j]);
    msg << ")\nABC: " << result.n_accepted << " accepted of " << result.n_draws() << " draws ("
        << fixed(100.0 * result.acceptance_rate(), 2) << "%)";
    if (summary) {
        for (int j = 0; j < 4; ++j) {
            const auto& iv = summary->intervals[static_cast<std::size_t>(j)][1];
            msg << "\n  " << kParamNames[j] << ": " << fixed(summary->mean[j]) << " +/- "
                << fixed(std::sqrt(summary->covariance(j, j))) << "  2-sigma [" << fixed(iv.lo)
                << ", " << fixed(iv.hi) << "]";
        }
    }
    return msg.str();
}

std::string cmd_report(const fs::path& out_dir) {
    std::ostringstream out;
    out << "# Run report: " << out_dir.string() << "\n\n";
    if (!RunManifest::exists(out_dir)) {
        out << "no stages complete\n";
        return out.str();
    }
    const RunManifest m = RunManifest::load(out_dir);
    bool any = false;
    for (const auto& [name, rec] : m.stages()) any = any || rec.complete;
    if (!any) {
        out << "no stages complete\n";
        return out.str();
    }

    std::uint64_t total = 0;
    for (const auto& [name, rec] : m.stages()) total += rec.simulations;
    const auto& cfg = m.config();
    out << "seed_root: " << cfg.value("seed_root", json()).dump() << ", model: "
        << cfg.value("model", json()).dump() << "\n";
    out << "stochastic simulations across all stages: " << total << "\n";

    auto status = [&](const std::string& stage) {
        std::ostringstream s;
        if (!m.has_stage(stage)) return std::string("not run\n");
        const auto& rec = m.stage(stage);
        const auto bad = m.verify_stage(out_dir, stage);
        s << (rec.complete ? "complete" : "INCOMPLETE") << ", " << rec.simulations
          << " simulations, " << fixed(rec.wall_seconds, 2) << " s, " << rec.files.size() << " files";
        if (bad.empty()) {
            s << ", checksums OK\n";
        } else {
            s << ", CHECKSUM MISMATCH:";
            for (const auto& b : bad) s << ' ' << b;
            s << '\n';
        }
        return s.str();
    };

    out << "\n## Mock data\n" << status(kMockStage);
    if (m.has_stage(kMockStage)) {
        const auto& info = m.stage(kMockStage).info;
        out << "P = " << info.value("P", 0) << ", S = " << info.value("S", 0)
            << ", omega_gt = " << info.value("omega_gt", json()).dump() << '\n';
    }

    out << "\n## SELFI\n";
    for (const std::string model : {"A", "B"}) {
        out << "model " << model << ": " << status(selfi_stage(model));
        if (!m.has_stage(selfi_stage(model))) continue;
        const auto& info = m.stage(selfi_stage(model)).info;
        out << "  N0 = " << info.value("N0", 0) << ", Ns = " << info.value("Ns", 0)
            << ", expected simulations = " << info.value("expected_simulations", 0)
            << ", lambda_C = " << info.value("lambda_C", 0.0)
            << ", shrinkage = " << fixed(info.value("shrinkage", 0.0))
            << ", ground truth inside 2-sigma band: "
            << fixed(100.0 * info.value("ground_truth_coverage_2sigma", 0.0), 1) << "%\n";
    }

    out << "\n## Misspecification check\n" << status(kMisspecStage);
    if (m.has_stage(kMisspecStage)) {
        const auto& info = m.stage(kMisspecStage).info;
        const json models = info.value("models", json::object());
        for (const auto& [model, r] : models.items()) {
            out << "model " << model << ": d_M = " << fixed(r.value("d_M", 0.0))
                << " (reference mean " << fixed(r.value("reference_mean", 0.0)) << " +/- "
                << fixed(r.value("reference_se", 0.0)) << ", threshold "
                << fixed(r.value("threshold", 0.0)) << ", quantile "
                << fixed(r.value("quantile", 0.0), 3) << "): " << r.value("verdict", std::string()) << '\n';
        }
    }

    out << "\n## Score compression\n";
    for (const std::string model : {"A", "B"}) {
        if (!m.has_stage(sbi_stage(model))) continue;
        const auto& info = m.stage(sbi_stage(model)).info;
        out << "model " << model << ": omega_tilde_obs = " << info.value("omega_tilde_obs", json()).dump()
            << ", simulator calls while building artifacts: "
            << info.value("simulator_calls_building_artifacts", 0) << '\n';
    }
    if (!m.has_stage(sbi_stage("A")) && !m.has_stage(sbi_stage("B"))) out << "not run\n";

    out << "\n## Rejection ABC\n";
    bool abc_any = false;
    for (const std::string model : {"A", "B"}) {
        if (!m.has_stage(sbi_stage(model))) continue;
        abc_any = true;
        const auto& info = m.stage(sbi_stage(model)).info;
        out << "model " << model << ": " << status(sbi_stage(model));
        out << "  epsilon = " << info.value("epsilon", json()).dump() << ", accepted "
            << info.value("n_accepted", 0) << " of " << info.value("n_draws", 0) << " draws, "
            << info.value("n_evaluated", 0) << " simulated (surplus of the last parallel batch discarded)"
            << (info.value("budget_exhausted", false) ? " (BUDGET EXHAUSTED)" : "") << '\n';
        if (!info.contains("posterior")) continue;
        const auto& post = info["posterior"];
        out << "  | parameter | mean | sd | 2-sigma interval | ground truth | inside |\n"
            << "  |---|---|---|---|---|---|\n";
        for (const char* p : kParamNames) {
            const auto& q = post["parameters"][p];
            out << "  | " << p << " | " << fixed(q["mean"].get<double>()) << " | "
                << fixed(q["sd"].get<double>()) << " | [" << fixed(q["lo_2sigma"].get<double>())
                << ", " << fixed(q["hi_2sigma"].get<double>()) << "] | "
                << fixed(q["ground_truth"].get<double>()) << " | "
                << (q["ground_truth_in_2sigma"].get<bool>() ? "yes" : "no") << " |\n";
        }
        out << "  alpha-gamma correlation: " << fixed(post["corr_alpha_gamma"].get<double>(), 3) << '\n';
    }
    if (!abc_any) out << "not run\n";
    return out.str();
}

}  // namespace selfisbi
