#include "selfisbi/config.hpp"

#include "selfisbi/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <vector>

namespace selfisbi {

using nlohmann::json;

namespace {

/// Reads the keys of one JSON object, remembering which were consumed so that typos
/// are reported instead of silently ignored.
class Section {
public:
    Section(const json& parent, const std::string& name, std::string path)
        : path_(std::move(path)) {
        if (!parent.contains(name)) return;
        obj_ = &parent.at(name);
        if (!obj_->is_object()) throw ConfigError(path_ + " must be an object");
    }
    explicit Section(const json& root) : obj_(&root), path_("config") {
        if (!root.is_object()) throw ConfigError("config must be a JSON object");
    }

    bool has(const std::string& key) const { return obj_ && obj_->contains(key); }
    const json& raw(const std::string& key) {
        seen_.insert(key);
        return obj_->at(key);
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = raw(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path_ + "." + key + " has the wrong type");
        }
    }

    void get_vec4(const std::string& key, ParamVector& out) {
        if (!has(key)) return;
        std::vector<double> v;
        get(key, v);
        if (v.size() != 4) throw ConfigError(path_ + "." + key + " must have 4 entries");
        out = ParamVector(v[0], v[1], v[2], v[3]);
    }

    void finish() const {
        if (!obj_) return;
        for (const auto& item : obj_->items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError("unknown key " + path_ + "." + item.key());
            }
        }
    }

    const std::string& path() const { return path_; }

private:
    const json* obj_ = nullptr;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename T>
void get_pair(Section& s, const std::string& key, std::vector<T>& x, std::vector<T>& y) {
    if (!s.has(key)) return;
    const json& v = s.raw(key);
    if (v.is_string() && v.get<std::string>() == "default") return;  // already defaulted
    if (!v.is_object()) {
        throw ConfigError(s.path() + "." + key +
                          " must be \"default\" or {\"x\": [...], \"y\": [...]}");
    }
    const json wrapper = {{key, v}};
    Section sub(wrapper, key, s.path() + "." + key);
    sub.get("x", x);
    sub.get("y", y);
    sub.finish();
}

const char* to_string(CovarianceEstimator e) {
    return e == CovarianceEstimator::kLedoitWolf ? "ledoit-wolf" : "jitter";
}
const char* to_string(GradientEstimator e) {
    return e == GradientEstimator::kPaired ? "paired" : "unpaired";
}

json epsilon_to_json(double eps) {
    return std::isinf(eps) ? json("inf") : json(eps);
}

}  // namespace

void PipelineConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (model != "A" && model != "B" && model != "synthetic-linear") {
        fail("model must be \"A\", \"B\" or \"synthetic-linear\"");
    }
    if (threads < 0) fail("threads must be >= 0");
    if (solver.n_steps < 1) fail("solver.n_steps must be >= 1");
    if (!(solver.dt > 0.0)) fail("solver.dt must be positive");
    if (!(solver.x0 >= 0.0) || !(solver.y0 >= 0.0)) fail("solver initial populations must be >= 0");
    observer.validate(solver.n_steps);
    if (observer.x0 != solver.x0 || observer.y0 != solver.y0) {
        fail("observer initial signal must equal the solver's initial populations");
    }
    try {
        prior.validate();
        validate_params(omega_gt);
    } catch (const Error& e) {
        fail(e.what());
    }
    if (N0 < 2 || Ns < 2) fail("selfi.N0 and selfi.Ns must be >= 2");
    if (Ns > N0) fail("selfi.Ns must not exceed selfi.N0 (paired differences)");
    if (!(fd_relative_step > 0.0)) fail("selfi.fd_relative_step must be positive");
    if (!(lambda_C_relative > 0.0)) fail("selfi.lambda_C_relative must be positive");
    if (!(lambda_S_relative > 0.0)) fail("selfi.lambda_S_relative must be positive");
    if (latent_prior_draws < 2) fail("selfi.latent_prior_draws must be >= 2");
    if (n_ref < 100) fail("misspec.n_ref must be >= 100");
    if (!(verdict_percentile > 0.0 && verdict_percentile < 1.0)) {
        fail("misspec.verdict_percentile must lie in (0, 1)");
    }
    if (!(stencil_relative_step > 0.0) || !(stencil_floor > 0.0)) {
        fail("compression stencil steps must be positive");
    }
    if (!(abc.epsilon > 0.0)) fail("abc.epsilon must be positive");
    if (abc.n_accept_target < 1 || abc.max_draws < abc.n_accept_target) {
        fail("abc.n_accept_target must be >= 1 and <= abc.max_draws");
    }
    if (abc.batch_size < 1) fail("abc.batch_size must be >= 1");
    if (histogram_bins < 1) fail("abc.histogram_bins must be >= 1");
    if (synthetic.latent_size < 4) fail("synthetic.latent_size must be >= 4");
    if (!(synthetic.noise_sd > 0.0)) fail("synthetic.noise_sd must be positive");
}

json PipelineConfig::to_json() const {
    json j;
    j["model"] = model;
    j["seed_root"] = seed_root;
    j["output_dir"] = output_dir;
    j["threads"] = threads;
    j["solver"] = {{"x0", solver.x0}, {"y0", solver.y0}, {"dt", solver.dt},
                   {"n_steps", solver.n_steps}};
    j["observer"] = {
        {"p", observer.p},
        {"q", observer.q},
        {"r", observer.r},
        {"s_noise", observer.s_noise},
        {"t_noise", observer.t_noise},
        {"threshold_x", observer.threshold_x},
        {"threshold_y", observer.threshold_y},
        {"r_model_b", observer.r_model_b},
        {"efficiency", {{"x", observer.efficiency_x}, {"y", observer.efficiency_y}}},
        {"masks", {{"x", observer.mask_x}, {"y", observer.mask_y}}},
    };
    auto vec = [](const ParamVector& v) { return std::vector<double>(v.data(), v.data() + 4); };
    j["prior"] = {{"mean", vec(prior.mean)}, {"sd", vec(prior.sd)}};
    j["ground_truth"] = vec(omega_gt);
    j["selfi"] = {{"N0", N0},
                  {"Ns", Ns},
                  {"fd_relative_step", fd_relative_step},
                  {"covariance", to_string(covariance)},
                  {"lambda_C_relative", lambda_C_relative},
                  {"gradient", to_string(gradient)},
                  {"latent_prior_draws", latent_prior_draws},
                  {"lambda_S_relative", lambda_S_relative}};
    j["misspec"] = {{"n_ref", n_ref}, {"verdict_percentile", verdict_percentile}};
    j["compression"] = {{"stencil_relative_step", stencil_relative_step},
                        {"stencil_floor", stencil_floor}};
    j["abc"] = {{"epsilon", epsilon_to_json(abc.epsilon)},
                {"n_accept_target", abc.n_accept_target},
                {"max_draws", abc.max_draws},
                {"batch_size", abc.batch_size},
                {"histogram_bins", histogram_bins}};
    j["synthetic"] = {{"latent_size", synthetic.latent_size},
                      {"noise_sd", synthetic.noise_sd},
                      {"model_b_bias", synthetic.model_b_bias}};
    return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    Section root(j);
    root.get("model", c.model);
    root.get("seed_root", c.seed_root);
    root.get("output_dir", c.output_dir);
    root.get("threads", c.threads);

    Section solver(j, "solver", "solver");
    if (root.has("solver")) root.raw("solver");
    solver.get("x0", c.solver.x0);
    solver.get("y0", c.solver.y0);
    solver.get("dt", c.solver.dt);
    solver.get("n_steps", c.solver.n_steps);
    solver.finish();

    const ObserverConfig defaults = ObserverConfig::defaults(c.solver.n_steps);
    c.observer = defaults;
    c.observer.x0 = c.solver.x0;
    c.observer.y0 = c.solver.y0;
    Section obs(j, "observer", "observer");
    if (root.has("observer")) root.raw("observer");
    obs.get("p", c.observer.p);
    obs.get("q", c.observer.q);
    obs.get("r", c.observer.r);
    obs.get("s_noise", c.observer.s_noise);
    obs.get("t_noise", c.observer.t_noise);
    obs.get("threshold_x", c.observer.threshold_x);
    obs.get("threshold_y", c.observer.threshold_y);
    obs.get("r_model_b", c.observer.r_model_b);
    get_pair(obs, "efficiency", c.observer.efficiency_x, c.observer.efficiency_y);
    get_pair(obs, "masks", c.observer.mask_x, c.observer.mask_y);
    obs.finish();

    Section prior(j, "prior", "prior");
    if (root.has("prior")) root.raw("prior");
    prior.get_vec4("mean", c.prior.mean);
    prior.get_vec4("sd", c.prior.sd);
    prior.finish();
    root.get_vec4("ground_truth", c.omega_gt);

    Section selfi(j, "selfi", "selfi");
    if (root.has("selfi")) root.raw("selfi");
    selfi.get("N0", c.N0);
    selfi.get("Ns", c.Ns);
    selfi.get("fd_relative_step", c.fd_relative_step);
    if (selfi.has("covariance")) {
        std::string v;
        selfi.get("covariance", v);
        if (v == "ledoit-wolf") c.covariance = CovarianceEstimator::kLedoitWolf;
        else if (v == "jitter") c.covariance = CovarianceEstimator::kJitter;
        else throw ConfigError("selfi.covariance must be \"ledoit-wolf\" or \"jitter\"");
    }
    selfi.get("lambda_C_relative", c.lambda_C_relative);
    if (selfi.has("gradient")) {
        std::string v;
        selfi.get("gradient", v);
        if (v == "paired") c.gradient = GradientEstimator::kPaired;
        else if (v == "unpaired") c.gradient = GradientEstimator::kUnpaired;
        else throw ConfigError("selfi.gradient must be \"paired\" or \"unpaired\"");
    }
    selfi.get("latent_prior_draws", c.latent_prior_draws);
    selfi.get("lambda_S_relative", c.lambda_S_relative);
    selfi.finish();

    Section mis(j, "misspec", "misspec");
    if (root.has("misspec")) root.raw("misspec");
    mis.get("n_ref", c.n_ref);
    mis.get("verdict_percentile", c.verdict_percentile);
    mis.finish();

    Section comp(j, "compression", "compression");
    if (root.has("compression")) root.raw("compression");
    comp.get("stencil_relative_step", c.stencil_relative_step);
    comp.get("stencil_floor", c.stencil_floor);
    comp.finish();

    Section abc(j, "abc", "abc");
    if (root.has("abc")) root.raw("abc");
    if (abc.has("epsilon")) {
        const json& e = abc.raw("epsilon");
        if (e.is_string() && (e == "inf" || e == "infinity")) {
            c.abc.epsilon = std::numeric_limits<double>::infinity();
        } else if (e.is_number()) {
            c.abc.epsilon = e.get<double>();
        } else {
            throw ConfigError("abc.epsilon must be a number or \"inf\"");
        }
    }
    abc.get("n_accept_target", c.abc.n_accept_target);
    abc.get("max_draws", c.abc.max_draws);
    abc.get("batch_size", c.abc.batch_size);
    abc.get("histogram_bins", c.histogram_bins);
    abc.finish();

    Section syn(j, "synthetic", "synthetic");
    if (root.has("synthetic")) root.raw("synthetic");
    syn.get("latent_size", c.synthetic.latent_size);
    syn.get("noise_sd", c.synthetic.noise_sd);
    syn.get("model_b_bias", c.synthetic.model_b_bias);
    syn.finish();

    root.finish();
    c.abc.seed_root = c.seed_root;
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

json result_relevant(const json& config) {
    json j = config;
    j.erase("output_dir");
    j.erase("threads");
    return j;
}

}  // namespace selfisbi
