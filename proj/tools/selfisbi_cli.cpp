// Command-line front end for the two-step inference pipeline.
//
//   selfisbi generate-mock | selfi | check-misspec | compress-sbi | report | show-config
//
// Exit codes: 0 success, 1 other error, 2 config error, 3 ensemble failure,
// 4 ABC budget exhausted, 5 artifact/checksum error.

#include "selfisbi/abc.hpp"
#include "selfisbi/config.hpp"
#include "selfisbi/errors.hpp"
#include "selfisbi/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> model;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON config file (defaults used when omitted)");
    cmd->add_option("--seed", o.seed, "root seed (overrides seed_root)");
    cmd->add_option("--out", o.out, "run directory (overrides output_dir)");
    cmd->add_option("--model", o.model, "observer model")->check(CLI::IsMember({"A", "B"}));
    cmd->add_option("--threads", o.threads, "worker threads (0: OpenMP default)")
        ->check(CLI::NonNegativeNumber);
}

selfisbi::PipelineConfig resolve(const CommonOptions& o) {
    auto cfg = o.config_path.empty() ? selfisbi::PipelineConfig{}
                                     : selfisbi::PipelineConfig::load(o.config_path);
    if (o.seed) {
        cfg.seed_root = *o.seed;
        cfg.abc.seed_root = *o.seed;
    }
    if (o.out) cfg.output_dir = *o.out;
    if (o.threads) cfg.threads = *o.threads;
    cfg.validate();
    selfisbi::set_worker_threads(cfg.threads);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SELFI latent inference, misspecification check and Fisher-Rao rejection ABC"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* mock = app.add_subcommand("generate-mock", "simulate mock data from model A at the ground truth");
    auto* selfi = app.add_subcommand("selfi", "run expansion ensembles and the SELFI posterior");
    auto* misspec = app.add_subcommand("check-misspec", "Mahalanobis misspecification check");
    auto* sbi = app.add_subcommand("compress-sbi", "score compression and rejection ABC");
    auto* report = app.add_subcommand("report", "print a consolidated run report");
    auto* show = app.add_subcommand("show-config", "print the effective config as JSON");
    for (auto* cmd : {mock, selfi, misspec, sbi, report, show}) add_common(cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto cfg = resolve(opts);
        const std::string model = opts.model.value_or(cfg.default_observer());
        if (*mock) {
            std::cout << selfisbi::cmd_generate_mock(cfg) << '\n';
        } else if (*selfi) {
            std::cout << selfisbi::cmd_selfi(cfg, model) << '\n';
        } else if (*misspec) {
            std::cout << selfisbi::cmd_check_misspec(cfg);
        } else if (*sbi) {
            std::cout << selfisbi::cmd_compress_and_sbi(cfg, model) << '\n';
        } else if (*report) {
            std::cout << selfisbi::cmd_report(cfg.output_dir);
        } else if (*show) {
            std::cout << cfg.to_json().dump(2) << '\n';
        }
        return 0;
    } catch (const selfisbi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const selfisbi::EnsembleFailure& e) {
        std::cerr << "ensemble failure: " << e.what() << '\n';
        return 3;
    } catch (const selfisbi::BudgetExhausted& e) {
        std::cerr << "warning: " << e.what() << '\n';
        return 4;
    } catch (const selfisbi::ArtifactError& e) {
        std::cerr << "artifact error: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
