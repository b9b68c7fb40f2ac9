#include "selfisbi/errors.hpp"
#include "selfisbi/manifest.hpp"
#include "selfisbi/matrix_io.hpp"
#include "selfisbi/pipeline.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sys/wait.h>

using namespace selfisbi;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(const std::string& name) {
    PipelineConfig c;
    c.output_dir = (fs::temp_directory_path() / ("selfisbi_test_pipeline_" + name)).string();
    fs::remove_all(c.output_dir);
    c.N0 = 60;
    c.Ns = 30;
    c.latent_prior_draws = 100;
    c.n_ref = 100;
    c.abc.n_accept_target = 100;
    c.abc.epsilon = 3.0;
    c.histogram_bins = 8;
    return c;
}

void run_all(const PipelineConfig& c) {
    cmd_generate_mock(c);
    cmd_selfi(c, "A");
    cmd_selfi(c, "B");
    cmd_check_misspec(c);
    cmd_compress_and_sbi(c, "A");
}

/// Every regular file below `dir` (except the manifest, which records timings) -> SHA-256.
std::map<std::string, std::string> tree_digest(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().filename() == RunManifest::kFileName) continue;
        out[fs::relative(e.path(), dir).string()] = sha256_file(e.path());
    }
    return out;
}

int exit_code(const std::string& args) {
    const std::string cmd = std::string(SELFISBI_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("report on an empty directory") {
    const auto c = small_config("empty");
    fs::create_directories(c.output_dir);
    CHECK(cmd_report(c.output_dir).find("no stages complete") != std::string::npos);
    CHECK(fs::is_empty(c.output_dir));
}

TEST_CASE("stages need their inputs") {
    const auto c = small_config("order");
    CHECK_THROWS_AS(cmd_selfi(c, "A"), ArtifactError);
    cmd_generate_mock(c);
    CHECK_THROWS_AS(cmd_compress_and_sbi(c, "A"), ArtifactError);
    CHECK_THROWS_AS(cmd_check_misspec(c), ArtifactError);
    CHECK_THROWS_AS(cmd_selfi(c, "C"), ConfigError);

    auto other = c;
    other.seed_root += 1;
    CHECK_THROWS_AS(cmd_selfi(other, "A"), ConfigError);
    auto moved_threads = c;
    moved_threads.threads = 3;
    CHECK_NOTHROW(cmd_selfi(moved_threads, "A"));
}

TEST_CASE("full run: outputs, manifest and report") {
    const auto c = small_config("full");
    run_all(c);
    const fs::path dir = c.output_dir;
    for (const char* f : {"mock/phi_obs.bin", "model_A/gamma.bin", "model_A/Gamma.bin", "model_B/C0.bin",
                          "model_A/bands.csv", "misspec/report.txt", "misspec/summary.json",
                          "sbi_A/fisher.bin", "sbi_A/abc_samples.csv", "sbi_A/posterior_summary.csv",
                          "sbi_A/corner_histograms.json"}) {
        CHECK_MESSAGE(fs::exists(dir / f), f);
    }
    const auto m = RunManifest::load(dir);
    for (const auto& stage : {"generate_mock", "selfi_A", "selfi_B", "check_misspec", "compress_sbi_A"}) {
        CHECK(m.stage_complete(stage));
        CHECK(m.verify_stage(dir, stage).empty());
    }
    CHECK(m.stage("selfi_A").simulations == c.N0 + c.Ns * 100);
    CHECK(m.stage("compress_sbi_A").info["simulator_calls_building_artifacts"] == 0);

    const Eigen::MatrixXd Gamma = read_matrix(dir / "model_A/Gamma.bin");
    CHECK(Gamma.rows() == 100);
    CHECK(Gamma.isApprox(Gamma.transpose()));

    const auto before = tree_digest(dir);
    const std::string report = cmd_report(c.output_dir);
    for (const char* section : {"## Mock data", "## SELFI", "## Misspecification check",
                                "## Score compression", "## Rejection ABC"}) {
        CHECK_MESSAGE(report.find(section) != std::string::npos, section);
    }
    CHECK(tree_digest(dir) == before);  // report never writes

    // A tampered artifact is detected by the next reader.
    {
        std::ofstream tamper(dir / "model_A/C0.bin", std::ios::app | std::ios::binary);
        tamper << '!';
    }
    CHECK_THROWS_AS(cmd_compress_and_sbi(c, "A"), ArtifactError);
    CHECK(cmd_report(c.output_dir).find("MISMATCH") != std::string::npos);
}

TEST_CASE("reruns are bit-for-bit reproducible") {
    auto a = small_config("rerun_a");
    auto b = small_config("rerun_b");
    b.threads = 1;
    run_all(a);
    set_worker_threads(1);
    run_all(b);
    set_worker_threads(4);
    CHECK(tree_digest(a.output_dir) == tree_digest(b.output_dir));
}

TEST_CASE("synthetic linear hierarchy runs end to end") {
    auto c = small_config("synthetic");
    c.model = "synthetic-linear";
    c.abc.epsilon = 4.0;
    run_all(c);
    const auto m = RunManifest::load(c.output_dir);
    CHECK(m.stage_complete("compress_sbi_A"));
    CHECK(m.stage("selfi_A").simulations == c.N0 + c.Ns * 20);
}

TEST_CASE("budget exhaustion leaves an incomplete stage with partial samples") {
    auto c = small_config("budget");
    c.abc.epsilon = 1e-9;
    c.abc.n_accept_target = 5;
    c.abc.max_draws = 500;
    cmd_generate_mock(c);
    cmd_selfi(c, "A");
    CHECK_THROWS_AS(cmd_compress_and_sbi(c, "A"), BudgetExhausted);
    const auto m = RunManifest::load(c.output_dir);
    REQUIRE(m.has_stage("compress_sbi_A"));
    CHECK_FALSE(m.stage_complete("compress_sbi_A"));
    CHECK(fs::exists(fs::path(c.output_dir) / "sbi_A/abc_samples.csv"));
}

TEST_CASE("command-line exit codes") {
    const auto c = small_config("cli");
    const std::string out = " --out " + c.output_dir;
    CHECK(exit_code("--help") == 0);
    CHECK(exit_code("frobnicate") == 2);
    CHECK(exit_code("selfi" + out) == 5);  // no mock data yet
    CHECK(exit_code("generate-mock --config /nonexistent.json" + out) == 2);
    CHECK(exit_code("generate-mock" + out) == 0);
    CHECK(exit_code("report" + out) == 0);
    CHECK(exit_code("show-config --seed 3") == 0);
}
