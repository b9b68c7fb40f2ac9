#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace selfisbi {

struct StageRecord {
    bool complete = false;
    std::map<std::string, std::string> files;  // path relative to the run directory -> SHA-256
    std::uint64_t simulations = 0;
    double wall_seconds = 0.0;
    nlohmann::json info = nlohmann::json::object();
};

/// Bookkeeping for one run directory: the config snapshot, and per stage the
/// checksums of everything it wrote. Saved as manifest.json with write-then-rename.
class RunManifest {
public:
    static constexpr const char* kFileName = "manifest.json";

    RunManifest() = default;
    explicit RunManifest(nlohmann::json config) : config_(std::move(config)) {}

    /// Returns an empty manifest when the directory has none; throws ArtifactError if
    /// the file exists but cannot be parsed.
    static RunManifest load(const std::filesystem::path& dir);
    static bool exists(const std::filesystem::path& dir);
    void save(const std::filesystem::path& dir) const;

    const nlohmann::json& config() const { return config_; }
    bool has_stage(const std::string& name) const;
    bool stage_complete(const std::string& name) const;
    const StageRecord& stage(const std::string& name) const;
    void set_stage(const std::string& name, StageRecord record);
    void remove_stage(const std::string& name);
    const std::map<std::string, StageRecord>& stages() const { return stages_; }

    /// Reads a file recorded by a stage after verifying its checksum; throws
    /// ArtifactError if the stage is incomplete, the file is not recorded, missing,
    /// or altered.
    std::string read_verified(const std::filesystem::path& dir, const std::string& stage,
                              const std::string& relpath) const;
    Eigen::MatrixXd read_matrix_verified(const std::filesystem::path& dir,
                                         const std::string& stage,
                                         const std::string& relpath) const;

    /// Relative paths whose checksum no longer matches (or which are missing).
    std::vector<std::string> verify_stage(const std::filesystem::path& dir,
                                          const std::string& stage) const;

    nlohmann::json to_json() const;

private:
    nlohmann::json config_ = nlohmann::json::object();
    std::map<std::string, StageRecord> stages_;
};

}  // namespace selfisbi
