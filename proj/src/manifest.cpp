#include "selfisbi/manifest.hpp"

#include "selfisbi/errors.hpp"
#include "selfisbi/matrix_io.hpp"

namespace selfisbi {

using nlohmann::json;

bool RunManifest::exists(const std::filesystem::path& dir) {
    return std::filesystem::exists(dir / kFileName);
}

RunManifest RunManifest::load(const std::filesystem::path& dir) {
    RunManifest m;
    if (!exists(dir)) return m;
    try {
        const json j = json::parse(read_file(dir / kFileName));
        m.config_ = j.at("config");
        for (const auto& [name, s] : j.at("stages").items()) {
            StageRecord r;
            r.complete = s.at("complete").get<bool>();
            r.files = s.at("files").get<std::map<std::string, std::string>>();
            r.simulations = s.at("simulations").get<std::uint64_t>();
            r.wall_seconds = s.at("wall_seconds").get<double>();
            r.info = s.value("info", json::object());
            m.stages_[name] = std::move(r);
        }
    } catch (const json::exception& e) {
        throw ArtifactError("manifest in " + dir.string() + " is malformed: " + e.what());
    }
    return m;
}

json RunManifest::to_json() const {
    json stages = json::object();
    for (const auto& [name, r] : stages_) {
        stages[name] = {{"complete", r.complete},
                        {"files", r.files},
                        {"simulations", r.simulations},
                        {"wall_seconds", r.wall_seconds},
                        {"info", r.info}};
    }
    return {{"format", 1}, {"config", config_}, {"stages", stages}};
}

void RunManifest::save(const std::filesystem::path& dir) const {
    write_file_atomic(dir / kFileName, to_json().dump(2) + "\n");
}

bool RunManifest::has_stage(const std::string& name) const { return stages_.count(name) > 0; }

bool RunManifest::stage_complete(const std::string& name) const {
    const auto it = stages_.find(name);
    return it != stages_.end() && it->second.complete;
}

const StageRecord& RunManifest::stage(const std::string& name) const {
    const auto it = stages_.find(name);
    if (it == stages_.end()) throw ArtifactError("stage " + name + " has not been run");
    return it->second;
}

void RunManifest::set_stage(const std::string& name, StageRecord record) {
    stages_[name] = std::move(record);
}

void RunManifest::remove_stage(const std::string& name) { stages_.erase(name); }

std::string RunManifest::read_verified(const std::filesystem::path& dir, const std::string& stage_name,
                                       const std::string& relpath) const {
    const StageRecord& r = stage(stage_name);
    if (!r.complete) throw ArtifactError("stage " + stage_name + " did not complete");
    const auto it = r.files.find(relpath);
    if (it == r.files.end()) {
        throw ArtifactError("stage " + stage_name + " did not record " + relpath);
    }
    if (!std::filesystem::exists(dir / relpath)) {
        throw ArtifactError("missing artifact " + (dir / relpath).string());
    }
    std::string bytes = read_file(dir / relpath);
    if (sha256_hex(bytes) != it->second) {
        throw ArtifactError("checksum mismatch for " + (dir / relpath).string());
    }
    return bytes;
}

Eigen::MatrixXd RunManifest::read_matrix_verified(const std::filesystem::path& dir,
                                                  const std::string& stage_name,
                                                  const std::string& relpath) const {
    return decode_matrix(read_verified(dir, stage_name, relpath), relpath);
}

std::vector<std::string> RunManifest::verify_stage(const std::filesystem::path& dir,
                                                   const std::string& stage_name) const {
    std::vector<std::string> bad;
    for (const auto& [rel, sum] : stage(stage_name).files) {
        const auto p = dir / rel;
        if (!std::filesystem::exists(p) || sha256_file(p) != sum) bad.push_back(rel);
    }
    return bad;
}

}  // namespace selfisbi
