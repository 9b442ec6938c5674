#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace suitegauge {

// Hex SHA-256 of a file's bytes. Throws IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);

// Output directory owned by one command for its lifetime. Holds a lock file
// that makes a second concurrent writer fail, and records every file written
// so the manifest can list it.
class OutputDirectory {
public:
    explicit OutputDirectory(std::filesystem::path root);
    ~OutputDirectory();

    OutputDirectory(const OutputDirectory&) = delete;
    OutputDirectory& operator=(const OutputDirectory&) = delete;

    const std::filesystem::path& root() const noexcept { return root_; }

    // Absolute path for `name` and registers it as an output.
    std::string output(const std::string& name);
    const std::vector<std::string>& outputs() const noexcept { return outputs_; }

    static constexpr const char* kLockName = ".suitegauge.lock";
    static constexpr const char* kManifestName = "manifest.json";

private:
    std::filesystem::path root_;
    std::filesystem::path lock_;
    std::vector<std::string> outputs_;
};

// Reproducibility record for one command invocation.
struct RunManifest {
    std::string tool_version;
    std::string command;
    std::string run_key;  // command, plus the algorithm for per-algorithm commands
    nlohmann::json resolved_config = nlohmann::json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::chrono::system_clock::time_point started;
    double elapsed_seconds = 0.0;
};

// Merges `run` into <dir>/manifest.json, replacing an earlier run with the
// same key. Input digests are computed here.
void write_manifest(const std::filesystem::path& dir, const RunManifest& run);

}  // namespace suitegauge
