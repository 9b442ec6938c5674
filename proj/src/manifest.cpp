#include "suitegauge/manifest.hpp"

#include "suitegauge/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <ctime>
#include <fcntl.h>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <unistd.h>

namespace suitegauge {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 initialisation failed");
    }
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);

    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

OutputDirectory::OutputDirectory(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory '" + root_.string() + "': " + ec.message());
    lock_ = root_ / kLockName;
    const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST) {
            throw IoError("output directory '" + root_.string() +
                          "' is locked by another run (remove " + lock_.string() +
                          " if no run is active)");
        }
        throw IoError("cannot create lock file '" + lock_.string() + "': " + std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

OutputDirectory::~OutputDirectory() {
    std::error_code ec;
    fs::remove(lock_, ec);
}

std::string OutputDirectory::output(const std::string& name) {
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
    return (root_ / name).string();
}

namespace {

std::string iso8601(std::chrono::system_clock::time_point t) {
    const std::time_t seconds = std::chrono::system_clock::to_time_t(t);
    std::tm utc{};
    gmtime_r(&seconds, &utc);
    std::ostringstream out;
    out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

}  // namespace

void write_manifest(const fs::path& dir, const RunManifest& run) {
    using nlohmann::json;
    const fs::path path = dir / OutputDirectory::kManifestName;
    json doc = json::object();
    if (fs::exists(path)) {
        std::ifstream in(path);
        doc = json::parse(in, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) doc = json::object();
    }
    doc["tool"] = "suitegauge";
    doc["tool_version"] = run.tool_version;
    if (!doc.contains("runs") || !doc["runs"].is_object()) doc["runs"] = json::object();

    json inputs = json::array();
    for (const auto& in : run.inputs) {
        inputs.push_back(json{{"path", in}, {"sha256", sha256_file(in)}});
    }
    doc["runs"][run.run_key] = json{{"command", run.command},
                                    {"config", run.resolved_config},
                                    {"inputs", std::move(inputs)},
                                    {"outputs", run.outputs},
                                    {"started_at", iso8601(run.started)},
                                    {"elapsed_seconds", run.elapsed_seconds}};

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace suitegauge
