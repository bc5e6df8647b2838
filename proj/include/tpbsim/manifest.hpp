#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "tpbsim/error.hpp"

namespace tpb {

inline constexpr std::string_view kToolName = "tpbsim";
inline constexpr std::string_view kToolVersion = "1.0.0";

inline std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

// A named output produced in memory before it is written.
struct OutputFile {
    std::string name;  // relative to the output directory
    std::string bytes;
};

struct ManifestEntry {
    std::string file;
    std::string sha256;
    std::size_t bytes = 0;

    bool operator==(const ManifestEntry&) const = default;
};

/// Everything needed to regenerate a run's outputs byte for byte. The
/// timestamp is informational and not covered by any digest.
struct RunManifest {
    std::string tool = std::string(kToolName);
    std::string tool_version = std::string(kToolVersion);
    std::string command;          // "run" or "sweep"
    std::string resolved_config;  // YAML with every default materialized
    std::uint64_t base_seed = 0;
    bool svg = true;
    bool snapshot_states = false;
    std::string timestamp;
    std::vector<ManifestEntry> outputs;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::vector<ManifestEntry> digest_outputs(const std::vector<OutputFile>& files) {
    std::vector<ManifestEntry> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back({f.name, sha256_hex(f.bytes), f.bytes.size()});
    return out;
}

inline nlohmann::ordered_json to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = m.tool;
    j["tool_version"] = m.tool_version;
    j["command"] = m.command;
    j["base_seed"] = m.base_seed;
    j["timestamp"] = m.timestamp;
    j["options"] = {{"svg", m.svg}, {"snapshot_states", m.snapshot_states}};
    j["resolved_config"] = m.resolved_config;
    auto outputs = nlohmann::ordered_json::array();
    for (const auto& e : m.outputs) outputs.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    j["outputs"] = std::move(outputs);
    return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    try {
        RunManifest m;
        m.tool = j.at("tool").get<std::string>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.command = j.at("command").get<std::string>();
        m.base_seed = j.at("base_seed").get<std::uint64_t>();
        m.timestamp = j.value("timestamp", "");
        m.svg = j.at("options").at("svg").get<bool>();
        m.snapshot_states = j.at("options").at("snapshot_states").get<bool>();
        m.resolved_config = j.at("resolved_config").get<std::string>();
        for (const auto& e : j.at("outputs"))
            m.outputs.push_back({e.at("file").get<std::string>(), e.at("sha256").get<std::string>(),
                                 e.at("bytes").get<std::size_t>()});
        if (m.command != "run" && m.command != "sweep") throw ConfigError("manifest: unknown command '" + m.command + "'");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

inline std::string manifest_text(const RunManifest& m) { return to_json(m).dump(2) + "\n"; }

inline RunManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

}  // namespace tpb
