#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace sklab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitCapacity = 4;

// Dispatches a config to its command, writes result.json, command-specific
// CSVs and manifest.json into out_dir. Returns the process exit code.
int run_command(const nlohmann::json& config, const std::filesystem::path& out_dir,
                std::optional<std::uint64_t> seed_override, int threads);

// 64-bit FNV-1a of a file's bytes, as a hex string (for the manifest).
std::string file_digest(const std::filesystem::path& p);

}  // namespace sklab::cli
