#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace quantmc {

/// Reproducibility record written next to every command's outputs: the
/// command, its fully resolved configuration, digests of the inputs, the
/// seed, and the software version. Holds no clock or host state, so a rerun
/// with the same flags produces a byte-identical manifest.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> input_digests;
    std::uint64_t seed = 0;
    std::string version;

    /// JSON with sorted keys and a trailing newline.
    std::string to_json() const;
};

/// Lowercase SHA-256 hex digest of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace quantmc
