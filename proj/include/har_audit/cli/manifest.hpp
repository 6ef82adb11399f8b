#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace har_audit::cli {

namespace fs = std::filesystem;

inline constexpr const char* kManifestName = "manifest.json";

/// Outputs of one command, held in memory until the command has finished.
/// Nothing reaches the run directory unless commit() is called, so a
/// failing command leaves no partial artifacts behind.
class ArtifactSet {
public:
    void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
    const std::map<std::string, std::string>& files() const noexcept { return files_; }

    /// Writes every file to a temporary name first, then renames them into
    /// place; on error all temporaries are removed.
    void commit(const fs::path& dir) const;

private:
    std::map<std::string, std::string> files_;
};

std::string sha256_hex(std::string_view data);

/// Rewrites manifest.json with the SHA-256 of every regular file in `dir`
/// (sorted by name, manifest excluded).
void write_manifest(const fs::path& dir);

}  // namespace har_audit::cli
