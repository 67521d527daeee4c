#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace recbench {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it into place; the temporary is removed
// on failure so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Relative path (generic form) -> lowercase hex SHA-256.
using Manifest = std::map<std::string, std::string>;

inline constexpr std::string_view kManifestName = "manifest.json";

// Hashes every regular file under run_dir except the manifest itself and writes manifest.json.
Manifest persist_manifest(const std::filesystem::path& run_dir);

Manifest read_manifest(const std::filesystem::path& run_dir);

// Paths whose current content no longer matches the manifest (missing files included).
std::vector<std::string> verify_manifest(const std::filesystem::path& run_dir);

}  // namespace recbench
