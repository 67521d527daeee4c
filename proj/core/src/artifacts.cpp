#include "recbench/artifacts.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "recbench/error.hpp"

namespace recbench {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) {
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.flush();
    }
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed: " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " into place");
  }
}

Manifest persist_manifest(const fs::path& run_dir) {
  Manifest manifest;
  for (const auto& entry : fs::recursive_directory_iterator(run_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), run_dir).generic_string();
    if (rel == kManifestName || rel.ends_with(".tmp")) continue;
    manifest[rel] = sha256_file(entry.path());
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [path, hash] : manifest) doc[path] = hash;
  write_file_atomic(run_dir / kManifestName, doc.dump(2) + "\n");
  return manifest;
}

Manifest read_manifest(const fs::path& run_dir) {
  const auto path = run_dir / kManifestName;
  Manifest manifest;
  try {
    const auto doc = nlohmann::json::parse(read_file(path));
    for (const auto& [rel, hash] : doc.items()) manifest[rel] = hash.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return manifest;
}

std::vector<std::string> verify_manifest(const fs::path& run_dir) {
  std::vector<std::string> mismatched;
  for (const auto& [rel, hash] : read_manifest(run_dir)) {
    const fs::path file = run_dir / rel;
    if (!fs::exists(file) || sha256_file(file) != hash) mismatched.push_back(rel);
  }
  return mismatched;
}

}  // namespace recbench
