#include "output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "limabean/errors.hpp"

namespace limabean::cli {

namespace {
constexpr const char* kLibraryVersion = "0.1.0";
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

OutputDir::OutputDir(std::string dir) : dir_(std::move(dir)) {
  if (dir_.empty()) throw SpecError("output directory must not be empty");
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw SpecError("cannot create output directory '" + dir_ + "': " + ec.message());
}

std::string OutputDir::path_of(const std::string& name) const {
  return (std::filesystem::path(dir_) / name).string();
}

void OutputDir::write_data_file(const std::string& name, std::string_view content) {
  const std::string path = path_of(name);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SpecError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw SpecError("write failed for '" + path + "'");
  files_[name] = fnv1a64_hex(content);
}

void OutputDir::write_manifest(const std::string& command,
                               const std::string& canonical_spec, std::uint64_t seed,
                               double wall_seconds) {
  nlohmann::json manifest = extras_;
  manifest["format_version"] = 1;
  manifest["command"] = command;
  manifest["library_version"] = kLibraryVersion;
  manifest["seed"] = seed;
  manifest["spec_hash"] = fnv1a64_hex(canonical_spec);
  manifest["wall_time_seconds"] = wall_seconds;
  manifest["files"] = files_;
  manifest["spec"] = nlohmann::json::parse(canonical_spec);

  const std::string path = path_of("manifest.json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SpecError("cannot open '" + path + "' for writing");
  out << manifest.dump(2) << "\n";
  out.flush();
  if (!out) throw SpecError("write failed for '" + path + "'");
}

}  // namespace limabean::cli
