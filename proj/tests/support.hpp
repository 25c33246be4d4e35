#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rfp/feed_io.hpp"
#include "rfp/model.hpp"

namespace rfp::test {

// Deterministic fake digest: `tag` in the high bits, `n` in the low bits.
inline std::string fake_hex(std::uint64_t tag, std::uint64_t n, std::size_t len) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%016llx%016llx%016llx%016llx",
                0ULL, 0ULL, static_cast<unsigned long long>(tag), static_cast<unsigned long long>(n));
  return std::string(buf + 64 - len);
}

inline SectionRecord section(const std::string& hash, double entropy, std::uint64_t raw = 20000) {
  SectionRecord s;
  s.content_hash = hash;
  s.name = ".text";
  s.entropy = entropy;
  s.chi2 = 1000.0;
  s.raw_size = raw;
  s.virtual_address = 4096;
  s.virtual_size = raw;
  s.flags = {true, false, true};
  return s;
}

// Minimal valid PE report; callers fill in imports and sections.
inline FileReport report(std::uint64_t n, int flags = 10) {
  FileReport r;
  r.file_id = "f" + std::to_string(n);
  r.first_seen = 1600000000 + static_cast<std::int64_t>(n);
  r.file_type = FileType::Win32EXE;
  r.sha256 = fake_hex(0xaa, n, 64);
  r.md5 = fake_hex(0xbb, n, 32);
  r.size_bytes = 4096 + n;
  r.vendor_malicious_count = flags;
  return r;
}

inline std::vector<ImportLibrary> imports_of(const std::string& lib,
                                             std::vector<std::string> functions) {
  return {ImportLibrary{lib, std::move(functions)}};
}

inline Dataset dataset_of(std::vector<FileReport> reports, std::string group = "g") {
  Dataset ds;
  ds.group_id = std::move(group);
  for (auto& r : reports) r.group_id = ds.group_id;
  ds.reports = std::move(reports);
  ds.ingest_stats.lines_read = ds.reports.size();
  ds.ingest_stats.accepted = ds.reports.size();
  return ds;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rfp-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace rfp::test
