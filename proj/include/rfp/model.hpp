#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rfp {

/// Number of external vendors that can flag a file.
inline constexpr int kVendorCount = 71;

enum class FileType { Win32EXE, Win32DLL, Win64EXE, Win64DLL, Other };

/// "Win32 EXE" style, as feeds print it.
std::string_view to_string(FileType type);
/// Accepts both "Win32 EXE" and "Win32EXE" (case-insensitive); anything
/// unrecognised maps to Other.
FileType parse_file_type(std::string_view text);
inline bool is_pe(FileType type) { return type != FileType::Other; }

struct ImportLibrary {
  std::string library_name;
  std::vector<std::string> functions;  // order as read

  bool operator==(const ImportLibrary&) const = default;
};

struct SectionFlags {
  bool read = false;
  bool write = false;
  bool execute = false;

  bool operator==(const SectionFlags&) const = default;
};

/// Canonical "rwx" subset, e.g. "rx".
std::string to_string(SectionFlags flags);
/// Returns nullopt when `text` contains anything besides r, w, x.
std::optional<SectionFlags> parse_section_flags(std::string_view text);

struct SectionRecord {
  std::string content_hash;  // md5 of section bytes, lowercase hex
  std::string name;
  double entropy = 0.0;
  double chi2 = 0.0;
  std::uint64_t raw_size = 0;
  std::uint64_t virtual_address = 0;
  std::uint64_t virtual_size = 0;
  SectionFlags flags;

  bool operator==(const SectionRecord&) const = default;
};

struct ResourceRecord {
  std::string content_hash;
  std::string resource_type;
  double entropy = 0.0;
  double chi2 = 0.0;

  bool operator==(const ResourceRecord&) const = default;
};

struct FileReport {
  std::string file_id;
  std::int64_t first_seen = 0;  // UTC seconds
  FileType file_type = FileType::Other;
  std::string sha256;
  std::string md5;
  std::optional<std::string> tlsh;
  std::uint64_t size_bytes = 0;
  int vendor_malicious_count = 0;
  std::vector<ImportLibrary> imports;
  std::vector<SectionRecord> sections;
  std::vector<ResourceRecord> resources;
  std::string group_id;

  bool has_imports() const { return !imports.empty(); }

  bool operator==(const FileReport&) const = default;
};

enum class SectionLabel { Malicious, Standard, Camouflage };

std::string_view to_string(SectionLabel label);

struct EvaluationConfig {
  int vendor_threshold = 4;
  std::size_t min_cluster_size = 2;
  std::size_t top_sections = 10;
  double entropy_malicious = 5.0;
  std::uint64_t camouflage_max_raw = 4096;
  double camouflage_entropy_eps = 1e-9;

  /// Empty when the configuration is usable.
  std::vector<std::string> violations() const;
};

bool is_lower_hex(std::string_view text, std::size_t length);
std::string to_lower(std::string_view text);

}  // namespace rfp
