#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rfp/model.hpp"

namespace rfp {

struct IngestStats {
  std::size_t lines_read = 0;
  std::size_t accepted = 0;
  std::size_t skipped_malformed = 0;
  std::size_t skipped_non_pe = 0;
  std::size_t missing_imports = 0;
  std::size_t missing_tlsh = 0;

  bool operator==(const IngestStats&) const = default;
};

/// One chronological group of reports. Every report carries `group_id`.
struct Dataset {
  std::vector<FileReport> reports;
  std::string group_id;
  IngestStats ingest_stats;

  std::size_t size() const { return reports.size(); }
  bool empty() const { return reports.empty(); }

  bool operator==(const Dataset&) const = default;
};

/// Reads a JSON-lines feed file. Malformed lines (bad JSON, wrong field
/// types, invariant violations, duplicate ids) and, when `filter_pe` is set,
/// non-PE records are counted and skipped. Blank lines are ignored and not
/// counted. Throws Error(Io) if the file cannot be read; an empty result is
/// not an error.
Dataset ingest(const std::filesystem::path& path, const std::string& group_id,
               bool filter_pe = true);

/// Same as ingest() over an in-memory buffer.
Dataset ingest_text(std::string_view content, const std::string& group_id,
                    bool filter_pe = true);

/// Every violated field invariant, as human-readable text. Empty means ok.
std::vector<std::string> validate(const FileReport& report);

/// Decodes one feed line. Hex fields are lowercased. Throws Error(Parse).
FileReport decode_report(std::string_view line);

/// Decodes a feed `imports` array on its own. Throws Error(Parse).
std::vector<ImportLibrary> decode_imports(std::string_view json_array);

/// Encodes one report as a single JSON line without the trailing newline.
/// Object keys are emitted in sorted order, so output is byte-stable.
std::string encode_report(const FileReport& report);

}  // namespace rfp
