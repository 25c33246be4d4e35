#include "rfp/feed_io.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "rfp/error.hpp"

namespace rfp {
namespace {

using json = nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(std::string("missing key '") + key + "'");
  return *it;
}

std::string get_string(const json& value, const char* key) {
  if (!value.is_string()) parse_fail(std::string("'") + key + "' must be a string");
  return value.get<std::string>();
}

std::int64_t get_int(const json& value, const char* key) {
  if (!value.is_number_integer()) parse_fail(std::string("'") + key + "' must be an integer");
  return value.get<std::int64_t>();
}

std::uint64_t get_uint(const json& value, const char* key) {
  if (!value.is_number_unsigned()) {
    parse_fail(std::string("'") + key + "' must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

double get_real(const json& value, const char* key) {
  if (!value.is_number()) parse_fail(std::string("'") + key + "' must be a number");
  return value.get<double>();
}

template <typename T, typename Fn>
T optional_field(const json& obj, const char* key, T fallback, Fn&& get) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return get(*it, key);
}

const json* optional_array(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  if (!it->is_array()) parse_fail(std::string("'") + key + "' must be an array");
  return &*it;
}

ImportLibrary decode_import(const json& obj) {
  if (!obj.is_object()) parse_fail("import entry must be an object");
  ImportLibrary lib;
  lib.library_name = get_string(require(obj, "library"), "library");
  if (const json* fns = optional_array(obj, "functions")) {
    lib.functions.reserve(fns->size());
    for (const auto& fn : *fns) lib.functions.push_back(get_string(fn, "functions[]"));
  }
  return lib;
}

SectionRecord decode_section(const json& obj) {
  if (!obj.is_object()) parse_fail("section entry must be an object");
  SectionRecord s;
  s.content_hash = to_lower(get_string(require(obj, "md5"), "md5"));
  s.entropy = get_real(require(obj, "entropy"), "entropy");
  s.name = optional_field(obj, "name", std::string{}, get_string);
  s.chi2 = optional_field(obj, "chi2", 0.0, get_real);
  s.raw_size = optional_field(obj, "raw_size", std::uint64_t{0}, get_uint);
  s.virtual_address = optional_field(obj, "virtual_address", std::uint64_t{0}, get_uint);
  s.virtual_size = optional_field(obj, "virtual_size", std::uint64_t{0}, get_uint);
  const auto flags = optional_field(obj, "flags", std::string{}, get_string);
  auto parsed = parse_section_flags(flags);
  if (!parsed) parse_fail("section flags must be drawn from 'rwx'");
  s.flags = *parsed;
  return s;
}

ResourceRecord decode_resource(const json& obj) {
  if (!obj.is_object()) parse_fail("resource entry must be an object");
  ResourceRecord r;
  r.content_hash = to_lower(get_string(require(obj, "hash"), "hash"));
  r.resource_type = optional_field(obj, "type", std::string{}, get_string);
  r.entropy = optional_field(obj, "entropy", 0.0, get_real);
  r.chi2 = optional_field(obj, "chi2", 0.0, get_real);
  return r;
}

enum class LineOutcome { Blank, Accepted, Malformed, NonPe };

struct ParsedLine {
  LineOutcome outcome = LineOutcome::Blank;
  FileReport report;
};

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

ParsedLine parse_line(std::string_view line, bool filter_pe) {
  ParsedLine out;
  if (is_blank(line)) return out;
  try {
    out.report = decode_report(line);
  } catch (const Error&) {
    out.outcome = LineOutcome::Malformed;
    return out;
  }
  if (filter_pe && !is_pe(out.report.file_type)) {
    out.outcome = LineOutcome::NonPe;
    return out;
  }
  out.outcome = validate(out.report).empty() ? LineOutcome::Accepted : LineOutcome::Malformed;
  return out;
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    lines.push_back(content.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

Dataset ingest_text(std::string_view content, const std::string& group_id, bool filter_pe) {
  const auto lines = split_lines(content);
  std::vector<ParsedLine> parsed(lines.size());

  // Lines are independent; parse in contiguous chunks, merge in line order.
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  const std::size_t chunk = (lines.size() + workers - 1) / std::max<std::size_t>(workers, 1);
  if (workers <= 1 || lines.size() < 1024) {
    for (std::size_t i = 0; i < lines.size(); ++i) parsed[i] = parse_line(lines[i], filter_pe);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(lines.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] {
        for (std::size_t i = begin; i < end; ++i) parsed[i] = parse_line(lines[i], filter_pe);
      });
    }
  }

  Dataset ds;
  ds.group_id = group_id;
  IngestStats& stats = ds.ingest_stats;
  std::unordered_set<std::string> seen_ids;
  for (auto& line : parsed) {
    if (line.outcome == LineOutcome::Blank) continue;
    ++stats.lines_read;
    switch (line.outcome) {
      case LineOutcome::Malformed: ++stats.skipped_malformed; continue;
      case LineOutcome::NonPe: ++stats.skipped_non_pe; continue;
      default: break;
    }
    if (!seen_ids.insert(line.report.file_id).second) {
      ++stats.skipped_malformed;
      continue;
    }
    ++stats.accepted;
    if (!line.report.has_imports()) ++stats.missing_imports;
    if (!line.report.tlsh) ++stats.missing_tlsh;
    line.report.group_id = group_id;
    ds.reports.push_back(std::move(line.report));
  }
  return ds;
}

Dataset ingest(const std::filesystem::path& path, const std::string& group_id, bool filter_pe) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "read failed: " + path.string());
  return ingest_text(buf.view(), group_id, filter_pe);
}

std::vector<std::string> validate(const FileReport& r) {
  std::vector<std::string> v;
  if (r.file_id.empty()) v.emplace_back("file id empty");
  if (r.first_seen < 0) v.emplace_back("first_seen negative");
  if (!is_lower_hex(r.sha256, 64)) v.emplace_back("sha256 must be 64 lowercase hex chars");
  if (!is_lower_hex(r.md5, 32)) v.emplace_back("md5 must be 32 lowercase hex chars");
  if (r.tlsh && r.tlsh->empty()) v.emplace_back("tlsh present but empty");
  if (r.vendor_malicious_count < 0 || r.vendor_malicious_count > kVendorCount) {
    v.emplace_back("vendor count out of range");
  }
  for (std::size_t i = 0; i < r.imports.size(); ++i) {
    if (r.imports[i].library_name.empty()) {
      v.emplace_back("import " + std::to_string(i) + ": library name empty");
    }
  }
  for (std::size_t i = 0; i < r.sections.size(); ++i) {
    const auto& s = r.sections[i];
    const std::string where = "section " + std::to_string(i) + ": ";
    if (!is_lower_hex(s.content_hash, 32)) v.push_back(where + "content hash must be 32 lowercase hex chars");
    if (!(s.entropy >= 0.0 && s.entropy <= 8.0)) v.push_back(where + "entropy out of range [0, 8]");
    if (!(s.chi2 >= 0.0)) v.push_back(where + "chi2 negative");
  }
  for (std::size_t i = 0; i < r.resources.size(); ++i) {
    const auto& res = r.resources[i];
    const std::string where = "resource " + std::to_string(i) + ": ";
    if (res.content_hash.empty() || !is_lower_hex(res.content_hash, res.content_hash.size())) {
      v.push_back(where + "content hash must be lowercase hex");
    }
    if (!(res.entropy >= 0.0 && res.entropy <= 8.0)) v.push_back(where + "entropy out of range [0, 8]");
    if (!(res.chi2 >= 0.0)) v.push_back(where + "chi2 negative");
  }
  return v;
}

FileReport decode_report(std::string_view line) {
  json obj = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) parse_fail("invalid JSON");
  if (!obj.is_object()) parse_fail("line is not a JSON object");

  FileReport r;
  r.file_id = get_string(require(obj, "id"), "id");
  r.file_type = parse_file_type(get_string(require(obj, "type"), "type"));
  r.sha256 = to_lower(get_string(require(obj, "sha256"), "sha256"));
  r.md5 = to_lower(get_string(require(obj, "md5"), "md5"));
  const std::int64_t flags = get_int(require(obj, "vendor_malicious_count"), "vendor_malicious_count");
  if (flags < 0 || flags > kVendorCount) {
    r.vendor_malicious_count = flags < 0 ? -1 : kVendorCount + 1;  // caught by validate()
  } else {
    r.vendor_malicious_count = static_cast<int>(flags);
  }
  r.first_seen = optional_field(obj, "first_seen", std::int64_t{0}, get_int);
  r.size_bytes = optional_field(obj, "size", std::uint64_t{0}, get_uint);
  if (auto it = obj.find("tlsh"); it != obj.end() && !it->is_null()) {
    r.tlsh = get_string(*it, "tlsh");
  }
  if (const json* imports = optional_array(obj, "imports")) {
    r.imports.reserve(imports->size());
    for (const auto& lib : *imports) r.imports.push_back(decode_import(lib));
  }
  if (const json* sections = optional_array(obj, "sections")) {
    r.sections.reserve(sections->size());
    for (const auto& s : *sections) r.sections.push_back(decode_section(s));
  }
  if (const json* resources = optional_array(obj, "resources")) {
    r.resources.reserve(resources->size());
    for (const auto& res : *resources) r.resources.push_back(decode_resource(res));
  }
  return r;
}

std::vector<ImportLibrary> decode_imports(std::string_view json_array) {
  json arr = json::parse(json_array.begin(), json_array.end(), nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) parse_fail("imports must be a JSON array");
  std::vector<ImportLibrary> out;
  out.reserve(arr.size());
  for (const auto& lib : arr) out.push_back(decode_import(lib));
  return out;
}

std::string encode_report(const FileReport& r) {
  json obj = json::object();
  obj["id"] = r.file_id;
  obj["first_seen"] = r.first_seen;
  obj["type"] = std::string(to_string(r.file_type));
  obj["md5"] = r.md5;
  obj["sha256"] = r.sha256;
  if (r.tlsh) obj["tlsh"] = *r.tlsh;
  obj["size"] = r.size_bytes;
  obj["vendor_malicious_count"] = r.vendor_malicious_count;

  json imports = json::array();
  for (const auto& lib : r.imports) {
    imports.push_back({{"library", lib.library_name}, {"functions", lib.functions}});
  }
  obj["imports"] = std::move(imports);

  json sections = json::array();
  for (const auto& s : r.sections) {
    sections.push_back({{"md5", s.content_hash},
                        {"name", s.name},
                        {"entropy", s.entropy},
                        {"chi2", s.chi2},
                        {"raw_size", s.raw_size},
                        {"virtual_address", s.virtual_address},
                        {"virtual_size", s.virtual_size},
                        {"flags", to_string(s.flags)}});
  }
  obj["sections"] = std::move(sections);

  json resources = json::array();
  for (const auto& res : r.resources) {
    resources.push_back({{"hash", res.content_hash},
                         {"type", res.resource_type},
                         {"entropy", res.entropy},
                         {"chi2", res.chi2}});
  }
  obj["resources"] = std::move(resources);
  return obj.dump();
}

}  // namespace rfp
