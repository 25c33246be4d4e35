#include "rfp/report.hpp"

#include <json.hpp>

namespace rfp {
namespace {

using json = nlohmann::json;

std::string join(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out.push_back(',');
    first = false;
    out += f;
  }
  out.push_back('\n');
  return out;
}

std::string num(std::size_t v) { return std::to_string(v); }

std::string line(const json& j) { return j.dump() + "\n"; }

}  // namespace

std::string render_ingest_stats(const IngestStats& s, Format format) {
  if (format == Format::Json) {
    return line({{"lines_read", s.lines_read},
                 {"accepted", s.accepted},
                 {"skipped_malformed", s.skipped_malformed},
                 {"skipped_non_pe", s.skipped_non_pe},
                 {"missing_imports", s.missing_imports},
                 {"missing_tlsh", s.missing_tlsh}});
  }
  return join({"lines_read", "accepted", "skipped_malformed", "skipped_non_pe", "missing_imports",
               "missing_tlsh"}) +
         join({num(s.lines_read), num(s.accepted), num(s.skipped_malformed), num(s.skipped_non_pe),
               num(s.missing_imports), num(s.missing_tlsh)});
}

std::string render_prevalence(const PrevalenceReport& report, Format format) {
  std::string out;
  if (format == Format::Csv) out = join({"feature", "population", "redundancy", "redundancy_pct"});
  for (const auto& row : report.rows) {
    if (format == Format::Json) {
      out += line({{"feature", std::string(to_string(row.feature))},
                   {"population", row.population},
                   {"redundancy", row.redundancy},
                   {"redundancy_pct", row.redundancy_pct.value()}});
    } else {
      out += join({std::string(to_string(row.feature)), num(row.population), num(row.redundancy),
                   row.redundancy_pct.str()});
    }
  }
  return out;
}

std::string render_summary(const EvaluationSummary& s, Format format) {
  const std::string q(to_string(s.qualification));
  if (format == Format::Json) {
    return line({{"qualification", q},
                 {"fingerprints", s.fingerprint_count},
                 {"fp_num", s.fp_count},
                 {"fp_acc", s.fp_accuracy.value()},
                 {"fp_redundancy", s.fp_redundancy},
                 {"partial_num", s.partial_count},
                 {"full_num", s.full_count},
                 {"tp_acc", s.tp_accuracy.value()},
                 {"tp_redundancy", s.tp_redundancy}});
  }
  return join({"qualification", "fingerprints", "fp_num", "fp_acc", "fp_redundancy", "partial_num",
               "full_num", "tp_acc", "tp_redundancy"}) +
         join({q, num(s.fingerprint_count), num(s.fp_count), s.fp_accuracy.str(),
               num(s.fp_redundancy), num(s.partial_count), num(s.full_count), s.tp_accuracy.str(),
               num(s.tp_redundancy)});
}

std::string render_comparison(std::span<const ComparisonRow> rows, Format format) {
  std::string out;
  if (format == Format::Csv) out = join({"technique", "files", "accuracy_pct"});
  for (const auto& row : rows) {
    if (format == Format::Json) {
      out += line({{"technique", row.technique},
                   {"files", row.files_identified},
                   {"accuracy_pct", row.accuracy.value()}});
    } else {
      out += join({row.technique, num(row.files_identified), row.accuracy.str()});
    }
  }
  return out;
}

std::string render_fingerprints(std::span<const ResilientFingerprint> fingerprints,
                                const EvaluationConfig& cfg, Format format,
                                std::size_t min_report_size) {
  std::string out;
  if (format == Format::Csv) {
    out = join({"method", "key", "display_id", "redundancy", "qualifications", "verdict"});
  }
  for (const auto& fp : fingerprints) {
    if (fp.redundancy() < min_report_size) continue;
    const std::string verdict_name(to_string(verdict(fp, cfg.vendor_threshold)));
    if (format == Format::Csv) {
      std::string quals;
      for (const auto& q : fp.qualifications.names()) quals += (quals.empty() ? "" : "+") + q;
      out += join({std::string(to_string(fp.method)), fp.key, display_id(fp.key),
                   num(fp.redundancy()), quals, verdict_name});
      continue;
    }
    json hist = json::object();
    for (const auto& [flags, files] : fp.file_stats.vendor_flag_histogram) {
      hist[std::to_string(flags)] = files;
    }
    json profiles = json::array();
    for (const auto& p : fp.section_profiles) {
      profiles.push_back({{"sec_key", p.sec_key.digest()},
                          {"display_id", p.sec_key.display_id()},
                          {"label", std::string(to_string(p.label))},
                          {"occurrence_count", p.occurrence_count},
                          {"distinct_file_count", p.distinct_file_count},
                          {"entropy_min", p.entropy_min},
                          {"entropy_max", p.entropy_max},
                          {"chi2_min", p.chi2_min},
                          {"chi2_max", p.chi2_max}});
    }
    out += line({{"method", std::string(to_string(fp.method))},
                 {"key", fp.key},
                 {"display_id", display_id(fp.key)},
                 {"redundancy", fp.redundancy()},
                 {"qualifications", fp.qualifications.names()},
                 {"verdict", verdict_name},
                 {"file_ids", fp.file_ids},
                 {"file_stats",
                  {{"file_count", fp.file_stats.file_count},
                   {"distinct_sha256", fp.file_stats.distinct_sha256},
                   {"size_min", fp.file_stats.size_min},
                   {"size_max", fp.file_stats.size_max},
                   {"vendor_flag_histogram", hist}}},
                 {"section_profiles", profiles}});
  }
  return out;
}

}  // namespace rfp
