#include "rfp/rfp.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "rfp/cluster.hpp"
#include "rfp/error.hpp"
#include "rfp/evaluation.hpp"
#include "rfp/feed_io.hpp"
#include "rfp/keys.hpp"
#include "rfp/report.hpp"
#include "rfp/synth.hpp"
#include "rfp/taxonomy.hpp"

struct rfp_dataset {
  rfp::Dataset dataset;
};

struct rfp_fingerprints {
  std::vector<rfp::ResilientFingerprint> items;
};

namespace {

thread_local std::string g_last_error;

rfp_status fail(rfp_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

rfp_status map_kind(rfp::ErrorKind kind) {
  switch (kind) {
    case rfp::ErrorKind::Io: return RFP_ERR_IO;
    case rfp::ErrorKind::Parse:
    case rfp::ErrorKind::Spec:
    case rfp::ErrorKind::Usage: return RFP_ERR_USAGE;
    case rfp::ErrorKind::NoImports: return RFP_ERR_NO_IMPORTS;
    case rfp::ErrorKind::EmptyInput: return RFP_ERR_EMPTY;
  }
  return RFP_ERR_INTERNAL;
}

// Runs `fn` and converts exceptions into status codes.
template <typename Fn>
rfp_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    return fn();
  } catch (const rfp::Error& e) {
    return fail(map_kind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RFP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RFP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RFP_ERR_INTERNAL, "unknown error");
  }
}

rfp::EvaluationConfig to_cpp(const rfp_config* cfg) {
  rfp::EvaluationConfig out;
  if (cfg == nullptr) return out;
  out.vendor_threshold = cfg->vendor_threshold;
  out.min_cluster_size = cfg->min_cluster_size;
  out.top_sections = cfg->top_sections;
  out.entropy_malicious = cfg->entropy_malicious;
  out.camouflage_max_raw = cfg->camouflage_max_raw;
  out.camouflage_entropy_eps = cfg->camouflage_entropy_eps;
  if (auto v = out.violations(); !v.empty()) throw rfp::Error(rfp::ErrorKind::Usage, v.front());
  return out;
}

bool valid_qualification(rfp_qualification q) {
  return q >= RFP_Q_ILRS && q <= RFP_Q_CS_OR_MS;
}

rfp::Qualification to_cpp(rfp_qualification q) {
  if (!valid_qualification(q)) throw rfp::Error(rfp::ErrorKind::Usage, "unknown qualification");
  return static_cast<rfp::Qualification>(q);
}

rfp::Format to_cpp(rfp_format f) {
  if (f == RFP_FORMAT_CSV) return rfp::Format::Csv;
  if (f == RFP_FORMAT_JSON) return rfp::Format::Json;
  throw rfp::Error(rfp::ErrorKind::Usage, "unknown format");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

#define RFP_REQUIRE(cond, msg) \
  do {                         \
    if (!(cond)) return fail(RFP_ERR_USAGE, msg); \
  } while (0)

}  // namespace

extern "C" {

const char* rfp_version(void) { return "0.1.0"; }

const char* rfp_last_error(void) { return g_last_error.c_str(); }

const char* rfp_status_name(rfp_status status) {
  switch (status) {
    case RFP_OK: return "ok";
    case RFP_ERR_INTERNAL: return "internal error";
    case RFP_ERR_USAGE: return "usage error";
    case RFP_ERR_EMPTY: return "empty input";
    case RFP_ERR_IO: return "I/O error";
    case RFP_ERR_NO_IMPORTS: return "no imports";
  }
  return "unknown status";
}

void rfp_string_free(char* str) { std::free(str); }

void rfp_config_default(rfp_config* out) {
  if (out == nullptr) return;
  const rfp::EvaluationConfig d;
  out->vendor_threshold = d.vendor_threshold;
  out->min_cluster_size = d.min_cluster_size;
  out->top_sections = d.top_sections;
  out->entropy_malicious = d.entropy_malicious;
  out->camouflage_max_raw = d.camouflage_max_raw;
  out->camouflage_entropy_eps = d.camouflage_entropy_eps;
}

rfp_status rfp_config_validate(const rfp_config* cfg) {
  RFP_REQUIRE(cfg != nullptr, "config is null");
  return guarded([&] {
    to_cpp(cfg);
    return RFP_OK;
  });
}

rfp_status rfp_parse_method(const char* text, rfp_method* out) {
  RFP_REQUIRE(text != nullptr && out != nullptr, "null argument");
  const auto m = rfp::parse_method(text);
  if (!m) return fail(RFP_ERR_USAGE, std::string("unknown method '") + text + "'");
  *out = *m == rfp::Method::TopDown ? RFP_TOP_DOWN : RFP_BOTTOM_UP;
  return RFP_OK;
}

rfp_status rfp_parse_qualification(const char* text, rfp_qualification* out) {
  RFP_REQUIRE(text != nullptr && out != nullptr, "null argument");
  const auto q = rfp::parse_qualification(text);
  if (!q) return fail(RFP_ERR_USAGE, std::string("unknown qualification '") + text + "'");
  *out = static_cast<rfp_qualification>(*q);
  return RFP_OK;
}

const char* rfp_qualification_name(rfp_qualification q) {
  if (!valid_qualification(q)) return "unknown";
  return rfp::to_string(static_cast<rfp::Qualification>(q)).data();
}

rfp_method rfp_qualification_method(rfp_qualification q) {
  if (!valid_qualification(q)) return RFP_BOTTOM_UP;
  return rfp::required_method(static_cast<rfp::Qualification>(q)) == rfp::Method::TopDown
             ? RFP_TOP_DOWN
             : RFP_BOTTOM_UP;
}

rfp_status rfp_dataset_load(const char* path, const char* group_id, int filter_pe,
                            rfp_dataset** out) {
  RFP_REQUIRE(path != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto ds = std::make_unique<rfp_dataset>();
    ds->dataset = rfp::ingest(path, group_id ? group_id : "", filter_pe != 0);
    *out = ds.release();
    return RFP_OK;
  });
}

rfp_status rfp_dataset_parse(const char* text, size_t length, const char* group_id, int filter_pe,
                             rfp_dataset** out) {
  RFP_REQUIRE((text != nullptr || length == 0) && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto ds = std::make_unique<rfp_dataset>();
    ds->dataset = rfp::ingest_text(std::string_view(text ? text : "", length),
                                   group_id ? group_id : "", filter_pe != 0);
    *out = ds.release();
    return RFP_OK;
  });
}

void rfp_dataset_free(rfp_dataset* dataset) { delete dataset; }

size_t rfp_dataset_size(const rfp_dataset* dataset) {
  return dataset ? dataset->dataset.size() : 0;
}

rfp_status rfp_dataset_ingest_stats(const rfp_dataset* dataset, rfp_ingest_stats* out) {
  RFP_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  const auto& s = dataset->dataset.ingest_stats;
  *out = {s.lines_read, s.accepted, s.skipped_malformed, s.skipped_non_pe, s.missing_imports,
          s.missing_tlsh};
  return RFP_OK;
}

rfp_status rfp_imphash(const char* imports_json, char out_hex[65]) {
  RFP_REQUIRE(imports_json != nullptr && out_hex != nullptr, "null argument");
  return guarded([&] {
    const auto digest = rfp::imphash(rfp::decode_imports(imports_json)).digest();
    std::memcpy(out_hex, digest.c_str(), 65);
    return RFP_OK;
  });
}

rfp_status rfp_classify_section(double entropy, uint64_t raw_size, const rfp_config* cfg,
                                rfp_section_label* out) {
  RFP_REQUIRE(out != nullptr, "null argument");
  if (!(entropy >= 0.0 && entropy <= 8.0)) return fail(RFP_ERR_USAGE, "entropy out of range [0, 8]");
  return guarded([&] {
    switch (rfp::classify(entropy, raw_size, to_cpp(cfg))) {
      case rfp::SectionLabel::Malicious: *out = RFP_SECTION_MALICIOUS; break;
      case rfp::SectionLabel::Standard: *out = RFP_SECTION_STANDARD; break;
      case rfp::SectionLabel::Camouflage: *out = RFP_SECTION_CAMOUFLAGE; break;
    }
    return RFP_OK;
  });
}

rfp_status rfp_cluster(const rfp_dataset* dataset, const rfp_config* cfg, rfp_method method,
                       rfp_fingerprints** out) {
  RFP_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  RFP_REQUIRE(method == RFP_TOP_DOWN || method == RFP_BOTTOM_UP, "unknown method");
  *out = nullptr;
  return guarded([&] {
    auto fps = std::make_unique<rfp_fingerprints>();
    fps->items = rfp::cluster(dataset->dataset, to_cpp(cfg),
                              method == RFP_TOP_DOWN ? rfp::Method::TopDown : rfp::Method::BottomUp);
    *out = fps.release();
    return RFP_OK;
  });
}

rfp_status rfp_select(const rfp_fingerprints* fingerprints, rfp_qualification q,
                      rfp_fingerprints** out) {
  RFP_REQUIRE(fingerprints != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto fps = std::make_unique<rfp_fingerprints>();
    fps->items = rfp::select(fingerprints->items, to_cpp(q));
    *out = fps.release();
    return RFP_OK;
  });
}

void rfp_fingerprints_free(rfp_fingerprints* fingerprints) { delete fingerprints; }

size_t rfp_fingerprints_count(const rfp_fingerprints* fingerprints) {
  return fingerprints ? fingerprints->items.size() : 0;
}

rfp_status rfp_fingerprint_get(const rfp_fingerprints* fingerprints, size_t index,
                               rfp_fingerprint_info* out) {
  RFP_REQUIRE(fingerprints != nullptr && out != nullptr, "null argument");
  RFP_REQUIRE(index < fingerprints->items.size(), "fingerprint index out of range");
  const auto& fp = fingerprints->items[index];
  out->method = fp.method == rfp::Method::TopDown ? RFP_TOP_DOWN : RFP_BOTTOM_UP;
  out->key = fp.key.c_str();
  out->redundancy = fp.redundancy();
  out->qualifications = (fp.qualifications.redundant ? RFP_QUAL_RS : 0u) |
                        (fp.qualifications.camouflage ? RFP_QUAL_CS : 0u) |
                        (fp.qualifications.malicious ? RFP_QUAL_MS : 0u);
  return RFP_OK;
}

rfp_status rfp_fingerprint_verdict(const rfp_fingerprints* fingerprints, size_t index,
                                   int threshold, rfp_verdict* out) {
  RFP_REQUIRE(fingerprints != nullptr && out != nullptr, "null argument");
  RFP_REQUIRE(index < fingerprints->items.size(), "fingerprint index out of range");
  RFP_REQUIRE(threshold >= 1, "threshold must be >= 1");
  switch (rfp::verdict(fingerprints->items[index], threshold)) {
    case rfp::Verdict::FullyMalicious: *out = RFP_VERDICT_FULLY_MALICIOUS; break;
    case rfp::Verdict::Partial: *out = RFP_VERDICT_PARTIAL; break;
    case rfp::Verdict::FalsePositive: *out = RFP_VERDICT_FALSE_POSITIVE; break;
  }
  return RFP_OK;
}

rfp_status rfp_summarize(const rfp_fingerprints* fingerprints, rfp_qualification q, int threshold,
                         rfp_summary* out) {
  RFP_REQUIRE(fingerprints != nullptr && out != nullptr, "null argument");
  RFP_REQUIRE(threshold >= 1, "threshold must be >= 1");
  return guarded([&] {
    const auto s = rfp::summarize(fingerprints->items, to_cpp(q), threshold);
    out->qualification = q;
    out->fingerprint_count = s.fingerprint_count;
    out->fp_count = s.fp_count;
    out->fp_accuracy_tenths = s.fp_accuracy.tenths();
    out->fp_redundancy = s.fp_redundancy;
    out->partial_count = s.partial_count;
    out->full_count = s.full_count;
    out->tp_accuracy_tenths = s.tp_accuracy.tenths();
    out->tp_redundancy = s.tp_redundancy;
    out->tp_distinct_files = s.tp_distinct_files;
    out->empty_result = s.empty_result ? 1 : 0;
    return RFP_OK;
  });
}

rfp_status rfp_render_ingest_stats(const rfp_dataset* dataset, rfp_format format, char** out) {
  RFP_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(rfp::render_ingest_stats(dataset->dataset.ingest_stats, to_cpp(format)));
    return RFP_OK;
  });
}

rfp_status rfp_render_prevalence(const rfp_dataset* dataset, rfp_format format, char** out) {
  RFP_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  if (dataset->dataset.empty()) return fail(RFP_ERR_EMPTY, "dataset is empty");
  return guarded([&] {
    *out = dup_string(rfp::render_prevalence(rfp::prevalence(dataset->dataset), to_cpp(format)));
    return RFP_OK;
  });
}

rfp_status rfp_render_fingerprints(const rfp_fingerprints* fingerprints, const rfp_config* cfg,
                                   rfp_format format, size_t min_report_size, char** out) {
  RFP_REQUIRE(fingerprints != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(rfp::render_fingerprints(fingerprints->items, to_cpp(cfg), to_cpp(format),
                                               min_report_size));
    return RFP_OK;
  });
}

rfp_status rfp_render_summary(const rfp_summary* summary, rfp_format format, char** out) {
  RFP_REQUIRE(summary != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    rfp::EvaluationSummary s;
    s.qualification = to_cpp(summary->qualification);
    s.fingerprint_count = summary->fingerprint_count;
    s.fp_count = summary->fp_count;
    s.fp_accuracy = rfp::Percent::from_tenths(summary->fp_accuracy_tenths);
    s.fp_redundancy = summary->fp_redundancy;
    s.partial_count = summary->partial_count;
    s.full_count = summary->full_count;
    s.tp_accuracy = rfp::Percent::from_tenths(summary->tp_accuracy_tenths);
    s.tp_redundancy = summary->tp_redundancy;
    s.tp_distinct_files = summary->tp_distinct_files;
    s.empty_result = summary->empty_result != 0;
    *out = dup_string(rfp::render_summary(s, to_cpp(format)));
    return RFP_OK;
  });
}

rfp_status rfp_render_comparison(const rfp_dataset* dataset, const rfp_config* cfg,
                                 rfp_format format, char** out) {
  RFP_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  if (dataset->dataset.empty()) return fail(RFP_ERR_EMPTY, "dataset is empty");
  return guarded([&] {
    const auto rows = rfp::compare(dataset->dataset, to_cpp(cfg));
    *out = dup_string(rfp::render_comparison(rows, to_cpp(format)));
    return RFP_OK;
  });
}

rfp_status rfp_generate(const char* spec_json, const uint64_t* seed_override,
                        const char* out_path) {
  RFP_REQUIRE(spec_json != nullptr && out_path != nullptr, "null argument");
  return guarded([&] {
    std::string text = spec_json;
    if (seed_override != nullptr) {
      auto j = nlohmann::json::parse(text, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        throw rfp::Error(rfp::ErrorKind::Spec, "spec error: not a JSON object");
      }
      j["seed"] = *seed_override;
      text = j.dump();
    }
    const auto spec = rfp::SyntheticSpec::from_json(text);
    rfp::write_corpus(rfp::generate(spec), out_path);
    return RFP_OK;
  });
}

rfp_status rfp_truth_path(const char* dataset_path, char** out) {
  RFP_REQUIRE(dataset_path != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(rfp::truth_path_for(dataset_path).string());
    return RFP_OK;
  });
}

}  // extern "C"
