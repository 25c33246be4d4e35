// rfp: command-line driver over the C interface.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfp/rfp.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Thrown for early exits; carries the process status.
struct Exit {
  int code;
};

[[noreturn]] void die(int code, const std::string& message) {
  std::cerr << "rfp: " << message << '\n';
  throw Exit{code};
}

void check(rfp_status status) {
  if (status != RFP_OK) die(status, rfp_last_error());
}

struct DatasetDeleter {
  void operator()(rfp_dataset* d) const { rfp_dataset_free(d); }
};
struct FingerprintsDeleter {
  void operator()(rfp_fingerprints* f) const { rfp_fingerprints_free(f); }
};
using DatasetPtr = std::unique_ptr<rfp_dataset, DatasetDeleter>;
using FingerprintsPtr = std::unique_ptr<rfp_fingerprints, FingerprintsDeleter>;

std::string take(char* s) {
  std::string out(s);
  rfp_string_free(s);
  return out;
}

struct Options {
  std::vector<std::string> inputs;
  std::vector<std::string> groups;
  std::string out;
  std::string method;
  std::string qualify;
  std::string format;
  std::string config_path;
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  rfp_config cfg{};
  std::size_t min_report_size = 1;
  bool keep_non_pe = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(RFP_ERR_IO, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename T>
void from_config(const json& j, const char* key, T& field, const CLI::App& app, const char* flag) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (flag != nullptr) {
    const CLI::Option* opt = app.get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) return;
  }
  try {
    field = it->get<T>();
  } catch (const json::exception&) {
    die(RFP_ERR_USAGE, std::string("config: bad value for '") + key + "'");
  }
}

// File values fill in whatever the command line left unset.
void apply_config(Options& o, const CLI::App& app) {
  if (o.config_path.empty()) return;
  const json j = json::parse(read_file(o.config_path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) die(RFP_ERR_USAGE, "config: not a JSON object");
  static const char* const known[] = {
      "input_paths",      "group_ids",         "output_directory",    "report_format",
      "min_report_size",  "vendor_threshold",  "min_cluster_size",    "top_sections",
      "entropy_malicious", "camouflage_max_raw", "camouflage_entropy_eps"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      die(RFP_ERR_USAGE, "config: unknown key '" + key + "'");
    }
  }
  from_config(j, "input_paths", o.inputs, app, "--input");
  from_config(j, "group_ids", o.groups, app, "--group");
  from_config(j, "output_directory", o.out, app, "--out");
  from_config(j, "report_format", o.format, app, "--format");
  from_config(j, "min_report_size", o.min_report_size, app, "--min-report-size");
  from_config(j, "vendor_threshold", o.cfg.vendor_threshold, app, "--threshold");
  from_config(j, "min_cluster_size", o.cfg.min_cluster_size, app, "--min-cluster");
  from_config(j, "top_sections", o.cfg.top_sections, app, "--top-sections");
  from_config(j, "entropy_malicious", o.cfg.entropy_malicious, app, nullptr);
  from_config(j, "camouflage_max_raw", o.cfg.camouflage_max_raw, app, nullptr);
  from_config(j, "camouflage_entropy_eps", o.cfg.camouflage_entropy_eps, app, nullptr);
}

rfp_format parse_format(const std::string& text, rfp_format fallback) {
  if (text.empty()) return fallback;
  if (text == "csv") return RFP_FORMAT_CSV;
  if (text == "json") return RFP_FORMAT_JSON;
  die(RFP_ERR_USAGE, "unknown format '" + text + "'");
}

rfp_method parse_method(const std::string& text) {
  if (text.empty()) die(RFP_ERR_USAGE, "--method is required");
  rfp_method m{};
  check(rfp_parse_method(text.c_str(), &m));
  return m;
}

// The qualification must match the method; defaults to the method's best one.
rfp_qualification parse_qualification(const std::string& text, rfp_method method) {
  if (text.empty()) return method == RFP_TOP_DOWN ? RFP_Q_IL_CS_OR_MS : RFP_Q_CS_OR_MS;
  rfp_qualification q{};
  check(rfp_parse_qualification(text.c_str(), &q));
  if (rfp_qualification_method(q) != method) {
    die(RFP_ERR_USAGE, "qualification " + std::string(rfp_qualification_name(q)) +
                           " does not apply to method " +
                           (method == RFP_TOP_DOWN ? "top-down" : "bottom-up"));
  }
  return q;
}

struct Input {
  std::string group;
  DatasetPtr dataset;
};

std::vector<Input> load_inputs(const Options& o) {
  if (o.inputs.empty()) die(RFP_ERR_USAGE, "--input is required");
  if (!o.groups.empty() && o.groups.size() != o.inputs.size()) {
    die(RFP_ERR_USAGE, "--group must be given once per --input");
  }
  std::vector<Input> out;
  for (std::size_t i = 0; i < o.inputs.size(); ++i) {
    const std::string group = o.groups.empty() ? fs::path(o.inputs[i]).stem().string() : o.groups[i];
    rfp_dataset* raw = nullptr;
    check(rfp_dataset_load(o.inputs[i].c_str(), group.c_str(), o.keep_non_pe ? 0 : 1, &raw));
    out.push_back({group, DatasetPtr(raw)});
  }
  return out;
}

void require_non_empty(const Input& in) {
  if (rfp_dataset_size(in.dataset.get()) == 0) {
    die(RFP_ERR_EMPTY, "no usable records in group " + in.group);
  }
}

// One input writes to --out as a file (or stdout); several treat --out as a
// directory holding one report per group.
class Sink {
 public:
  Sink(const Options& o, const char* suffix, rfp_format format)
      : out_(o.out), multi_(o.inputs.size() > 1), suffix_(suffix),
        ext_(format == RFP_FORMAT_JSON ? ".jsonl" : ".csv") {
    if (multi_) {
      if (out_.empty() || out_ == "-") die(RFP_ERR_USAGE, "--out directory required for several inputs");
      std::error_code ec;
      fs::create_directories(out_, ec);
      if (ec) die(RFP_ERR_IO, "cannot create " + out_ + ": " + ec.message());
    }
  }

  void write(const std::string& group, const std::string& text) const {
    if (!multi_ && (out_.empty() || out_ == "-")) {
      std::cout << text << std::flush;
      return;
    }
    const fs::path path = multi_ ? fs::path(out_) / (group + suffix_ + ext_) : fs::path(out_);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) die(RFP_ERR_IO, "cannot write " + path.string());
    f << text;
    if (!f) die(RFP_ERR_IO, "write failed: " + path.string());
  }

 private:
  std::string out_;
  bool multi_;
  std::string suffix_;
  std::string ext_;
};

FingerprintsPtr cluster_and_select(const Input& in, const rfp_config& cfg, rfp_method method,
                                   std::optional<rfp_qualification> q) {
  rfp_fingerprints* raw = nullptr;
  check(rfp_cluster(in.dataset.get(), &cfg, method, &raw));
  FingerprintsPtr all(raw);
  if (!q) return all;
  rfp_fingerprints* picked = nullptr;
  check(rfp_select(all.get(), *q, &picked));
  return FingerprintsPtr(picked);
}

int cmd_generate(const Options& o) {
  if (o.spec_path.empty()) die(RFP_ERR_USAGE, "--spec is required");
  if (o.out.empty()) die(RFP_ERR_USAGE, "--out is required");
  const std::string spec = read_file(o.spec_path);
  check(rfp_generate(spec.c_str(), o.seed ? &*o.seed : nullptr, o.out.c_str()));
  char* truth = nullptr;
  check(rfp_truth_path(o.out.c_str(), &truth));
  std::cerr << "rfp: wrote " << o.out << " and " << take(truth) << '\n';
  return 0;
}

int cmd_ingest_check(const Options& o) {
  const auto format = parse_format(o.format, RFP_FORMAT_CSV);
  const auto inputs = load_inputs(o);
  const Sink sink(o, ".ingest", format);
  int status = 0;
  for (const auto& in : inputs) {
    char* text = nullptr;
    check(rfp_render_ingest_stats(in.dataset.get(), format, &text));
    sink.write(in.group, take(text));
    if (rfp_dataset_size(in.dataset.get()) == 0) {
      std::cerr << "rfp: no usable records in group " << in.group << '\n';
      status = RFP_ERR_EMPTY;
    }
  }
  return status;
}

int cmd_prevalence(const Options& o) {
  const auto format = parse_format(o.format, RFP_FORMAT_CSV);
  const auto inputs = load_inputs(o);
  const Sink sink(o, ".prevalence", format);
  for (const auto& in : inputs) {
    require_non_empty(in);
    char* text = nullptr;
    check(rfp_render_prevalence(in.dataset.get(), format, &text));
    sink.write(in.group, take(text));
  }
  return 0;
}

int cmd_cluster(const Options& o) {
  const auto format = parse_format(o.format, RFP_FORMAT_JSON);
  const auto method = parse_method(o.method);
  std::optional<rfp_qualification> q;
  if (!o.qualify.empty()) q = parse_qualification(o.qualify, method);
  const auto inputs = load_inputs(o);
  const Sink sink(o, ".fingerprints", format);
  for (const auto& in : inputs) {
    require_non_empty(in);
    const auto fps = cluster_and_select(in, o.cfg, method, q);
    if (rfp_fingerprints_count(fps.get()) == 0) {
      std::cerr << "rfp: warning: no fingerprints in group " << in.group << '\n';
    }
    char* text = nullptr;
    check(rfp_render_fingerprints(fps.get(), &o.cfg, format, o.min_report_size, &text));
    sink.write(in.group, take(text));
  }
  return 0;
}

int cmd_evaluate(const Options& o) {
  const auto format = parse_format(o.format, RFP_FORMAT_CSV);
  const auto method = parse_method(o.method);
  const auto q = parse_qualification(o.qualify, method);
  const auto inputs = load_inputs(o);
  const Sink sink(o, ".summary", format);
  for (const auto& in : inputs) {
    require_non_empty(in);
    const auto fps = cluster_and_select(in, o.cfg, method, q);
    rfp_summary summary{};
    check(rfp_summarize(fps.get(), q, o.cfg.vendor_threshold, &summary));
    char* text = nullptr;
    check(rfp_render_summary(&summary, format, &text));
    sink.write(in.group, take(text));
  }
  return 0;
}

int cmd_compare(const Options& o) {
  const auto format = parse_format(o.format, RFP_FORMAT_CSV);
  const auto inputs = load_inputs(o);
  const Sink sink(o, ".compare", format);
  for (const auto& in : inputs) {
    require_non_empty(in);
    char* text = nullptr;
    check(rfp_render_comparison(in.dataset.get(), &o.cfg, format, &text));
    sink.write(in.group, take(text));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  rfp_config_default(&o.cfg);

  CLI::App app{"Resilient fingerprinting of PE file reports"};
  app.set_version_flag("--version", rfp_version());
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON config file; flags override it");
    sub->add_option("--out", o.out, "Output file, or directory for several inputs");
    sub->add_option("--format", o.format, "csv or json");
  };
  const auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--input", o.inputs, "JSON-lines feed (repeatable)");
    sub->add_option("--group", o.groups, "Group id per input (defaults to file stem)");
    sub->add_flag("--keep-non-pe", o.keep_non_pe, "Do not drop non-PE records");
  };
  const auto add_eval = [&](CLI::App* sub) {
    sub->add_option("--threshold", o.cfg.vendor_threshold, "Vendor flags for Fully Malicious");
    sub->add_option("--min-cluster", o.cfg.min_cluster_size, "Smallest Top-Down cluster kept");
    sub->add_option("--top-sections", o.cfg.top_sections, "Section profiles kept per cluster");
  };

  auto* gen = app.add_subcommand("generate", "Write a synthetic corpus and its ground truth");
  gen->add_option("--spec,--input", o.spec_path, "Synthetic spec JSON");
  gen->add_option("--seed", o.seed, "Override the spec seed");
  gen->add_option("--out", o.out, "Dataset path");

  auto* ingest = app.add_subcommand("ingest-check", "Report ingest statistics");
  add_common(ingest);
  add_inputs(ingest);

  auto* prev = app.add_subcommand("prevalence", "Per-feature redundancy");
  add_common(prev);
  add_inputs(prev);

  auto* clus = app.add_subcommand("cluster", "Emit resilient fingerprints");
  add_common(clus);
  add_inputs(clus);
  add_eval(clus);
  clus->add_option("--method", o.method, "top-down or bottom-up");
  clus->add_option("--qualify", o.qualify, "Keep only fingerprints with this qualification");
  clus->add_option("--min-report-size", o.min_report_size, "Skip smaller fingerprints in output");

  auto* eval = app.add_subcommand("evaluate", "Summarize fingerprints against vendor labels");
  add_common(eval);
  add_inputs(eval);
  add_eval(eval);
  eval->add_option("--method", o.method, "top-down or bottom-up");
  eval->add_option("--qualify", o.qualify, "Qualification to evaluate");

  auto* cmp = app.add_subcommand("compare", "Baselines against both methods");
  add_common(cmp);
  add_inputs(cmp);
  add_eval(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return RFP_ERR_USAGE;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(o, *sub);
    check(rfp_config_validate(&o.cfg));
    if (sub == gen) return cmd_generate(o);
    if (sub == ingest) return cmd_ingest_check(o);
    if (sub == prev) return cmd_prevalence(o);
    if (sub == clus) return cmd_cluster(o);
    if (sub == eval) return cmd_evaluate(o);
    return cmd_compare(o);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "rfp: " << e.what() << '\n';
    return RFP_ERR_INTERNAL;
  }
}
