#include "rfp/evaluation.hpp"

#include <tuple>
#include <unordered_set>

namespace rfp {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::FullyMalicious: return "FullyMalicious";
    case Verdict::Partial: return "Partial";
    case Verdict::FalsePositive: return "FalsePositive";
  }
  return "FalsePositive";
}

Verdict verdict(const std::map<int, std::size_t>& flag_histogram, int threshold) {
  bool any_malicious = false;
  bool any_benign = false;
  for (const auto& [flags, files] : flag_histogram) {
    if (files == 0) continue;
    (flags >= threshold ? any_malicious : any_benign) = true;
  }
  if (any_malicious && !any_benign) return Verdict::FullyMalicious;
  if (any_malicious) return Verdict::Partial;
  return Verdict::FalsePositive;
}

Verdict verdict(const ResilientFingerprint& fp, int threshold) {
  return verdict(fp.file_stats.vendor_flag_histogram, threshold);
}

std::map<int, std::size_t> flag_histogram(std::span<const FileReport* const> members) {
  std::map<int, std::size_t> hist;
  for (const auto* r : members) ++hist[r->vendor_malicious_count];
  return hist;
}

std::pair<Percent, Percent> accuracy_split(std::size_t fp_redundancy, std::size_t tp_redundancy) {
  const std::size_t total = fp_redundancy + tp_redundancy;
  if (total == 0) return {Percent{}, Percent{}};
  const Percent fp = Percent::ratio(fp_redundancy, total);
  return {fp, Percent::from_tenths(1000 - fp.tenths())};
}

EvaluationSummary summarize(std::span<const FingerprintTally> tallies, Qualification q) {
  EvaluationSummary s;
  s.qualification = q;
  s.fingerprint_count = tallies.size();
  for (const auto& t : tallies) {
    switch (t.verdict) {
      case Verdict::FalsePositive:
        ++s.fp_count;
        s.fp_redundancy += t.redundancy;
        break;
      case Verdict::Partial:
        ++s.partial_count;
        s.tp_redundancy += t.redundancy;
        break;
      case Verdict::FullyMalicious:
        ++s.full_count;
        s.tp_redundancy += t.redundancy;
        break;
    }
  }
  s.tp_distinct_files = s.tp_redundancy;
  s.empty_result = s.fp_redundancy + s.tp_redundancy == 0;
  std::tie(s.fp_accuracy, s.tp_accuracy) = accuracy_split(s.fp_redundancy, s.tp_redundancy);
  return s;
}

EvaluationSummary summarize(std::span<const ResilientFingerprint> fingerprints, Qualification q,
                            int threshold) {
  std::vector<FingerprintTally> tallies;
  tallies.reserve(fingerprints.size());
  std::unordered_set<std::string_view> tp_files;
  for (const auto& fp : fingerprints) {
    const Verdict v = verdict(fp, threshold);
    tallies.push_back({v, fp.redundancy()});
    if (v != Verdict::FalsePositive) tp_files.insert(fp.file_ids.begin(), fp.file_ids.end());
  }
  EvaluationSummary s = summarize(tallies, q);
  s.tp_distinct_files = tp_files.size();
  return s;
}

std::vector<ComparisonRow> comparison_table(const Dataset& dataset, const EvaluationSummary& top_down,
                                            const EvaluationSummary& bottom_up) {
  std::vector<ComparisonRow> rows;
  for (auto sel : {KeySelector::SHA256, KeySelector::TLSH}) {
    const auto b = baseline_row(dataset, sel);
    rows.push_back({std::string(to_string(sel)), b.files_identified, b.accuracy});
  }
  rows.push_back({"TopDown", top_down.tp_distinct_files,
                  Percent::ratio(top_down.tp_distinct_files, dataset.size())});
  rows.push_back({"BottomUp", bottom_up.tp_distinct_files,
                  Percent::ratio(bottom_up.tp_distinct_files, dataset.size())});
  return rows;
}

std::vector<ComparisonRow> compare(const Dataset& dataset, const EvaluationConfig& cfg) {
  const auto td = select(top_down(dataset, cfg), Qualification::IL_CS_or_MS);
  const auto bu = select(bottom_up(dataset, cfg), Qualification::CS_or_MS);
  return comparison_table(dataset,
                          summarize(td, Qualification::IL_CS_or_MS, cfg.vendor_threshold),
                          summarize(bu, Qualification::CS_or_MS, cfg.vendor_threshold));
}

std::string_view to_string(PrevalenceFeature f) {
  switch (f) {
    case PrevalenceFeature::SHA256: return "SHA256";
    case PrevalenceFeature::TLSH: return "TLSH";
    case PrevalenceFeature::ImportList: return "ImportList";
    case PrevalenceFeature::Sections: return "Sections";
    case PrevalenceFeature::Resources: return "Resources";
  }
  return "SHA256";
}

PrevalenceReport prevalence(const Dataset& dataset) {
  std::vector<std::string_view> sha, tlsh, sections, resources;
  std::vector<std::string> imphashes;
  for (const auto& r : dataset.reports) {
    sha.push_back(r.sha256);
    if (r.tlsh) tlsh.push_back(*r.tlsh);
    if (r.has_imports()) imphashes.push_back(imphash(r.imports).digest());
    for (const auto& s : r.sections) sections.push_back(s.content_hash);
    for (const auto& res : r.resources) resources.push_back(res.content_hash);
  }

  PrevalenceReport report;
  auto add = [&](PrevalenceFeature f, std::size_t population, std::size_t redundancy) {
    report.rows.push_back({f, population, redundancy, Percent::ratio(redundancy, population)});
  };
  add(PrevalenceFeature::SHA256, sha.size(), redundancy_exact(std::span<const std::string_view>(sha)));
  add(PrevalenceFeature::TLSH, tlsh.size(), redundancy_exact(std::span<const std::string_view>(tlsh)));
  add(PrevalenceFeature::ImportList, imphashes.size(),
      redundancy_exact(std::span<const std::string>(imphashes)));
  add(PrevalenceFeature::Sections, sections.size(),
      redundancy_exact(std::span<const std::string_view>(sections)));
  add(PrevalenceFeature::Resources, resources.size(),
      redundancy_exact(std::span<const std::string_view>(resources)));
  return report;
}

}  // namespace rfp
