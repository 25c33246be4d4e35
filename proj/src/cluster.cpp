#include "rfp/cluster.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "rfp/error.hpp"
#include "rfp/evaluation.hpp"
#include "rfp/taxonomy.hpp"

namespace rfp {
namespace {

constexpr std::uint32_t kNoFile = UINT32_MAX;

struct SectionAccumulator {
  std::size_t occurrences = 0;
  std::size_t distinct_files = 0;
  std::uint32_t last_file = kNoFile;
  double entropy_min = 0.0, entropy_max = 0.0;
  double chi2_min = 0.0, chi2_max = 0.0;
  const SectionRecord* first = nullptr;
  std::vector<std::uint32_t> files;  // only filled when tracking membership

  void add(const SectionRecord& s, std::uint32_t file, bool track_files) {
    if (occurrences == 0) {
      first = &s;
      entropy_min = entropy_max = s.entropy;
      chi2_min = chi2_max = s.chi2;
    } else {
      entropy_min = std::min(entropy_min, s.entropy);
      entropy_max = std::max(entropy_max, s.entropy);
      chi2_min = std::min(chi2_min, s.chi2);
      chi2_max = std::max(chi2_max, s.chi2);
    }
    ++occurrences;
    if (file != last_file) {
      ++distinct_files;
      last_file = file;
      if (track_files) files.push_back(file);
    }
  }

  SectionGroupStats stats(std::string_view key, const EvaluationConfig& cfg) const {
    SectionGroupStats out;
    out.sec_key = SecKey(std::string(key));
    out.label = classify(*first, cfg);
    out.occurrence_count = occurrences;
    out.distinct_file_count = distinct_files;
    out.entropy_min = entropy_min;
    out.entropy_max = entropy_max;
    out.chi2_min = chi2_min;
    out.chi2_max = chi2_max;
    return out;
  }
};

bool by_count_then_key(std::size_t count_a, std::string_view key_a, std::size_t count_b,
                       std::string_view key_b) {
  if (count_a != count_b) return count_a > count_b;
  return key_a < key_b;
}

std::vector<const FileReport*> resolve(const Dataset& ds, std::span<const std::uint32_t> idx) {
  std::vector<const FileReport*> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(&ds.reports[i]);
  return out;
}

std::vector<std::string> ids_of(std::span<const FileReport* const> members) {
  std::vector<std::string> out;
  out.reserve(members.size());
  for (const auto* r : members) out.push_back(r->file_id);
  return out;
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::TopDown ? "top-down" : "bottom-up";
}

std::optional<Method> parse_method(std::string_view text) {
  const auto t = to_lower(text);
  if (t == "top-down" || t == "topdown") return Method::TopDown;
  if (t == "bottom-up" || t == "bottomup") return Method::BottomUp;
  return std::nullopt;
}

std::vector<std::string> QualificationSet::names() const {
  std::vector<std::string> out;
  if (redundant) out.emplace_back("RS");
  if (camouflage) out.emplace_back("CS");
  if (malicious) out.emplace_back("MS");
  return out;
}

std::string_view to_string(Qualification q) {
  switch (q) {
    case Qualification::ILRS: return "ILRS";
    case Qualification::ILCS: return "ILCS";
    case Qualification::ILMS: return "ILMS";
    case Qualification::ILCSMS: return "ILCSMS";
    case Qualification::IL_CS_or_MS: return "IL_CS_or_MS";
    case Qualification::RS: return "RS";
    case Qualification::CS: return "CS";
    case Qualification::MS: return "MS";
    case Qualification::CS_or_MS: return "CS_or_MS";
  }
  return "RS";
}

std::optional<Qualification> parse_qualification(std::string_view text) {
  const auto t = to_lower(text);
  if (t == "ilrs") return Qualification::ILRS;
  if (t == "ilcs") return Qualification::ILCS;
  if (t == "ilms") return Qualification::ILMS;
  if (t == "ilcsms") return Qualification::ILCSMS;
  if (t == "il_cs_or_ms" || t == "ilcs(or)ms") return Qualification::IL_CS_or_MS;
  if (t == "rs") return Qualification::RS;
  if (t == "cs") return Qualification::CS;
  if (t == "ms" || t == "mc") return Qualification::MS;
  if (t == "cs_or_ms" || t == "cs(or)ms") return Qualification::CS_or_MS;
  return std::nullopt;
}

Method required_method(Qualification q) {
  switch (q) {
    case Qualification::ILRS:
    case Qualification::ILCS:
    case Qualification::ILMS:
    case Qualification::ILCSMS:
    case Qualification::IL_CS_or_MS:
      return Method::TopDown;
    default:
      return Method::BottomUp;
  }
}

std::vector<SectionGroupStats> group_sections(std::span<const FileReport* const> members,
                                              const EvaluationConfig& cfg) {
  std::unordered_map<std::string_view, SectionAccumulator> groups;
  for (std::uint32_t i = 0; i < members.size(); ++i) {
    for (const auto& s : members[i]->sections) groups[s.content_hash].add(s, i, false);
  }
  std::vector<SectionGroupStats> out;
  out.reserve(groups.size());
  for (const auto& [key, acc] : groups) out.push_back(acc.stats(key, cfg));
  std::sort(out.begin(), out.end(), [](const SectionGroupStats& a, const SectionGroupStats& b) {
    return by_count_then_key(a.occurrence_count, a.sec_key.digest(), b.occurrence_count,
                                   b.sec_key.digest());
  });
  return out;
}

FileStats compute_file_stats(std::span<const FileReport* const> members) {
  FileStats st;
  st.file_count = members.size();
  if (members.empty()) return st;
  std::unordered_set<std::string_view> shas;
  st.size_min = st.size_max = members.front()->size_bytes;
  for (const auto* r : members) {
    shas.insert(r->sha256);
    st.size_min = std::min(st.size_min, r->size_bytes);
    st.size_max = std::max(st.size_max, r->size_bytes);
  }
  st.distinct_sha256 = shas.size();
  st.vendor_flag_histogram = flag_histogram(members);
  return st;
}

QualificationSet qualify_cluster(std::span<const SectionGroupStats> groups) {
  QualificationSet q;
  for (const auto& g : groups) {
    if (g.distinct_file_count < 2) continue;
    q.redundant = true;
    if (g.label == SectionLabel::Camouflage) q.camouflage = true;
    if (g.label == SectionLabel::Malicious) q.malicious = true;
  }
  return q;
}

std::vector<ResilientFingerprint> top_down(const Dataset& dataset, const EvaluationConfig& cfg) {
  std::unordered_map<std::string, std::vector<std::uint32_t>> by_imphash;
  for (std::uint32_t i = 0; i < dataset.reports.size(); ++i) {
    const auto& r = dataset.reports[i];
    if (!r.has_imports()) continue;
    by_imphash[imphash(r.imports).digest()].push_back(i);
  }

  std::vector<std::pair<std::string_view, const std::vector<std::uint32_t>*>> groups;
  for (const auto& [key, members] : by_imphash) {
    if (members.size() >= cfg.min_cluster_size) groups.emplace_back(key, &members);
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return by_count_then_key(a.second->size(), a.first, b.second->size(), b.first);
  });

  std::vector<ResilientFingerprint> out;
  out.reserve(groups.size());
  for (const auto& [key, idx] : groups) {
    const auto members = resolve(dataset, *idx);
    ResilientFingerprint fp;
    fp.method = Method::TopDown;
    fp.key = std::string(key);
    fp.file_ids = ids_of(members);
    fp.file_stats = compute_file_stats(members);
    auto sections = group_sections(members, cfg);
    fp.qualifications = qualify_cluster(sections);
    if (sections.size() > cfg.top_sections) sections.resize(cfg.top_sections);
    fp.section_profiles = std::move(sections);
    out.push_back(std::move(fp));
  }
  return out;
}

std::vector<ResilientFingerprint> bottom_up(const Dataset& dataset, const EvaluationConfig& cfg) {
  std::size_t total_sections = 0;
  for (const auto& r : dataset.reports) total_sections += r.sections.size();

  std::unordered_map<std::string_view, SectionAccumulator> groups;
  groups.reserve(total_sections);
  for (std::uint32_t i = 0; i < dataset.reports.size(); ++i) {
    for (const auto& s : dataset.reports[i].sections) groups[s.content_hash].add(s, i, true);
  }

  std::vector<std::pair<std::string_view, const SectionAccumulator*>> kept;
  for (const auto& [key, acc] : groups) {
    if (acc.distinct_files >= cfg.min_cluster_size) kept.emplace_back(key, &acc);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return by_count_then_key(a.second->occurrences, a.first, b.second->occurrences, b.first);
  });

  std::vector<ResilientFingerprint> out;
  out.reserve(kept.size());
  for (const auto& [key, acc] : kept) {
    const auto members = resolve(dataset, acc->files);
    ResilientFingerprint fp;
    fp.method = Method::BottomUp;
    fp.key = std::string(key);
    fp.file_ids = ids_of(members);
    fp.file_stats = compute_file_stats(members);
    const auto stats = acc->stats(key, cfg);
    fp.qualifications.redundant = true;
    fp.qualifications.camouflage = stats.label == SectionLabel::Camouflage;
    fp.qualifications.malicious = stats.label == SectionLabel::Malicious;
    fp.section_profiles.push_back(stats);
    out.push_back(std::move(fp));
  }
  return out;
}

std::vector<ResilientFingerprint> cluster(const Dataset& dataset, const EvaluationConfig& cfg,
                                          Method method) {
  return method == Method::TopDown ? top_down(dataset, cfg) : bottom_up(dataset, cfg);
}

std::vector<ResilientFingerprint> select(std::span<const ResilientFingerprint> fingerprints,
                                         Qualification q) {
  const Method needed = required_method(q);
  for (const auto& fp : fingerprints) {
    if (fp.method != needed) {
      throw Error(ErrorKind::Usage, std::string("qualification ") + std::string(to_string(q)) +
                                        " requires " + std::string(to_string(needed)) +
                                        " fingerprints");
    }
  }

  auto keep = [&](auto&& pred) {
    std::vector<ResilientFingerprint> out;
    for (const auto& fp : fingerprints) {
      if (pred(fp.qualifications)) out.push_back(fp);
    }
    return out;
  };

  switch (q) {
    case Qualification::ILRS:
    case Qualification::RS:
      return keep([](const QualificationSet& s) { return s.redundant; });
    case Qualification::ILCS:
    case Qualification::CS:
      return keep([](const QualificationSet& s) { return s.camouflage; });
    case Qualification::ILMS:
    case Qualification::MS:
      return keep([](const QualificationSet& s) { return s.malicious; });
    case Qualification::ILCSMS:
      return keep([](const QualificationSet& s) { return s.camouflage && s.malicious; });
    case Qualification::IL_CS_or_MS:
      return keep([](const QualificationSet& s) { return s.camouflage || s.malicious; });
    case Qualification::CS_or_MS: {
      auto out = keep([](const QualificationSet& s) { return s.camouflage; });
      auto ms = keep([](const QualificationSet& s) { return s.malicious; });
      out.insert(out.end(), std::make_move_iterator(ms.begin()), std::make_move_iterator(ms.end()));
      return out;
    }
  }
  return {};
}

}  // namespace rfp
