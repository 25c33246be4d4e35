#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfp/feed_io.hpp"
#include "rfp/keys.hpp"
#include "rfp/model.hpp"

namespace rfp {

enum class Method { TopDown, BottomUp };

std::string_view to_string(Method method);  // "top-down" / "bottom-up"
std::optional<Method> parse_method(std::string_view text);

/// Section-level qualification tags attached to a fingerprint.
struct QualificationSet {
  bool redundant = false;   // RS
  bool camouflage = false;  // CS
  bool malicious = false;   // MS

  bool empty() const { return !redundant && !camouflage && !malicious; }
  /// Tag names in fixed order: RS, CS, MS.
  std::vector<std::string> names() const;

  bool operator==(const QualificationSet&) const = default;
};

/// Filters applied to a fingerprint list. IL* apply to Top-Down output,
/// the rest to Bottom-Up output.
enum class Qualification { ILRS, ILCS, ILMS, ILCSMS, IL_CS_or_MS, RS, CS, MS, CS_or_MS };

std::string_view to_string(Qualification q);
/// Case-insensitive; also accepts the "ILCS(or)MS" / "CS(or)MS" spellings.
std::optional<Qualification> parse_qualification(std::string_view text);
Method required_method(Qualification q);

struct SectionGroupStats {
  SecKey sec_key{""};
  SectionLabel label = SectionLabel::Standard;
  std::size_t occurrence_count = 0;
  std::size_t distinct_file_count = 0;
  double entropy_min = 0.0;
  double entropy_max = 0.0;
  double chi2_min = 0.0;
  double chi2_max = 0.0;

  bool operator==(const SectionGroupStats&) const = default;
};

struct FileStats {
  std::size_t file_count = 0;
  std::size_t distinct_sha256 = 0;
  std::uint64_t size_min = 0;
  std::uint64_t size_max = 0;
  std::map<int, std::size_t> vendor_flag_histogram;

  bool operator==(const FileStats&) const = default;
};

struct ResilientFingerprint {
  Method method = Method::TopDown;
  std::string key;                    // imphash digest or section digest
  std::vector<std::string> file_ids;  // distinct, dataset order
  FileStats file_stats;
  std::vector<SectionGroupStats> section_profiles;  // by occurrence, descending
  QualificationSet qualifications;

  /// Number of member files.
  std::size_t redundancy() const { return file_ids.size(); }

  bool operator==(const ResilientFingerprint&) const = default;
};

/// Groups the files of `members` by section key. Result is sorted by
/// occurrence count descending, ties by key ascending. The label of a group
/// comes from its first occurrence.
std::vector<SectionGroupStats> group_sections(std::span<const FileReport* const> members,
                                              const EvaluationConfig& cfg);

FileStats compute_file_stats(std::span<const FileReport* const> members);

/// Import-list clustering: one fingerprint per imphash shared by at least
/// cfg.min_cluster_size files. Files without imports are never clustered.
std::vector<ResilientFingerprint> top_down(const Dataset& dataset, const EvaluationConfig& cfg);

/// Section clustering: one fingerprint per section key present in at least
/// cfg.min_cluster_size distinct files. Fingerprints may overlap.
std::vector<ResilientFingerprint> bottom_up(const Dataset& dataset, const EvaluationConfig& cfg);

std::vector<ResilientFingerprint> cluster(const Dataset& dataset, const EvaluationConfig& cfg,
                                          Method method);

/// RS if any key spans two or more files; CS / MS if such a redundant key is
/// Camouflage / Malicious.
QualificationSet qualify_cluster(std::span<const SectionGroupStats> groups);

/// Throws Error(Usage) when a fingerprint's method does not match `q`.
std::vector<ResilientFingerprint> select(std::span<const ResilientFingerprint> fingerprints,
                                         Qualification q);

}  // namespace rfp
