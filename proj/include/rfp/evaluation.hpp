#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfp/cluster.hpp"
#include "rfp/feed_io.hpp"
#include "rfp/keys.hpp"

namespace rfp {

enum class Verdict { FullyMalicious, Partial, FalsePositive };

std::string_view to_string(Verdict v);

/// Fully malicious when every member has at least `threshold` vendor flags,
/// false positive when none does, partial otherwise.
Verdict verdict(const ResilientFingerprint& fp, int threshold);
Verdict verdict(const std::map<int, std::size_t>& flag_histogram, int threshold);

/// Vendor flag count -> number of member files.
std::map<int, std::size_t> flag_histogram(std::span<const FileReport* const> members);

/// Per-fingerprint input to summarize(): verdict and redundancy (member count).
struct FingerprintTally {
  Verdict verdict = Verdict::FalsePositive;
  std::size_t redundancy = 0;
};

struct EvaluationSummary {
  Qualification qualification = Qualification::ILRS;
  std::size_t fingerprint_count = 0;
  std::size_t fp_count = 0;
  Percent fp_accuracy;
  std::size_t fp_redundancy = 0;
  std::size_t partial_count = 0;
  std::size_t full_count = 0;
  Percent tp_accuracy;
  std::size_t tp_redundancy = 0;
  /// Distinct files across true-positive fingerprints. Equals tp_redundancy
  /// when fingerprints do not overlap (Top-Down).
  std::size_t tp_distinct_files = 0;
  /// No member files at all; both accuracies are 0.0.
  bool empty_result = true;

  bool operator==(const EvaluationSummary&) const = default;
};

/// File-weighted accuracy split. fp is rounded half-up to one decimal and
/// tp is its complement, so the two always add up to exactly 100.0.
std::pair<Percent, Percent> accuracy_split(std::size_t fp_redundancy, std::size_t tp_redundancy);

/// Tallies carry no member ids, so tp_distinct_files is set to tp_redundancy.
EvaluationSummary summarize(std::span<const FingerprintTally> tallies, Qualification q);

/// `fingerprints` should already be filtered with select(·, q).
EvaluationSummary summarize(std::span<const ResilientFingerprint> fingerprints, Qualification q,
                            int threshold);

struct ComparisonRow {
  std::string technique;  // SHA256, TLSH, TopDown, BottomUp
  std::size_t files_identified = 0;
  Percent accuracy;

  bool operator==(const ComparisonRow&) const = default;
};

/// Four rows in fixed order. Resilient rows count distinct true-positive
/// files over the full dataset size.
std::vector<ComparisonRow> comparison_table(const Dataset& dataset, const EvaluationSummary& top_down,
                                            const EvaluationSummary& bottom_up);

/// Runs both methods with IL_CS_or_MS / CS_or_MS and builds the table.
std::vector<ComparisonRow> compare(const Dataset& dataset, const EvaluationConfig& cfg);

enum class PrevalenceFeature { SHA256, TLSH, ImportList, Sections, Resources };

std::string_view to_string(PrevalenceFeature f);

struct PrevalenceRow {
  PrevalenceFeature feature = PrevalenceFeature::SHA256;
  std::size_t population = 0;
  std::size_t redundancy = 0;
  Percent redundancy_pct;

  bool operator==(const PrevalenceRow&) const = default;
};

struct PrevalenceReport {
  std::vector<PrevalenceRow> rows;
};

/// N - U redundancy per feature. Sections and resources are counted over
/// their own populations, not per file.
PrevalenceReport prevalence(const Dataset& dataset);

}  // namespace rfp
