#pragma once

#include <span>
#include <string>

#include "rfp/cluster.hpp"
#include "rfp/evaluation.hpp"
#include "rfp/feed_io.hpp"

namespace rfp {

enum class Format { Csv, Json };

// All emitters are byte-stable: fixed column order, sorted JSON keys,
// '\n' line endings and one-decimal percentages. CSV output starts with a
// header line; JSON output is one object per line.

std::string render_ingest_stats(const IngestStats& stats, Format format);
std::string render_prevalence(const PrevalenceReport& report, Format format);
std::string render_summary(const EvaluationSummary& summary, Format format);
std::string render_comparison(std::span<const ComparisonRow> rows, Format format);

/// Fingerprints smaller than `min_report_size` are left out. The verdict
/// column uses cfg.vendor_threshold.
std::string render_fingerprints(std::span<const ResilientFingerprint> fingerprints,
                                const EvaluationConfig& cfg, Format format,
                                std::size_t min_report_size = 1);

}  // namespace rfp
