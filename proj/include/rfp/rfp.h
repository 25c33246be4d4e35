/*
 * rfp: resilient fingerprinting of PE file reports.
 *
 * C interface over the clustering and evaluation core. Objects are opaque
 * handles owned by the caller and released with the matching *_free call.
 * Every fallible call returns an rfp_status; on failure a description is
 * available from rfp_last_error() on the same thread until the next call.
 * Strings returned through `char**` out-parameters are heap-allocated and
 * must be released with rfp_string_free().
 */
#ifndef RFP_RFP_H
#define RFP_RFP_H

#include <stddef.h>
#include <stdint.h>

#if defined(RFP_BUILDING_LIBRARY)
#define RFP_API __attribute__((visibility("default")))
#else
#define RFP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum rfp_status {
  RFP_OK = 0,
  RFP_ERR_INTERNAL = 1,
  RFP_ERR_USAGE = 2,      /* bad argument, configuration or spec */
  RFP_ERR_EMPTY = 3,      /* operation needs a non-empty dataset */
  RFP_ERR_IO = 4,
  RFP_ERR_NO_IMPORTS = 5
} rfp_status;

typedef enum rfp_method { RFP_TOP_DOWN = 0, RFP_BOTTOM_UP = 1 } rfp_method;

typedef enum rfp_qualification {
  RFP_Q_ILRS = 0,
  RFP_Q_ILCS,
  RFP_Q_ILMS,
  RFP_Q_ILCSMS,
  RFP_Q_IL_CS_OR_MS,
  RFP_Q_RS,
  RFP_Q_CS,
  RFP_Q_MS,
  RFP_Q_CS_OR_MS
} rfp_qualification;

typedef enum rfp_format { RFP_FORMAT_CSV = 0, RFP_FORMAT_JSON = 1 } rfp_format;

typedef enum rfp_section_label {
  RFP_SECTION_MALICIOUS = 0,
  RFP_SECTION_STANDARD = 1,
  RFP_SECTION_CAMOUFLAGE = 2
} rfp_section_label;

typedef enum rfp_verdict {
  RFP_VERDICT_FULLY_MALICIOUS = 0,
  RFP_VERDICT_PARTIAL = 1,
  RFP_VERDICT_FALSE_POSITIVE = 2
} rfp_verdict;

/* Qualification bits reported per fingerprint. */
#define RFP_QUAL_RS 0x1u
#define RFP_QUAL_CS 0x2u
#define RFP_QUAL_MS 0x4u

typedef struct rfp_config {
  int vendor_threshold;          /* default 4 */
  size_t min_cluster_size;       /* default 2 */
  size_t top_sections;           /* default 10 */
  double entropy_malicious;      /* default 5.0 */
  uint64_t camouflage_max_raw;   /* default 4096 */
  double camouflage_entropy_eps; /* default 1e-9 */
} rfp_config;

typedef struct rfp_ingest_stats {
  size_t lines_read;
  size_t accepted;
  size_t skipped_malformed;
  size_t skipped_non_pe;
  size_t missing_imports;
  size_t missing_tlsh;
} rfp_ingest_stats;

/* Percentages are carried as integer tenths (68 == 6.8%). */
typedef struct rfp_summary {
  rfp_qualification qualification;
  size_t fingerprint_count;
  size_t fp_count;
  int64_t fp_accuracy_tenths;
  size_t fp_redundancy;
  size_t partial_count;
  size_t full_count;
  int64_t tp_accuracy_tenths;
  size_t tp_redundancy;
  size_t tp_distinct_files;
  int empty_result;
} rfp_summary;

typedef struct rfp_fingerprint_info {
  rfp_method method;
  const char* key; /* valid until the owning rfp_fingerprints is freed */
  size_t redundancy;
  unsigned qualifications; /* RFP_QUAL_* bits */
} rfp_fingerprint_info;

typedef struct rfp_dataset rfp_dataset;
typedef struct rfp_fingerprints rfp_fingerprints;

RFP_API const char* rfp_version(void);
RFP_API const char* rfp_last_error(void);
RFP_API const char* rfp_status_name(rfp_status status);
RFP_API void rfp_string_free(char* str);

RFP_API void rfp_config_default(rfp_config* out);
RFP_API rfp_status rfp_config_validate(const rfp_config* cfg);

RFP_API rfp_status rfp_parse_method(const char* text, rfp_method* out);
RFP_API rfp_status rfp_parse_qualification(const char* text, rfp_qualification* out);
RFP_API const char* rfp_qualification_name(rfp_qualification q);
/* RFP_TOP_DOWN for the IL* qualifications, RFP_BOTTOM_UP otherwise. */
RFP_API rfp_method rfp_qualification_method(rfp_qualification q);

/* Feed ingestion. A dataset with zero accepted records is returned with
 * RFP_OK; check rfp_dataset_size(). */
RFP_API rfp_status rfp_dataset_load(const char* path, const char* group_id, int filter_pe,
                                    rfp_dataset** out);
RFP_API rfp_status rfp_dataset_parse(const char* text, size_t length, const char* group_id,
                                     int filter_pe, rfp_dataset** out);
RFP_API void rfp_dataset_free(rfp_dataset* dataset);
RFP_API size_t rfp_dataset_size(const rfp_dataset* dataset);
RFP_API rfp_status rfp_dataset_ingest_stats(const rfp_dataset* dataset, rfp_ingest_stats* out);

/* Keys and taxonomy. `imports_json` is the feed's `imports` array. */
RFP_API rfp_status rfp_imphash(const char* imports_json, char out_hex[65]);
RFP_API rfp_status rfp_classify_section(double entropy, uint64_t raw_size, const rfp_config* cfg,
                                        rfp_section_label* out);

/* Clustering. */
RFP_API rfp_status rfp_cluster(const rfp_dataset* dataset, const rfp_config* cfg,
                               rfp_method method, rfp_fingerprints** out);
RFP_API rfp_status rfp_select(const rfp_fingerprints* fingerprints, rfp_qualification q,
                              rfp_fingerprints** out);
RFP_API void rfp_fingerprints_free(rfp_fingerprints* fingerprints);
RFP_API size_t rfp_fingerprints_count(const rfp_fingerprints* fingerprints);
RFP_API rfp_status rfp_fingerprint_get(const rfp_fingerprints* fingerprints, size_t index,
                                       rfp_fingerprint_info* out);
RFP_API rfp_status rfp_fingerprint_verdict(const rfp_fingerprints* fingerprints, size_t index,
                                           int threshold, rfp_verdict* out);

/* Evaluation. */
RFP_API rfp_status rfp_summarize(const rfp_fingerprints* fingerprints, rfp_qualification q,
                                 int threshold, rfp_summary* out);

/* Report rendering (byte-stable CSV or JSON lines). */
RFP_API rfp_status rfp_render_ingest_stats(const rfp_dataset* dataset, rfp_format format,
                                           char** out);
RFP_API rfp_status rfp_render_prevalence(const rfp_dataset* dataset, rfp_format format,
                                         char** out);
RFP_API rfp_status rfp_render_fingerprints(const rfp_fingerprints* fingerprints,
                                           const rfp_config* cfg, rfp_format format,
                                           size_t min_report_size, char** out);
RFP_API rfp_status rfp_render_summary(const rfp_summary* summary, rfp_format format, char** out);
RFP_API rfp_status rfp_render_comparison(const rfp_dataset* dataset, const rfp_config* cfg,
                                         rfp_format format, char** out);

/* Synthetic corpus: writes `out_path` and its ".truth.json" sidecar. When
 * `seed_override` is non-NULL it replaces the spec's seed. */
RFP_API rfp_status rfp_generate(const char* spec_json, const uint64_t* seed_override,
                                const char* out_path);
RFP_API rfp_status rfp_truth_path(const char* dataset_path, char** out);

#ifdef __cplusplus
}
#endif

#endif /* RFP_RFP_H */
