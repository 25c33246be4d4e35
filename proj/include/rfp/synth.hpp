#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rfp/feed_io.hpp"

namespace rfp {

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  bool operator==(const IntRange&) const = default;
};

/// Parameters for a planted-cluster corpus. Every cluster shares one import
/// list and a handful of invariant sections; each file then gets fresh
/// hashes, names, virtual layout and section count.
struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::string group_id = "synthetic";
  std::int64_t cluster_count = 20;
  IntRange files_per_cluster{50, 50};
  std::int64_t noise_files = 500;
  double mutate_imports_fraction = 0.0;
  IntRange sections_per_file{10, 50};
  IntRange camouflage_copies{12, 15};
  IntRange virtual_size_range{0, 3500};
  IntRange virtual_address_range{100000, 1600000};
  IntRange vendor_flags_malicious{20, 40};
  IntRange vendor_flags_benign{0, 3};
  /// Chance that a cluster file reuses its cluster's tlsh digest.
  double tlsh_shared_fraction = 0.0;
  /// Chance that a cluster file gets benign vendor flags (partial clusters).
  double benign_member_fraction = 0.0;
  /// Share of clusters whose files are all benign (false-positive clusters).
  double benign_cluster_fraction = 0.0;

  std::vector<std::string> violations() const;

  /// Parses the JSON spec format. `seed` is required; other keys default.
  /// Throws Error(Spec).
  static SyntheticSpec from_json(std::string_view text);
  std::string to_json() const;

  bool operator==(const SyntheticSpec&) const = default;
};

struct PlantedCluster {
  std::int64_t id = 0;
  std::string imphash;
  std::vector<std::string> malicious_keys;
  std::vector<std::string> standard_keys;
  std::vector<std::string> camouflage_keys;
  std::vector<std::string> file_ids;
  bool benign = false;

  bool operator==(const PlantedCluster&) const = default;
};

inline constexpr std::int64_t kNoiseCluster = -1;

struct GroundTruth {
  std::uint64_t seed = 0;
  std::map<std::string, std::int64_t> cluster_of;  // file id -> cluster id or kNoiseCluster
  std::vector<PlantedCluster> clusters;
  std::set<std::string> mutated_imports;  // file ids whose import list was perturbed

  std::size_t planted_file_count() const;
  std::string to_json() const;

  bool operator==(const GroundTruth&) const = default;
};

struct SyntheticCorpus {
  Dataset dataset;
  GroundTruth truth;
};

/// Deterministic for a given spec. Throws Error(Spec) on an invalid spec.
SyntheticCorpus generate(const SyntheticSpec& spec);

/// `<dataset>` with its extension replaced by ".truth.json".
std::filesystem::path truth_path_for(const std::filesystem::path& dataset_path);

/// Writes the JSON-lines feed and the ground-truth sidecar. Throws Error(Io).
void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dataset_path);

}  // namespace rfp
