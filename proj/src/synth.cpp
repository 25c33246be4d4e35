#include "rfp/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "digest.hpp"
#include "rfp/error.hpp"
#include "rfp/keys.hpp"

namespace rfp {
namespace {

using json = nlohmann::json;

// Platform-independent draws on top of mt19937_64 (whose output sequence is
// fixed by the standard, unlike the std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  std::int64_t uniform(const IntRange& r) { return uniform(r.lo, r.hi); }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double real(double lo, double hi) { return lo + (hi - lo) * unit(); }

  bool chance(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(i) - 1))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kNoiseStream = 1ULL << 40;
constexpr std::uint64_t kShuffleStream = (1ULL << 40) + 1;
constexpr std::int64_t kEpochBase = 1672531200;  // 2023-01-01T00:00:00Z

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string tag(std::uint64_t seed, std::string_view kind, std::uint64_t a, std::uint64_t b = 0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%llu/%.*s/%llu/%llu", static_cast<unsigned long long>(seed),
                static_cast<int>(kind.size()), kind.data(), static_cast<unsigned long long>(a),
                static_cast<unsigned long long>(b));
  return buf;
}

std::string tlsh_digest(std::string_view source) {
  auto hex = detail::sha256_hex(source) + detail::sha256_hex(std::string(source) + "#");
  std::transform(hex.begin(), hex.end(), hex.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return "T1" + hex.substr(0, 70);
}

struct ApiLibrary {
  const char* name;
  std::array<const char*, 8> functions;
};

constexpr std::array<ApiLibrary, 6> kApiPool{{
    {"KERNEL32.dll",
     {"GetProcAddress", "LoadLibraryA", "VirtualAlloc", "CreateFileW", "WriteFile", "ReadFile",
      "CloseHandle", "GetModuleHandleW"}},
    {"USER32.dll",
     {"MessageBoxW", "GetWindowTextW", "FindWindowA", "SendMessageW", "GetDC", "ShowWindow",
      "SetWindowsHookExW", "GetAsyncKeyState"}},
    {"ADVAPI32.dll",
     {"RegOpenKeyExW", "RegSetValueExW", "RegCloseKey", "OpenProcessToken", "CryptAcquireContextW",
      "CryptEncrypt", "StartServiceW", "CreateServiceW"}},
    {"WS2_32.dll",
     {"WSAStartup", "socket", "connect", "send", "recv", "closesocket", "gethostbyname", "inet_addr"}},
    {"SHELL32.dll",
     {"ShellExecuteW", "SHGetFolderPathW", "SHFileOperationW", "DragQueryFileW", "ExtractIconW",
      "SHGetSpecialFolderPathW", "CommandLineToArgvW", "Shell_NotifyIconW"}},
    {"WININET.dll",
     {"InternetOpenW", "InternetOpenUrlW", "InternetReadFile", "HttpSendRequestW",
      "InternetConnectW", "HttpOpenRequestW", "InternetCloseHandle", "InternetSetOptionW"}},
}};

std::vector<ImportLibrary> draw_import_list(Rng& rng, std::string_view unique_fn) {
  std::vector<std::size_t> libs(kApiPool.size());
  for (std::size_t i = 0; i < libs.size(); ++i) libs[i] = i;
  rng.shuffle(libs);
  const auto lib_count = static_cast<std::size_t>(rng.uniform(2, 4));
  std::vector<ImportLibrary> out;
  for (std::size_t i = 0; i < lib_count; ++i) {
    const auto& pool = kApiPool[libs[i]];
    std::vector<std::string> fns(pool.functions.begin(), pool.functions.end());
    rng.shuffle(fns);
    fns.resize(static_cast<std::size_t>(rng.uniform(2, 6)));
    out.push_back({pool.name, std::move(fns)});
  }
  out.front().functions.emplace_back(unique_fn);
  return out;
}

std::string random_section_name(Rng& rng) {
  std::string name = ".";
  const auto len = rng.uniform(1, 7);
  for (std::int64_t i = 0; i < len; ++i) name.push_back(static_cast<char>('a' + rng.uniform(0, 25)));
  return name;
}

FileType draw_file_type(Rng& rng) {
  const double u = rng.unit();
  if (u < 0.63) return FileType::Win32EXE;
  if (u < 0.82) return FileType::Win32DLL;
  if (u < 0.92) return FileType::Win64EXE;
  return FileType::Win64DLL;
}

// Content-level identity of a planted section; layout fields vary per file.
struct PlantedSection {
  std::string key;
  double entropy;
  double chi2;
  std::uint64_t raw_size;
  SectionFlags flags;
};

class Builder {
 public:
  explicit Builder(const SyntheticSpec& spec) : spec_(spec) {}

  SyntheticCorpus run() {
    SyntheticCorpus corpus;
    corpus.truth.seed = spec_.seed;
    corpus.dataset.group_id = spec_.group_id;

    const auto benign_clusters = static_cast<std::int64_t>(
        std::floor(spec_.benign_cluster_fraction * static_cast<double>(spec_.cluster_count) + 0.5));
    for (std::int64_t c = 0; c < spec_.cluster_count; ++c) {
      const bool benign = c >= spec_.cluster_count - benign_clusters;
      build_cluster(c, benign, corpus);
    }
    Rng noise_rng(mix(spec_.seed, kNoiseStream));
    for (std::int64_t i = 0; i < spec_.noise_files; ++i) {
      auto report = build_noise_file(noise_rng);
      corpus.truth.cluster_of[report.file_id] = kNoiseCluster;
      corpus.dataset.reports.push_back(std::move(report));
    }

    Rng shuffle_rng(mix(spec_.seed, kShuffleStream));
    shuffle_rng.shuffle(corpus.dataset.reports);

    auto& stats = corpus.dataset.ingest_stats;
    stats.lines_read = stats.accepted = corpus.dataset.reports.size();
    for (const auto& r : corpus.dataset.reports) {
      if (!r.has_imports()) ++stats.missing_imports;
      if (!r.tlsh) ++stats.missing_tlsh;
    }
    return corpus;
  }

 private:
  std::uint64_t next_file() { return file_counter_++; }

  std::string file_id(std::uint64_t n) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-%07llu", static_cast<unsigned long long>(n));
    return spec_.group_id + buf;
  }

  PlantedSection plant(Rng& rng, std::int64_t cluster, std::string_view role, std::size_t index) {
    PlantedSection p;
    p.key = detail::md5_hex(tag(spec_.seed, std::string("section/") + std::string(role),
                                static_cast<std::uint64_t>(cluster), index));
    if (role == "malicious") {
      p.entropy = round2(rng.real(5.1, 7.99));
      p.raw_size = static_cast<std::uint64_t>(rng.uniform(8, 512)) * 512;
      p.flags = {true, false, true};
    } else if (role == "standard") {
      p.entropy = round2(rng.real(2.0, 4.5));
      p.raw_size = static_cast<std::uint64_t>(rng.uniform(2, 128)) * 512;
      p.flags = {true, false, false};
    } else {
      p.entropy = 0.0;
      p.raw_size = static_cast<std::uint64_t>(rng.uniform(1, 7)) * 512;  // < 4096
      p.flags = {true, true, false};
    }
    p.chi2 = p.entropy == 0.0 ? static_cast<double>(p.raw_size) * 255.0
                              : round2(rng.real(100.0, 500000.0));
    return p;
  }

  SectionRecord place(Rng& rng, const PlantedSection& p) {
    SectionRecord s;
    s.content_hash = p.key;
    s.name = random_section_name(rng);
    s.entropy = p.entropy;
    s.chi2 = p.chi2;
    s.raw_size = p.raw_size;
    s.flags = p.flags;
    s.virtual_address = static_cast<std::uint64_t>(rng.uniform(spec_.virtual_address_range));
    s.virtual_size = static_cast<std::uint64_t>(rng.uniform(spec_.virtual_size_range));
    return s;
  }

  SectionRecord filler(Rng& rng, std::uint64_t file, std::size_t index) {
    PlantedSection p;
    p.key = detail::md5_hex(tag(spec_.seed, "filler", file, index));
    p.entropy = round2(rng.real(0.5, 7.9));
    p.chi2 = round2(rng.real(100.0, 500000.0));
    p.raw_size = static_cast<std::uint64_t>(rng.uniform(1, 256)) * 512;
    p.flags = {true, rng.chance(0.3), rng.chance(0.3)};
    return place(rng, p);
  }

  std::vector<ResourceRecord> resources(Rng& rng, std::uint64_t file) {
    std::vector<ResourceRecord> out;
    if (rng.chance(0.5)) {
      // Shared by unrelated files, e.g. a stock icon.
      out.push_back({detail::sha256_hex(tag(spec_.seed, "resource/common", 0)), "ICON", 3.21, 91234.5});
    }
    const auto own = rng.uniform(0, 2);
    for (std::int64_t i = 0; i < own; ++i) {
      out.push_back({detail::sha256_hex(tag(spec_.seed, "resource", file, static_cast<std::uint64_t>(i))),
                     "Data", round2(rng.real(1.0, 7.9)), round2(rng.real(100.0, 90000.0))});
    }
    return out;
  }

  std::uint64_t finish_sizes(FileReport& r) {
    std::uint64_t total = 1024;
    for (const auto& s : r.sections) total += s.raw_size;
    return total;
  }

  void stamp_identity(FileReport& r, Rng& rng, std::uint64_t n) {
    r.file_id = file_id(n);
    r.first_seen = kEpochBase + static_cast<std::int64_t>(n) * 60;
    r.file_type = draw_file_type(rng);
    r.sha256 = detail::sha256_hex(tag(spec_.seed, "file", n));
    r.md5 = detail::md5_hex(tag(spec_.seed, "file", n));
    r.group_id = spec_.group_id;
  }

  void build_cluster(std::int64_t c, bool benign, SyntheticCorpus& corpus) {
    Rng rng(mix(spec_.seed, static_cast<std::uint64_t>(c)));
    PlantedCluster truth;
    truth.id = c;
    truth.benign = benign;

    char unique_fn[32];
    std::snprintf(unique_fn, sizeof unique_fn, "Sub_%s",
                  detail::md5_hex(tag(spec_.seed, "cluster-fn", static_cast<std::uint64_t>(c)))
                      .substr(0, 8)
                      .c_str());
    const auto imports = draw_import_list(rng, unique_fn);
    truth.imphash = imphash(imports).digest();

    std::vector<PlantedSection> invariant;
    const auto n_mal = static_cast<std::size_t>(rng.uniform(1, 2));
    const auto n_std = static_cast<std::size_t>(rng.uniform(1, 2));
    for (std::size_t i = 0; i < n_mal; ++i) {
      invariant.push_back(plant(rng, c, "malicious", i));
      truth.malicious_keys.push_back(invariant.back().key);
    }
    for (std::size_t i = 0; i < n_std; ++i) {
      invariant.push_back(plant(rng, c, "standard", i));
      truth.standard_keys.push_back(invariant.back().key);
    }
    const PlantedSection camouflage = plant(rng, c, "camouflage", 0);
    truth.camouflage_keys.push_back(camouflage.key);
    const std::string cluster_tlsh =
        tlsh_digest(tag(spec_.seed, "cluster-tlsh", static_cast<std::uint64_t>(c)));

    const auto files = rng.uniform(spec_.files_per_cluster);
    for (std::int64_t f = 0; f < files; ++f) {
      const std::uint64_t n = next_file();
      FileReport r;
      stamp_identity(r, rng, n);
      r.tlsh = rng.chance(spec_.tlsh_shared_fraction) ? cluster_tlsh
                                                       : tlsh_digest(tag(spec_.seed, "tlsh", n));
      r.imports = imports;
      if (rng.chance(spec_.mutate_imports_fraction)) {
        r.imports.back().functions.push_back("Mut_" +
                                             detail::md5_hex(tag(spec_.seed, "mutate", n)).substr(0, 8));
        corpus.truth.mutated_imports.insert(r.file_id);
      }

      for (const auto& p : invariant) r.sections.push_back(place(rng, p));
      const auto copies = rng.uniform(spec_.camouflage_copies);
      for (std::int64_t k = 0; k < copies; ++k) r.sections.push_back(place(rng, camouflage));
      const auto target = static_cast<std::size_t>(rng.uniform(spec_.sections_per_file));
      for (std::size_t j = 0; r.sections.size() < target; ++j) r.sections.push_back(filler(rng, n, j));
      rng.shuffle(r.sections);

      r.resources = resources(rng, n);
      r.size_bytes = finish_sizes(r);
      const bool benign_file = benign || rng.chance(spec_.benign_member_fraction);
      r.vendor_malicious_count = static_cast<int>(
          rng.uniform(benign_file ? spec_.vendor_flags_benign : spec_.vendor_flags_malicious));

      truth.file_ids.push_back(r.file_id);
      corpus.truth.cluster_of[r.file_id] = c;
      corpus.dataset.reports.push_back(std::move(r));
    }
    corpus.truth.clusters.push_back(std::move(truth));
  }

  FileReport build_noise_file(Rng& rng) {
    const std::uint64_t n = next_file();
    FileReport r;
    stamp_identity(r, rng, n);
    r.tlsh = tlsh_digest(tag(spec_.seed, "tlsh", n));
    r.imports = draw_import_list(rng, "Fn_" + detail::md5_hex(tag(spec_.seed, "noise-fn", n)).substr(0, 8));
    const auto target = static_cast<std::size_t>(rng.uniform(spec_.sections_per_file));
    for (std::size_t j = 0; j < target; ++j) r.sections.push_back(filler(rng, n, j));
    r.resources = resources(rng, n);
    r.size_bytes = finish_sizes(r);
    r.vendor_malicious_count = static_cast<int>(rng.uniform(spec_.vendor_flags_benign));
    return r;
  }

  const SyntheticSpec& spec_;
  std::uint64_t file_counter_ = 0;
};

[[noreturn]] void spec_fail(const std::string& what) { throw Error(ErrorKind::Spec, "spec error: " + what); }

IntRange read_range(const json& v, const char* key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    spec_fail(std::string("'") + key + "' must be a [lo, hi] integer pair");
  }
  return {v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
}

json range_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

}  // namespace

std::vector<std::string> SyntheticSpec::violations() const {
  std::vector<std::string> v;
  auto check_range = [&](const IntRange& r, const char* name, std::int64_t floor,
                         std::int64_t ceil) {
    if (r.lo > r.hi) v.push_back(std::string(name) + " is empty (lo > hi)");
    if (r.lo < floor || r.hi > ceil) {
      v.push_back(std::string(name) + " must lie within [" + std::to_string(floor) + ", " +
                  std::to_string(ceil) + "]");
    }
  };
  auto check_fraction = [&](double f, const char* name) {
    if (!(f >= 0.0 && f <= 1.0)) v.push_back(std::string(name) + " must lie in [0, 1]");
  };
  constexpr std::int64_t kBig = std::int64_t{1} << 40;
  if (group_id.empty()) v.emplace_back("group_id must not be empty");
  if (cluster_count < 0 || cluster_count > 10'000'000) v.emplace_back("cluster_count out of range");
  if (noise_files < 0 || noise_files > 100'000'000) v.emplace_back("noise_files out of range");
  check_range(files_per_cluster, "files_per_cluster", 1, 10'000'000);
  check_range(sections_per_file, "sections_per_file", 0, 100'000);
  check_range(camouflage_copies, "camouflage_copies", 1, 100'000);
  check_range(virtual_size_range, "virtual_size_range", 0, kBig);
  check_range(virtual_address_range, "virtual_address_range", 0, kBig);
  check_range(vendor_flags_malicious, "vendor_flags_malicious", 0, kVendorCount);
  check_range(vendor_flags_benign, "vendor_flags_benign", 0, kVendorCount);
  check_fraction(mutate_imports_fraction, "mutate_imports_fraction");
  check_fraction(tlsh_shared_fraction, "tlsh_shared_fraction");
  check_fraction(benign_member_fraction, "benign_member_fraction");
  check_fraction(benign_cluster_fraction, "benign_cluster_fraction");
  if (camouflage_copies.hi > sections_per_file.hi) {
    v.emplace_back("camouflage_copies exceeds sections_per_file maximum");
  }
  return v;
}

SyntheticSpec SyntheticSpec::from_json(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) spec_fail("not a JSON object");
  if (!j.contains("seed")) spec_fail("missing 'seed'");
  SyntheticSpec s;
  for (const auto& [key, value] : j.items()) {
    auto as_int = [&]() {
      if (!value.is_number_integer()) spec_fail("'" + key + "' must be an integer");
      return value.get<std::int64_t>();
    };
    auto as_real = [&]() {
      if (!value.is_number()) spec_fail("'" + key + "' must be a number");
      return value.get<double>();
    };
    if (key == "seed") {
      if (!value.is_number_unsigned()) spec_fail("'seed' must be a non-negative integer");
      s.seed = value.get<std::uint64_t>();
    } else if (key == "group_id") {
      if (!value.is_string()) spec_fail("'group_id' must be a string");
      s.group_id = value.get<std::string>();
    } else if (key == "cluster_count") {
      s.cluster_count = as_int();
    } else if (key == "files_per_cluster") {
      s.files_per_cluster = read_range(value, "files_per_cluster");
    } else if (key == "noise_files") {
      s.noise_files = as_int();
    } else if (key == "mutate_imports_fraction") {
      s.mutate_imports_fraction = as_real();
    } else if (key == "sections_per_file") {
      s.sections_per_file = read_range(value, "sections_per_file");
    } else if (key == "camouflage_copies") {
      s.camouflage_copies = read_range(value, "camouflage_copies");
    } else if (key == "virtual_size_range") {
      s.virtual_size_range = read_range(value, "virtual_size_range");
    } else if (key == "virtual_address_range") {
      s.virtual_address_range = read_range(value, "virtual_address_range");
    } else if (key == "vendor_flags_malicious") {
      s.vendor_flags_malicious = read_range(value, "vendor_flags_malicious");
    } else if (key == "vendor_flags_benign") {
      s.vendor_flags_benign = read_range(value, "vendor_flags_benign");
    } else if (key == "tlsh_shared_fraction") {
      s.tlsh_shared_fraction = as_real();
    } else if (key == "benign_member_fraction") {
      s.benign_member_fraction = as_real();
    } else if (key == "benign_cluster_fraction") {
      s.benign_cluster_fraction = as_real();
    } else {
      spec_fail("unknown key '" + key + "'");
    }
  }
  if (auto v = s.violations(); !v.empty()) spec_fail(v.front());
  return s;
}

std::string SyntheticSpec::to_json() const {
  json j;
  j["seed"] = seed;
  j["group_id"] = group_id;
  j["cluster_count"] = cluster_count;
  j["files_per_cluster"] = range_json(files_per_cluster);
  j["noise_files"] = noise_files;
  j["mutate_imports_fraction"] = mutate_imports_fraction;
  j["sections_per_file"] = range_json(sections_per_file);
  j["camouflage_copies"] = range_json(camouflage_copies);
  j["virtual_size_range"] = range_json(virtual_size_range);
  j["virtual_address_range"] = range_json(virtual_address_range);
  j["vendor_flags_malicious"] = range_json(vendor_flags_malicious);
  j["vendor_flags_benign"] = range_json(vendor_flags_benign);
  j["tlsh_shared_fraction"] = tlsh_shared_fraction;
  j["benign_member_fraction"] = benign_member_fraction;
  j["benign_cluster_fraction"] = benign_cluster_fraction;
  return j.dump(2);
}

std::size_t GroundTruth::planted_file_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.file_ids.size();
  return n;
}

std::string GroundTruth::to_json() const {
  json j;
  j["seed"] = seed;
  json files = json::object();
  for (const auto& [id, c] : cluster_of) files[id] = c;
  j["files"] = std::move(files);
  json clusters_json = json::array();
  for (const auto& c : clusters) {
    clusters_json.push_back({{"id", c.id},
                             {"imphash", c.imphash},
                             {"benign", c.benign},
                             {"malicious_keys", c.malicious_keys},
                             {"standard_keys", c.standard_keys},
                             {"camouflage_keys", c.camouflage_keys},
                             {"file_ids", c.file_ids}});
  }
  j["clusters"] = std::move(clusters_json);
  j["mutated_imports"] = mutated_imports;
  return j.dump(2);
}

SyntheticCorpus generate(const SyntheticSpec& spec) {
  if (auto v = spec.violations(); !v.empty()) spec_fail(v.front());
  return Builder(spec).run();
}

std::filesystem::path truth_path_for(const std::filesystem::path& dataset_path) {
  auto p = dataset_path;
  p.replace_extension(".truth.json");
  return p;
}

void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dataset_path) {
  {
    std::ofstream out(dataset_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + dataset_path.string());
    for (const auto& r : corpus.dataset.reports) {
      out << encode_report(r) << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "write failed: " + dataset_path.string());
  }
  const auto truth_path = truth_path_for(dataset_path);
  std::ofstream out(truth_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + truth_path.string());
  out << corpus.truth.to_json() << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed: " + truth_path.string());
}

}  // namespace rfp
