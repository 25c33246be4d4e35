#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfp/feed_io.hpp"
#include "rfp/model.hpp"

namespace rfp {

/// Digest of a file's complete, ordered import list.
class ImpHash {
 public:
  explicit ImpHash(std::string digest) : digest_(std::move(digest)) {}

  const std::string& digest() const { return digest_; }

  auto operator<=>(const ImpHash&) const = default;

 private:
  std::string digest_;
};

/// Canonical text hashed by imphash(): `lower(library) + "." + function`
/// for every function in report order, joined with ';'. A library without
/// functions contributes nothing.
std::string canonical_imports(std::span<const ImportLibrary> imports);

/// SHA-256 over canonical_imports(). Throws Error(NoImports) when `imports`
/// is empty.
ImpHash imphash(std::span<const ImportLibrary> imports);

/// Section content hash used as a clustering key, plus its short form.
class SecKey {
 public:
  explicit SecKey(std::string digest) : digest_(std::move(digest)) {}

  const std::string& digest() const { return digest_; }
  std::string display_id() const;

  auto operator<=>(const SecKey&) const = default;

 private:
  std::string digest_;
};

/// First two plus last two characters; shorter input is returned whole.
std::string display_id(std::string_view digest);

/// N minus the number of distinct keys.
std::size_t redundancy_exact(std::span<const std::string> keys);
std::size_t redundancy_exact(std::span<const std::string_view> keys);

enum class KeySelector { SHA256, TLSH, IMPHASH };

std::string_view to_string(KeySelector selector);

/// Percentage with one decimal, stored as an integer count of tenths so that
/// formatting and comparison are exact.
class Percent {
 public:
  constexpr Percent() = default;
  static constexpr Percent from_tenths(std::int64_t tenths) { return Percent(tenths); }
  /// 100 * num / den rounded half-up to one decimal; 0.0 when den == 0.
  static Percent ratio(std::uint64_t num, std::uint64_t den);

  constexpr std::int64_t tenths() const { return tenths_; }
  double value() const { return static_cast<double>(tenths_) / 10.0; }
  std::string str() const;

  auto operator<=>(const Percent&) const = default;

 private:
  constexpr explicit Percent(std::int64_t tenths) : tenths_(tenths) {}
  std::int64_t tenths_ = 0;
};

struct BaselineRow {
  std::size_t files_identified = 0;
  Percent accuracy;
};

/// Exact-match redundancy over one file-level key. Records lacking the key
/// (no tlsh, no imports) are left out of the numerator only; the denominator
/// is always the full dataset.
BaselineRow baseline_row(const Dataset& dataset, KeySelector selector);

}  // namespace rfp
