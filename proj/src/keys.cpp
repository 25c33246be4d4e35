#include "rfp/keys.hpp"

#include <cstdio>
#include <unordered_set>

#include "digest.hpp"
#include "rfp/error.hpp"

namespace rfp {
namespace {

template <typename Key>
std::size_t count_redundant(std::span<const Key> keys) {
  std::unordered_set<std::string_view> distinct;
  distinct.reserve(keys.size());
  for (const auto& k : keys) distinct.insert(std::string_view(k));
  return keys.size() - distinct.size();
}

}  // namespace

std::string canonical_imports(std::span<const ImportLibrary> imports) {
  std::string out;
  bool first = true;
  for (const auto& lib : imports) {
    const std::string lib_name = to_lower(lib.library_name);
    for (const auto& fn : lib.functions) {
      if (!first) out.push_back(';');
      first = false;
      out += lib_name;
      out.push_back('.');
      out += fn;
    }
  }
  return out;
}

ImpHash imphash(std::span<const ImportLibrary> imports) {
  if (imports.empty()) throw Error(ErrorKind::NoImports, "file has no imports");
  return ImpHash(detail::sha256_hex(canonical_imports(imports)));
}

std::string display_id(std::string_view digest) {
  if (digest.size() <= 4) return std::string(digest);
  std::string out(digest.substr(0, 2));
  out += digest.substr(digest.size() - 2);
  return out;
}

std::string SecKey::display_id() const { return rfp::display_id(digest_); }

std::size_t redundancy_exact(std::span<const std::string> keys) { return count_redundant(keys); }

std::size_t redundancy_exact(std::span<const std::string_view> keys) {
  return count_redundant(keys);
}

std::string_view to_string(KeySelector selector) {
  switch (selector) {
    case KeySelector::SHA256: return "SHA256";
    case KeySelector::TLSH: return "TLSH";
    case KeySelector::IMPHASH: return "IMPHASH";
  }
  return "SHA256";
}

Percent Percent::ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return Percent(0);
  // round(1000 * num / den) with ties away from zero, in integers.
  __extension__ using u128 = unsigned __int128;
  const u128 scaled = static_cast<u128>(num) * 2000u + den;
  return Percent(static_cast<std::int64_t>(scaled / (2u * static_cast<u128>(den))));
}

std::string Percent::str() const {
  const std::int64_t whole = tenths_ / 10;
  const std::int64_t frac = tenths_ % 10;
  char buf[32];
  if (tenths_ < 0) {
    std::snprintf(buf, sizeof buf, "-%lld.%lld", static_cast<long long>(-whole),
                  static_cast<long long>(-frac));
  } else {
    std::snprintf(buf, sizeof buf, "%lld.%lld", static_cast<long long>(whole),
                  static_cast<long long>(frac));
  }
  return buf;
}

BaselineRow baseline_row(const Dataset& dataset, KeySelector selector) {
  std::vector<std::string> keys;
  keys.reserve(dataset.size());
  for (const auto& r : dataset.reports) {
    switch (selector) {
      case KeySelector::SHA256:
        keys.push_back(r.sha256);
        break;
      case KeySelector::TLSH:
        if (r.tlsh) keys.push_back(*r.tlsh);
        break;
      case KeySelector::IMPHASH:
        if (r.has_imports()) keys.push_back(imphash(r.imports).digest());
        break;
    }
  }
  BaselineRow row;
  row.files_identified = redundancy_exact(std::span<const std::string>(keys));
  row.accuracy = Percent::ratio(row.files_identified, dataset.size());
  return row;
}

}  // namespace rfp
