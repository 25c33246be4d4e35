#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "rfp/error.hpp"
#include "rfp/keys.hpp"
#include "support.hpp"

using namespace rfp;

namespace {

// Quadratic oracle: count entries that equal some earlier entry.
std::size_t brute_redundancy(const std::vector<std::string>& keys) {
  std::size_t dup = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (keys[i] == keys[j]) {
        ++dup;
        break;
      }
    }
  }
  return dup;
}

}  // namespace

TEST_CASE("canonical import text") {
  const std::vector<ImportLibrary> libs{{"KERNEL32.dll", {"CreateFileW", "ReadFile"}},
                                        {"EMPTY.dll", {}},
                                        {"User32.DLL", {"MessageBoxA"}}};
  CHECK(canonical_imports(libs) ==
        "kernel32.dll.CreateFileW;kernel32.dll.ReadFile;user32.dll.MessageBoxA");
}

TEST_CASE("imphash matches a frozen digest") {
  const std::vector<ImportLibrary> libs{{"KERNEL32.dll", {"CreateFileW", "ReadFile"}},
                                        {"USER32.dll", {"MessageBoxA"}}};
  CHECK(imphash(libs).digest() ==
        "4562874fec5690f95804a357145dce51e24ef1842826e4c17ff63a75ca1ef1d5");
}

TEST_CASE("imphash sensitivity") {
  const std::vector<ImportLibrary> a{{"k.dll", {"A", "B"}}};
  const std::vector<ImportLibrary> reordered{{"k.dll", {"B", "A"}}};
  const std::vector<ImportLibrary> recased{{"K.DLL", {"A", "B"}}};
  const std::vector<ImportLibrary> fn_case{{"k.dll", {"a", "B"}}};
  CHECK(imphash(a) != imphash(reordered));
  CHECK(imphash(a) == imphash(recased));
  CHECK(imphash(a) != imphash(fn_case));
}

TEST_CASE("imphash without imports") {
  CHECK_THROWS_AS(imphash({}), Error);
  try {
    imphash({});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoImports);
  }
}

TEST_CASE("display id") {
  CHECK(display_id("35ab12b0") == "35b0");
  CHECK(display_id("abcd") == "abcd");
  CHECK(display_id("ab") == "ab");
  CHECK(SecKey("d4000000000000000000000000000007e").display_id() == "d47e");
}

TEST_CASE("redundancy worked example") {
  std::vector<std::string> keys;
  for (int i = 0; i < 84; ++i) keys.push_back("k" + std::to_string(i));
  for (int i = 0; i < 16; ++i) keys.push_back("k" + std::to_string(i % 5));
  CHECK(keys.size() == 100);
  CHECK(redundancy_exact(keys) == 16);
  CHECK(Percent::ratio(16, 100).str() == "16.0");
}

TEST_CASE("redundancy edge cases") {
  CHECK(redundancy_exact(std::vector<std::string>{}) == 0);
  CHECK(redundancy_exact(std::vector<std::string>{"a"}) == 0);
  CHECK(redundancy_exact(std::vector<std::string>(5, "a")) == 4);
  const std::vector<std::string_view> views{"x", "y", "x"};
  CHECK(redundancy_exact(views) == 1);
}

TEST_CASE("redundancy agrees with the brute-force oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng() % 80;
    const std::size_t alphabet = 1 + rng() % 40;
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < n; ++i) keys.push_back(std::to_string(rng() % alphabet));
    const std::size_t r = redundancy_exact(keys);
    CHECK(r == brute_redundancy(keys));
    CHECK(r <= n);
    // Permutation invariance.
    std::shuffle(keys.begin(), keys.end(), rng);
    CHECK(redundancy_exact(keys) == r);
  }
}

TEST_CASE("percent rounding") {
  CHECK(Percent::ratio(0, 0).str() == "0.0");
  CHECK(Percent::ratio(1, 3).str() == "33.3");
  CHECK(Percent::ratio(2, 3).str() == "66.7");
  CHECK(Percent::ratio(1, 2000).str() == "0.1");  // exactly 0.05 rounds up
  CHECK(Percent::ratio(1, 2001).str() == "0.0");
  CHECK(Percent::ratio(5, 5).str() == "100.0");
  CHECK(Percent::from_tenths(931).value() == doctest::Approx(93.1));
  CHECK(Percent::from_tenths(-15).str() == "-1.5");
  CHECK(Percent::ratio(~0ULL, ~0ULL).tenths() == 1000);
}

TEST_CASE("baseline rows") {
  std::vector<FileReport> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(test::report(i));
  rs[1].sha256 = rs[0].sha256;
  rs[2].sha256 = rs[0].sha256;
  rs[3].tlsh = "T1A";
  rs[4].tlsh = "T1A";
  rs[5].tlsh = "T1B";
  rs[6].imports = test::imports_of("k.dll", {"f"});
  rs[7].imports = test::imports_of("K.dll", {"f"});
  const Dataset ds = test::dataset_of(rs);

  const auto sha = baseline_row(ds, KeySelector::SHA256);
  CHECK(sha.files_identified == 2);
  CHECK(sha.accuracy.str() == "20.0");
  // Files without tlsh are not counted as shared.
  const auto tlsh = baseline_row(ds, KeySelector::TLSH);
  CHECK(tlsh.files_identified == 1);
  CHECK(tlsh.accuracy.str() == "10.0");
  const auto imp = baseline_row(ds, KeySelector::IMPHASH);
  CHECK(imp.files_identified == 1);

  CHECK(baseline_row(Dataset{}, KeySelector::SHA256).accuracy.str() == "0.0");
  CHECK(to_string(KeySelector::TLSH) == "TLSH");
}
