#include <doctest.h>

#include <algorithm>
#include <tuple>

#include <json.hpp>

#include "rfp/report.hpp"
#include "support.hpp"

using namespace rfp;
using json = nlohmann::json;

namespace {

Dataset two_file_cluster() {
  std::vector<FileReport> rs{test::report(0, 30), test::report(1, 2)};
  for (auto& r : rs) {
    r.imports = test::imports_of("k.dll", {"A"});
    r.sections = {test::section("35000000000000000000000000000ab0", 0.0, 512)};
  }
  return test::dataset_of(rs);
}

}  // namespace

TEST_CASE("summary CSV row") {
  EvaluationSummary s;
  s.qualification = Qualification::ILRS;
  s.fingerprint_count = 560;
  s.fp_count = 51;
  s.fp_redundancy = 40034;
  s.partial_count = 158;
  s.full_count = 351;
  s.tp_redundancy = 544613;
  std::tie(s.fp_accuracy, s.tp_accuracy) = accuracy_split(s.fp_redundancy, s.tp_redundancy);
  CHECK(render_summary(s, Format::Csv) ==
        "qualification,fingerprints,fp_num,fp_acc,fp_redundancy,partial_num,full_num,tp_acc,tp_redundancy\n"
        "ILRS,560,51,6.8,40034,158,351,93.2,544613\n");
  const auto j = json::parse(render_summary(s, Format::Json));
  CHECK(j["tp_redundancy"] == 544613);
  CHECK(j["fp_acc"].get<double>() == doctest::Approx(6.8));
}

TEST_CASE("empty selection renders a zeros row") {
  const auto s = summarize(std::vector<FingerprintTally>{}, Qualification::CS);
  CHECK(render_summary(s, Format::Csv).substr(render_summary(s, Format::Csv).find('\n') + 1) ==
        "CS,0,0,0.0,0,0,0,0.0,0\n");
}

TEST_CASE("prevalence CSV") {
  PrevalenceReport rep;
  rep.rows.push_back({PrevalenceFeature::SHA256, 100, 16, Percent::ratio(16, 100)});
  CHECK(render_prevalence(rep, Format::Csv) ==
        "feature,population,redundancy,redundancy_pct\nSHA256,100,16,16.0\n");
  CHECK(render_prevalence(rep, Format::Json) ==
        R"({"feature":"SHA256","population":100,"redundancy":16,"redundancy_pct":16.0})" "\n");
}

TEST_CASE("comparison CSV") {
  const std::vector<ComparisonRow> rows{{"SHA256", 0, Percent{}}, {"TLSH", 3, Percent::ratio(3, 9)}};
  CHECK(render_comparison(rows, Format::Csv) == "technique,files,accuracy_pct\nSHA256,0,0.0\nTLSH,3,33.3\n");
}

TEST_CASE("ingest stats") {
  IngestStats s{5, 3, 1, 1, 2, 0};
  CHECK(render_ingest_stats(s, Format::Csv) ==
        "lines_read,accepted,skipped_malformed,skipped_non_pe,missing_imports,missing_tlsh\n"
        "5,3,1,1,2,0\n");
  CHECK(json::parse(render_ingest_stats(s, Format::Json))["skipped_non_pe"] == 1);
}

TEST_CASE("fingerprint records") {
  const Dataset ds = two_file_cluster();
  const EvaluationConfig cfg;
  const auto fps = bottom_up(ds, cfg);
  REQUIRE(fps.size() == 1);

  const std::string csv = render_fingerprints(fps, cfg, Format::Csv);
  CHECK(csv == "method,key,display_id,redundancy,qualifications,verdict\n"
               "bottom-up,35000000000000000000000000000ab0,35b0,2,RS+CS,Partial\n");

  const std::string text = render_fingerprints(fps, cfg, Format::Json);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  const auto j = json::parse(text);
  CHECK(j["method"] == "bottom-up");
  CHECK(j["display_id"] == "35b0");
  CHECK(j["qualifications"] == json::array({"RS", "CS"}));
  CHECK(j["file_ids"] == json::array({"f0", "f1"}));
  CHECK(j["file_stats"]["vendor_flag_histogram"]["30"] == 1);
  CHECK(j["section_profiles"][0]["label"] == "Camouflage");
  CHECK(j["section_profiles"][0]["display_id"] == "35b0");
  // Keys come out sorted, so a re-dump is byte-identical.
  CHECK(j.dump() + "\n" == text);

  CHECK(render_fingerprints(fps, cfg, Format::Json, 3).empty());
  CHECK(render_fingerprints(top_down(ds, cfg), cfg, Format::Json).find("top-down") != std::string::npos);
}
