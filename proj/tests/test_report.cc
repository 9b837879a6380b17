#include "doctest.h"

#include "ambig/error.h"
#include "ambig/report.h"
#include "test_util.h"

using namespace ambig;

namespace {

SegmentLabels labels(bool tc, bool pron, bool gendered = false, bool parsed = true) {
  SegmentLabels l;
  l.has_tc = tc;
  l.has_binary_pronoun = pron;
  l.parsed = parsed;
  if (gendered) {
    l.gendered_terms = {{1, "eine", Gender::kFem, TermRelation::kDependentOfHead}};
    l.trg_gendered = true;
  }
  return l;
}

}  // namespace

TEST_CASE("percentages over ten segments") {
  // 4 with TC, 2 with a pronoun, 1 with both.
  std::vector<SegmentLabels> ls = {labels(true, true), labels(true, false), labels(true, false), labels(true, false),
                                   labels(false, true)};
  for (int i = 0; i < 5; ++i) ls.push_back(labels(false, false));
  const auto r = build_report(ls, 10);
  CHECK(r.pct_tc == 40.0);
  CHECK(r.pct_pronoun == 20.0);
  CHECK(r.pct_name_and_pronoun == 10.0);
  CHECK(r.counts.tc == 4);
}

TEST_CASE("no TC segments give zero percentages") {
  const std::vector<SegmentLabels> ls = {labels(false, true), labels(false, false)};
  const auto r = build_report(ls, 2);
  CHECK(r.pct_tc == 0.0);
  CHECK(r.pct_trg_gendered_tc == 0.0);
  CHECK(r.pct_name_and_pronoun == 0.0);
}

TEST_CASE("total must be positive and cover the labels") {
  CHECK_THROWS_AS(build_report(ReportCounts{}, 0), Error);
  CHECK_THROWS_AS(build_report(std::vector<SegmentLabels>{labels(true, true), labels(true, true)}, 1), Error);
}

TEST_CASE("trg-gendered splits and unparsed lines") {
  const std::vector<SegmentLabels> ls = {labels(true, true, true), labels(true, false, true),
                                         labels(true, false, true), labels(false, false, false, false)};
  const auto r = build_report(ls, 8);
  CHECK(r.counts.trg_gendered_tc == 3);
  CHECK(r.counts.trg_gendered_with_pron == 1);
  CHECK(r.counts.trg_gendered_no_pron == 2);
  CHECK(r.pct_trg_gendered_tc == 37.5);
  CHECK(r.lines_without_parse == 1);
}

TEST_CASE("table mirrors the paper columns") {
  const auto r = build_report(std::vector<SegmentLabels>{labels(true, true)}, 3);
  const auto table = render_report_table(r);
  CHECK(table.find("Lines (M)") != std::string::npos);
  CHECK(table.find("%N&P") != std::string::npos);
  CHECK(table.find("33.3") != std::string::npos);
  CHECK(table.find("33.33") == std::string::npos);
}

TEST_CASE("merge is associative and matches the concatenation") {
  testutil::Gen gen(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SegmentLabels> all;
    for (std::size_t i = 0, n = gen.below(60); i < n; ++i) {
      auto l = labels(gen.chance(0.5), gen.chance(0.3), gen.chance(0.3), gen.chance(0.9));
      l.has_sa = l.has_tc && gen.chance(0.7);
      l.has_sp = l.has_sa && gen.chance(0.7);
      all.push_back(l);
    }
    const std::size_t cut1 = all.empty() ? 0 : gen.below(all.size() + 1);
    const std::size_t cut2 = cut1 + (all.size() == cut1 ? 0 : gen.below(all.size() - cut1 + 1));
    ReportCounts a, b, c, whole;
    for (std::size_t i = 0; i < all.size(); ++i) {
      (i < cut1 ? a : i < cut2 ? b : c).add(all[i]);
      whole.add(all[i]);
    }
    ReportCounts left = a;
    left.merge(b).merge(c);
    ReportCounts bc = b;
    bc.merge(c);
    ReportCounts right = a;
    right.merge(bc);
    REQUIRE(left == right);
    REQUIRE(left == whole);
    if (whole.lines == 0) continue;
    const auto r = build_report(whole, whole.lines + gen.below(5));
    REQUIRE(report_to_json(r) == report_to_json(build_report(all, r.total_lines)));
    REQUIRE(r.pct_sp <= r.pct_sa);
    REQUIRE(r.pct_sa <= r.pct_tc);
    REQUIRE(r.pct_name_and_pronoun <= std::min(r.pct_tc, r.pct_pronoun));
    REQUIRE(r.pct_trg_gendered_no_pron + r.pct_trg_gendered_with_pron ==
            doctest::Approx(r.pct_trg_gendered_tc));
    for (const double p : {r.pct_tc, r.pct_sa, r.pct_sp, r.pct_pronoun, r.pct_name_and_pronoun,
                           r.pct_trg_gendered_tc, r.pct_trg_gendered_no_pron, r.pct_trg_gendered_with_pron}) {
      REQUIRE(p >= 0.0);
      REQUIRE(p <= 100.0);
    }
  }
}

TEST_CASE("name gender ratio counts terms") {
  NameSpan john{0, 0, 1, "John", {true, false, false}};
  NameSpan john2 = john;
  john2.segment_index = 1;
  NameSpan other{2, 0, 1, "Johnny", {true, false, false}};
  SegmentLabels l0, l1, l2;
  l0.line = 0;
  l0.gendered_terms = {{1, "le", Gender::kMasc, {}}, {2, "grand", Gender::kMasc, {}}};
  l1.line = 1;
  l1.gendered_terms = {{1, "la", Gender::kFem, {}}};
  l2.line = 2;
  l2.gendered_terms = {{1, "la", Gender::kFem, {}}};
  const std::vector<SegmentLabels> ls = {l0, l1, l2};
  const std::vector<NameSpan> spans = {john, john2, other};
  const auto r = name_gender_ratio(ls, spans, "John");
  CHECK(r.masc_count == 2);
  CHECK(r.fem_count == 1);
  REQUIRE(r.ratio);
  CHECK(*r.ratio == 2.0);

  const auto absent = name_gender_ratio(ls, spans, "Mary");
  CHECK(absent.masc_count == 0);
  CHECK(absent.fem_count == 0);
  CHECK_FALSE(absent.ratio);
  CHECK(ratio_to_json(absent).dump() == R"({"name":"Mary","masc_count":0,"fem_count":0,"ratio":null})");
  CHECK_THROWS_AS(name_gender_ratio(ls, spans, ""), Error);
}
