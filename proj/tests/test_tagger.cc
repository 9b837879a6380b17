#include "doctest.h"

#include <sstream>

#include "ambig/error.h"
#include "ambig/tagger.h"
#include "test_util.h"

using namespace ambig;

namespace {

GenderedTerm term(std::string form, Gender g) { return {1, std::move(form), g, TermRelation::kDependentOfHead}; }

std::string labels_jsonl(const std::vector<GenderTag>& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    SegmentLabels l;
    l.line = i;
    if (tags[i] == GenderTag::kMasc || tags[i] == GenderTag::kMixed) l.gendered_terms.push_back(term("le", Gender::kMasc));
    if (tags[i] == GenderTag::kFem || tags[i] == GenderTag::kMixed) l.gendered_terms.push_back(term("la", Gender::kFem));
    l.trg_gendered = !l.gendered_terms.empty();
    l.tag = tags[i];
    out += labels_to_json(l).dump() + "\n";
  }
  return out;
}

NameSpan jax_span() { return {0, 0, 1, "Jax", {true, false, false}}; }

}  // namespace

TEST_CASE("gender_tag") {
  CHECK(gender_tag(std::vector<GenderedTerm>{term("eine", Gender::kFem), term("gute", Gender::kFem)}) == GenderTag::kFem);
  CHECK(gender_tag(std::vector<GenderedTerm>{}) == GenderTag::kNone);
  CHECK(gender_tag(std::vector<GenderedTerm>{term("el", Gender::kMasc), term("una", Gender::kFem)}) == GenderTag::kMixed);
  CHECK(gender_tag(std::vector<GenderedTerm>{term("una", Gender::kFem), term("el", Gender::kMasc)}) == GenderTag::kMixed);
  CHECK(gender_tag(std::vector<GenderedTerm>{term("el", Gender::kMasc)}) == GenderTag::kMasc);
  for (const auto t : {GenderTag::kMasc, GenderTag::kFem, GenderTag::kMixed, GenderTag::kNone}) {
    CHECK(parse_tag(tag_name(t)) == t);
  }
  CHECK_THROWS_AS(parse_tag("OTHER"), Error);
}

TEST_CASE("tag_line") {
  CHECK(tag_line("Taylor is an engineer.", GenderTag::kFem) == "<FEM> Taylor is an engineer.");
  CHECK(tag_line("Taylor is an engineer.", GenderTag::kNone) == "Taylor is an engineer.");
  CHECK(tag_line("x", GenderTag::kNone, true) == "<NONE> x");
  CHECK(tag_line("x", GenderTag::kMixed) == "<MIXED> x");
  CHECK(strip_tag("<MASC> x") == "x");
  CHECK(strip_tag("<MASC>x") == "<MASC>x");
  CHECK(strip_tag("plain") == "plain");
}

TEST_CASE("tagged corpus keeps bytes and strips back") {
  const std::string src = "Taylor is an engineer.\r\nJax left\n\nno newline at end";
  std::istringstream s(src);
  std::istringstream l(labels_jsonl({GenderTag::kFem, GenderTag::kNone, GenderTag::kMasc, GenderTag::kMixed}));
  std::ostringstream out;
  emit_tagged_corpus(s, l, out);
  CHECK(out.str() == "<FEM> Taylor is an engineer.\r\nJax left\n<MASC> \n<MIXED> no newline at end");

  std::string stripped;
  std::istringstream back(out.str());
  std::string line;
  bool first = true;
  while (std::getline(back, line)) {
    if (!first) stripped += '\n';
    stripped += strip_tag(line);
    first = false;
  }
  CHECK(stripped == src);
}

TEST_CASE("tagged corpus misalignment") {
  std::istringstream s("a\nb\n");
  std::istringstream l(labels_jsonl({GenderTag::kFem}));
  std::ostringstream out;
  CHECK_THROWS_AS(emit_tagged_corpus(s, l, out), AlignmentError);
  std::istringstream s2("a\n");
  std::istringstream l2(labels_jsonl({GenderTag::kFem, GenderTag::kFem}));
  CHECK_THROWS_AS(emit_tagged_corpus(s2, l2, out), AlignmentError);
}

TEST_CASE("empty corpus tags to empty output") {
  std::istringstream s("");
  std::istringstream l("");
  std::ostringstream out;
  emit_tagged_corpus(s, l, out);
  CHECK(out.str().empty());
  CHECK(emit_tagged_corpus(std::vector<ParallelSegment>{}, std::vector<SegmentLabels>{}).empty());
}

TEST_CASE("neutralization score") {
  const std::vector<NameSpan> jax = {jax_span()};
  CHECK(neutralization_score(testutil::jax_engineer(), jax, false) == 2);
  CHECK(neutralization_score(testutil::jax_engineer(), std::vector<NameSpan>{}, false) == 0);
  const std::vector<NameSpan> taylor = {{0, 0, 1, "Taylor", {true, false, false}}};
  CHECK(neutralization_score(testutil::taylor_engineer(), taylor, true) == 1);
  CHECK(neutralization_score(testutil::taylor_engineer(), taylor, false) == 0);
}

TEST_CASE("score grows when a gendered dependent is added") {
  auto parse = testutil::jax_engineer();
  const std::vector<NameSpan> jax = {jax_span()};
  const auto before = neutralization_score(parse, jax, false);
  parse.push_back(testutil::tok(7, "sehr", 5, "Gender=Fem"));
  CHECK(neutralization_score(parse, jax, false) == before + 1);
}
