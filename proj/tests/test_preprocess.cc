#include "doctest.h"

#include "ambig/content_hash.h"
#include "ambig/error.h"
#include "ambig/preprocess.h"
#include "test_util.h"

using namespace ambig;
using testutil::seg;

namespace {

std::vector<std::pair<std::string, std::string>> pairs(const std::vector<ParallelSegment>& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : c) out.emplace_back(s.src, s.tgt);
  return out;
}

}  // namespace

TEST_CASE("dedup keeps the first of identical pairs") {
  const auto out = dedup_exact_pairs({seg("Hi", "Salut", 0), seg("Hi", "Salut", 1)});
  REQUIRE(out.size() == 1);
  CHECK(out[0].index == 0);
}

TEST_CASE("dedup is pair-level") {
  CHECK(dedup_exact_pairs({seg("Hi", "Salut"), seg("Hi", "Coucou")}).size() == 2);
  CHECK(dedup_exact_pairs({seg("Hi", "Salut"), seg("Bye", "Salut")}).size() == 2);
  CHECK(dedup_exact_pairs({}).empty());
}

TEST_CASE("dedup compares after trailing whitespace trim only") {
  CHECK(dedup_exact_pairs({seg("Hi", "Salut"), seg("Hi  \t", "Salut ")}).size() == 1);
  CHECK(dedup_exact_pairs({seg("Hi", "Salut"), seg(" Hi", "Salut")}).size() == 2);
}

TEST_CASE("pair hash separates the sides") {
  CHECK_FALSE(pair_hash("ab", "c") == pair_hash("a", "bc"));
  // Exact bytes; trailing-whitespace folding belongs to the deduper.
  CHECK_FALSE(pair_hash("ab", "c") == pair_hash("ab ", "c"));
  CHECK(pair_hash("ab", "c") == pair_hash("ab", "c"));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("length ratio") {
  PreprocessConfig cfg;
  CHECK_FALSE(length_ratio_ok(seg("a b c d e f g h i j", "x"), cfg));
  CHECK(length_ratio_ok(seg("a b c d e f g h i", "x"), cfg));
  CHECK(length_ratio_ok(seg("a b c", "x y z"), cfg));
  CHECK_FALSE(length_ratio_ok(seg("", "x"), cfg));
  CHECK_FALSE(length_ratio_ok(seg("a", "   "), cfg));
}

TEST_CASE("config validation") {
  PreprocessConfig cfg;
  cfg.max_length_ratio = 0.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.max_length_ratio = 1.0;
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(parse_lang("it"), ConfigError);
  CHECK(parse_lang("de") == Lang::kDe);
}

TEST_CASE("langid by stopword coverage") {
  CHECK(langid_of("the cat is on the mat") == Lang::kEn);
  CHECK(langid_of("le chat est sur le tapis") == Lang::kFr);
  CHECK(langid_of("Der Hund ist nicht hier") == Lang::kDe);
  CHECK(langid_of("el perro no está aquí") == Lang::kEs);
  CHECK(langid_of("xyzzy qwerty") == Lang::kUnknown);
  CHECK(langid_of("") == Lang::kUnknown);
}

TEST_CASE("langid coverage is a fraction of letter-run tokens") {
  // the, is, on, the: 4 of 6 tokens.
  const auto cov = stopword_coverage("The cat is on the mat.");
  CHECK(cov[0] == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("langid_ok skips short lines and accepts ties") {
  PreprocessConfig cfg;
  CHECK(langid_ok("le chat", Lang::kEn, cfg));  // under 4 tokens
  CHECK_FALSE(langid_ok("le chat est sur le tapis", Lang::kEn, cfg));
  CHECK(langid_ok("David traf Sarah in London", Lang::kDe, cfg));  // "in" ties en and de
  CHECK(langid_ok("xyzzy qwerty foo bar", Lang::kDe, cfg));       // nothing covered
}

TEST_CASE("two duplicates and a ratio violation leave one segment") {
  const auto out = preprocess({seg("Hi there", "Salut toi", 0), seg("Hi there", "Salut toi", 1),
                               seg("a b c d e f g h i j", "x", 2)},
                              PreprocessConfig{});
  REQUIRE(out.size() == 1);
  CHECK(out[0].src == "Hi there");
}

TEST_CASE("clean corpus is only reindexed") {
  std::vector<ParallelSegment> c = {seg("One", "Un", 5), seg("Two", "Deux", 9)};
  PreprocessStats stats;
  const auto out = preprocess(c, PreprocessConfig{}, &stats);
  REQUIRE(out.size() == 2);
  CHECK(out[0].index == 0);
  CHECK(out[1].index == 1);
  CHECK(pairs(out) == pairs(c));
  CHECK(stats.input == 2);
  CHECK(stats.kept == 2);
}

TEST_CASE("filters can be disabled; empty sides are always dropped") {
  PreprocessConfig cfg;
  cfg.use_ratio = false;
  cfg.use_langid = false;
  PreprocessStats stats;
  const auto out = preprocess({seg("a b c d e f g h i j", "x"), seg("the cat is on the mat", "le chat est sur le tapis"),
                               seg("", "x"), seg("y", "")},
                              cfg, &stats);
  CHECK(out.size() == 2);
  CHECK(stats.empty == 2);
}

TEST_CASE("wrong-language target is dropped") {
  PreprocessConfig cfg;
  cfg.expected_tgt_lang = Lang::kDe;
  PreprocessStats stats;
  const auto out = preprocess({seg("I do not know what he wants", "Je ne sais pas ce qu il veut")}, cfg, &stats);
  CHECK(out.empty());
  CHECK(stats.langid_dropped == 1);
}

TEST_CASE("preprocess is idempotent and yields a subsequence") {
  testutil::Gen gen(11);
  const std::vector<std::string> src_pool = {"the cat is here", "Hi", "José is on the mat", "a b c d e f g h i j k",
                                             "", "le chat est sur le tapis", "He is here ", "Anna"};
  const std::vector<std::string> tgt_pool = {"le chat est ici", "Salut", "x", "José est sur le tapis", "",
                                             "the dog is in the house", "Il est ici", "Anna"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ParallelSegment> c;
    const std::size_t n = gen.below(30);
    for (std::size_t i = 0; i < n; ++i) c.push_back(seg(gen.pick(src_pool), gen.pick(tgt_pool), i));
    const auto once = preprocess(c, PreprocessConfig{});
    const auto twice = preprocess(once, PreprocessConfig{});
    REQUIRE(once == twice);

    std::size_t j = 0;
    for (const auto& s : c) {
      if (j < once.size() && s.src == once[j].src && s.tgt == once[j].tgt) ++j;
    }
    REQUIRE(j == once.size());
  }
}
