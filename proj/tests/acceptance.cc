// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// gating criterion fails. Criterion 9 needs user-supplied data and runs only
// when AMBIG_ACCEPT_LARGE_DIR is set; it never gates.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <spdlog/spdlog.h>
#include <thread>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ambig/eval_sampling.h"
#include "ambig/gender_extract.h"
#include "ambig/name_detect.h"
#include "ambig/pipeline.h"
#include "ambig/preprocess.h"
#include "ambig/pronoun.h"
#include "oracles.h"
#include "test_util.h"

using namespace ambig;
using testutil::Gen;
using testutil::TempDir;
using testutil::read_file;

namespace {

constexpr double kKappaTol = 1e-12;
constexpr double kPctTol = 1e-9;
constexpr double kRecallSeconds = 1.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first failure message; later ones are counted.
class Failures {
 public:
  void add(const std::string& msg) {
    if (count_++ == 0) first_ = msg;
  }
  Outcome outcome(std::string ok_detail) const {
    if (count_ == 0) return {true, std::move(ok_detail)};
    return {false, fmt::format("{} failure(s); first: {}", count_, first_)};
  }

 private:
  std::size_t count_ = 0;
  std::string first_;
};

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

PipelineConfig mini_config(const std::filesystem::path& out, std::size_t jobs) {
  const auto d = testutil::data_dir() / "mini";
  PipelineConfig cfg;
  cfg.input.src = d / "src.en";
  cfg.input.tgt = d / "tgt.de";
  cfg.input.conllu = d / "tgt.conllu";
  cfg.input.ner = d / "ner.jsonl";
  cfg.preprocess.expected_tgt_lang = Lang::kDe;
  cfg.out_dir = out;
  cfg.jobs = jobs;
  return cfg;
}

// 1. Every name of the bundled list is accepted by the name rule.
Outcome regex_recall_check() {
  const auto names = read_lines(testutil::data_dir() / "humannames_sample.txt");
  if (names.size() < 1000) return {false, fmt::format("only {} names bundled", names.size())};
  const auto t0 = std::chrono::steady_clock::now();
  const double recall = regex_recall(NameCharPolicy{}, names);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = recall == 1.0 && secs < kRecallSeconds;
  return {ok, fmt::format("recall {:.6f} over {} names in {:.3f}s", recall, names.size(), secs)};
}

// 2. SP => SA => TC per span and in counts, over randomized NER sidecars.
Outcome method_monotonicity() {
  const std::vector<std::string> names = {"Anna", "Tom", "José", "Mary Ann", "O'Neil", "Jean-Luc", "Li", "Berg"};
  const std::vector<std::string> fillers = {"met", "the", "saw", "and", "with", "Yesterday", "in", "Paris"};
  const std::vector<std::string> labels = {"PERSON", "ORG", "GPE", "NORP"};
  Failures fail;
  Gen gen(2);
  std::size_t total_spans = 0, sa_spans = 0, sp_spans = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::uint64_t n_tc = 0, n_sa = 0, n_sp = 0;
    for (std::size_t line = 0; line < 500; ++line) {
      std::vector<std::string> src_words;
      std::vector<std::string> tgt_words;
      for (std::size_t k = 0, n = 2 + gen.below(7); k < n; ++k) {
        const bool is_name = gen.chance(0.4);
        const auto& w = is_name ? gen.pick(names) : gen.pick(fillers);
        src_words.push_back(w);
        if (is_name ? gen.chance(0.8) : gen.chance(0.3)) tgt_words.push_back(w);
        else tgt_words.push_back("x");
      }
      ParallelSegment s;
      s.index = line;
      for (const auto& w : src_words) s.src += (s.src.empty() ? "" : " ") + w;
      for (const auto& w : tgt_words) s.tgt += (s.tgt.empty() ? "" : " ") + w;
      const auto cp_len = oracle::code_points(s.src).size();
      std::vector<NerSpan> ner;
      for (std::size_t k = 0, n = gen.below(4); k < n && cp_len > 0; ++k) {
        const std::size_t a = gen.below(cp_len);
        const std::size_t b = a + 1 + gen.below(cp_len - a);
        ner.push_back({a, b, gen.pick(labels)});
      }
      // Also align some entities exactly with a TC span.
      for (const auto& sp : tc_spans(s, NameCharPolicy{})) {
        if (!gen.chance(0.5)) continue;
        const auto [a, b] = span_char_extent(sp, s.src);
        ner.push_back({a, b, gen.pick(labels)});
      }
      s.ner_spans = ner;
      bool any_tc = false, any_sa = false, any_sp = false;
      for (const auto& sp : detect_names(s, NameCharPolicy{})) {
        const auto& m = sp.methods;
        ++total_spans;
        sa_spans += m.sa;
        sp_spans += m.sp;
        if ((m.sp && !m.sa) || (m.sa && !m.tc) || !m.tc) {
          fail.add(fmt::format("line '{}' span '{}' tc={} sa={} sp={}", s.src, sp.surface, m.tc, m.sa, m.sp));
        }
        any_tc |= m.tc;
        any_sa |= m.sa;
        any_sp |= m.sp;
      }
      n_tc += any_tc;
      n_sa += any_sa;
      n_sp += any_sp;
    }
    if (!(n_sp <= n_sa && n_sa <= n_tc)) fail.add(fmt::format("counts sp={} sa={} tc={}", n_sp, n_sa, n_tc));
  }
  return fail.outcome(
      fmt::format("20 corpora x 500 lines, spans tc={} sa={} sp={}", total_spans, sa_spans, sp_spans));
}

// 3. Pronoun verdicts against the reference scanner.
Outcome pronoun_oracle() {
  const std::vector<std::string> pieces = {"he", "she", "HER", "hers", "Himself", "his", "him", "the", "ahe", "hisx",
                                           " ", " ", ",", ".", "'", "_", "1", "é", "ß", "—", "…", "«", "x", "-",
                                           "Ω", "ж", "中", "\xCC\x81", "herself", "sHe", "\t", "HeRsElF", "ſhe",
                                           "\xC2\xA0", "İ", "hE", "shehe"};
  Failures fail;
  Gen gen(3);
  std::size_t positive = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string line;
    for (std::size_t k = 0, n = gen.below(16); k < n; ++k) line += gen.pick(pieces);
    const bool expected = !oracle::pronouns(line).empty();
    positive += expected;
    if (has_binary_pronoun(line) != expected) fail.add(fmt::format("verdict differs on '{}'", line));
  }
  return fail.outcome(fmt::format("10000 lines, {} with a pronoun, 0 mismatches", positive));
}

// 4. Kappa fixtures.
Outcome kappa_fixtures() {
  Failures fail;
  const auto expect = [&](const std::vector<bool>& a, const std::vector<bool>& b, double want) {
    const double k = cohens_kappa(a, b).kappa;
    if (std::abs(k - want) > kKappaTol) fail.add(fmt::format("kappa {} != {}", k, want));
  };
  expect({true, true, false, false}, {true, false, false, false}, 0.5);
  expect({true, false, true, true, false}, {true, false, true, true, false}, 1.0);
  expect({true, false}, {false, true}, -1.0);
  return fail.outcome("0.5, 1.0, -1.0 within 1e-12");
}

// 5. Golden mini corpus: counts, percentages, labels and stable bytes.
Outcome golden_end_to_end() {
  Failures fail;
  TempDir dir;
  const auto golden = nlohmann::json::parse(read_file(testutil::data_dir() / "mini" / "golden_counts.json"));
  const auto first = run_pipeline(mini_config(dir / "a", 1));
  run_pipeline(mini_config(dir / "b", 1));
  run_pipeline(mini_config(dir / "c", 8));

  const std::uint64_t total = golden["total_lines"];
  if (first.total_lines != total) fail.add(fmt::format("total {} != {}", first.total_lines, total));
  const auto check = [&](const char* key, std::uint64_t got, double pct) {
    const std::uint64_t want = golden[key];
    if (got != want) fail.add(fmt::format("{} count {} != {}", key, got, want));
    const double want_pct = 100.0 * static_cast<double>(want) / static_cast<double>(total);
    if (std::abs(pct - want_pct) > kPctTol) fail.add(fmt::format("pct {} {} != {}", key, pct, want_pct));
  };
  check("tc", first.counts.tc, first.pct_tc);
  check("sa", first.counts.sa, first.pct_sa);
  check("sp", first.counts.sp, first.pct_sp);
  check("pronoun", first.counts.pronoun, first.pct_pronoun);
  check("name_and_pronoun", first.counts.name_and_pronoun, first.pct_name_and_pronoun);
  check("trg_gendered_tc", first.counts.trg_gendered_tc, first.pct_trg_gendered_tc);
  check("trg_gendered_no_pron", first.counts.trg_gendered_no_pron, first.pct_trg_gendered_no_pron);
  check("trg_gendered_with_pron", first.counts.trg_gendered_with_pron, first.pct_trg_gendered_with_pron);

  const auto stats = nlohmann::json::parse(read_file(dir / "a" / "preprocess_stats.json"));
  for (const auto& [k, v] : golden["preprocess"].items()) {
    if (stats[k] != v) fail.add(fmt::format("preprocess {} {} != {}", k, stats[k].dump(), v.dump()));
  }

  // Per-line labels against the hand trace.
  const auto got = read_labels_jsonl(dir / "a" / "labels.jsonl");
  const auto want = read_lines(testutil::data_dir() / "mini" / "golden_labels.jsonl");
  if (got.size() != want.size()) fail.add(fmt::format("{} label lines, expected {}", got.size(), want.size()));
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
    const auto w = nlohmann::json::parse(want[i]);
    const auto& g = got[i];
    std::vector<std::pair<std::string, std::string>> gt;
    std::vector<std::pair<std::string, std::string>> wt;
    for (const auto& t : g.gendered_terms) gt.emplace_back(t.form, std::string(gender_name(t.gender)));
    for (const auto& t : w["terms"]) wt.emplace_back(t["form"], t["gender"]);
    const std::string tag = g.tag == GenderTag::kFem ? "FEM" : g.tag == GenderTag::kMasc ? "MASC"
                            : g.tag == GenderTag::kMixed ? "MIXED" : "NONE";
    if (g.line != w["line"] || g.has_tc != w["tc"] || g.has_sa != w["sa"] || g.has_sp != w["sp"] ||
        g.has_binary_pronoun != w["pron"] || g.trg_gendered != w["trg_gendered"] || gt != wt || tag != w["tag"]) {
      fail.add(fmt::format("label line {} differs from the hand trace", i));
    }
  }

  for (const auto* name : {"report.json", "report.txt", "labels.jsonl", "spans.jsonl", "corpus.jsonl"}) {
    const auto a = read_file(dir / "a" / name);
    if (a != read_file(dir / "b" / name)) fail.add(fmt::format("{} differs across runs", name));
    if (a != read_file(dir / "c" / name)) fail.add(fmt::format("{} differs between --jobs 1 and 8", name));
  }
  return fail.outcome(fmt::format("{} lines, tc={} pronoun={} trg_gendered_tc={}, stable bytes", total,
                                  first.counts.tc, first.counts.pronoun, first.counts.trg_gendered_tc));
}

// 6. Preprocess idempotence and the subsequence property.
Outcome preprocess_properties() {
  const std::vector<std::string> src_pool = {"the cat is here", "Hi", "José is on the mat", "a b c d e f g h i j k",
                                             "", "le chat est sur le tapis", "He is here ", "Anna", "the cat is here  ",
                                             "der Hund ist in dem Haus", "it is what it is and that is all"};
  const std::vector<std::string> tgt_pool = {"le chat est ici", "Salut", "x", "José est sur le tapis", "",
                                             "the dog is in the house", "Il est ici", "Anna", "le chat est ici ",
                                             "c'est ce que c'est et c'est tout", "un deux trois quatre cinq six sept huit neuf dix"};
  Failures fail;
  Gen gen(6);
  std::size_t kept = 0, seen = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    PreprocessConfig cfg;
    cfg.use_langid = gen.chance(0.8);
    cfg.use_ratio = gen.chance(0.8);
    cfg.max_length_ratio = 1.5 + static_cast<double>(gen.below(10));
    std::vector<ParallelSegment> c;
    for (std::size_t i = 0, n = gen.below(40); i < n; ++i) {
      c.push_back(testutil::seg(gen.pick(src_pool), gen.pick(tgt_pool), i));
    }
    const auto once = preprocess(c, cfg);
    const auto twice = preprocess(once, cfg);
    if (once != twice) fail.add(fmt::format("trial {}: second pass changed the corpus", trial));
    std::size_t j = 0;
    for (const auto& s : c) {
      if (j < once.size() && s.src == once[j].src && s.tgt == once[j].tgt) ++j;
    }
    if (j != once.size()) fail.add(fmt::format("trial {}: output is not a subsequence", trial));
    kept += once.size();
    seen += c.size();
  }
  return fail.outcome(fmt::format("1000 corpora, kept {} of {} pairs", kept, seen));
}

// 7. Extraction against brute force on random trees.
Outcome extraction_oracle() {
  const char* feats[] = {"", "Gender=Masc", "Gender=Fem", "Gender=Neut", "Gender=Masc|Number=Sing", "Number=Plur"};
  const char* words[] = {"w", ",", "ist", "eine", "."};
  Failures fail;
  Gen gen(7);
  std::size_t terms = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(gen.below(12));
    // Random tree: the root is a random token, the others attach to any
    // already-attached token, so heads may precede or follow dependents.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), gen.rng());
    std::vector<int> head(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t k = 1; k < order.size(); ++k) head[static_cast<std::size_t>(order[k])] = order[gen.below(k)];
    ParsedSentence s;
    for (int id = 1; id <= n; ++id) {
      const auto* w = words[gen.below(5)];
      s.push_back(testutil::tok(id, std::string(w) + (w[0] == 'w' ? std::to_string(id) : ""),
                                head[static_cast<std::size_t>(id)], feats[gen.below(6)]));
    }
    const int start = 1 + static_cast<int>(gen.below(static_cast<std::size_t>(n)));
    const int len = 1 + static_cast<int>(gen.below(std::min<std::size_t>(3, static_cast<std::size_t>(n - start + 1))));
    std::vector<int> ids;
    for (int k = start; k < start + len; ++k) ids.push_back(k);
    for (const bool include_head : {false, true}) {
      std::vector<oracle::Term> got;
      for (const auto& t : extract_gendered_terms(ids, s, include_head)) {
        got.push_back({t.token_id, t.form, std::string(gender_name(t.gender)), t.relation == TermRelation::kHeadItself});
      }
      const auto want = oracle::gendered_terms(ids, s, include_head);
      terms += want.size();
      if (got != want) fail.add(fmt::format("trial {} include_head={}: {} terms vs {}", trial, include_head,
                                            got.size(), want.size()));
    }
  }
  return fail.outcome(fmt::format("200 trees, {} terms, 0 mismatches", terms));
}

// 8. Seeded sampling: draws match the reference generator and sheets are
// byte-identical across runs and to the frozen sheet.
Outcome sampling_determinism() {
  Failures fail;
  std::vector<std::size_t> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 0);
  const std::vector<std::size_t> want_draw = {13, 83, 86, 9, 2, 27, 87, 45, 65, 28};
  if (sample_indices(hundred, 10, 42) != want_draw) fail.add("sample_indices(0..99, 10, 42) differs from reference");

  TempDir dir;
  run_pipeline(mini_config(dir / "out", 1));
  PipelineConfig cfg;
  cfg.out_dir = dir / "out";
  cfg.input.corpus = dir / "out" / "corpus.jsonl";
  cfg.labels = dir / "out" / "labels.jsonl";
  cfg.spans = dir / "out" / "spans.jsonl";
  cfg.population = Population::kTrgGendered;
  cfg.sample_size = 6;
  cfg.seed = 2024;
  run_sample(cfg);
  const auto first = read_file(dir / "out" / "sheet.tsv");
  run_sample(cfg);
  if (read_file(dir / "out" / "sheet.tsv") != first) fail.add("sheet bytes differ across runs");
  const auto frozen = read_file(testutil::data_dir() / "mini" / "expected_sheet.tsv");
  if (first != frozen) fail.add("sheet bytes differ from the frozen sheet");
  return fail.outcome("draws match the reference generator; sheet matches frozen bytes");
}

// 9. Large-scale check on user-provided en-fr data (non-gating).
Outcome large_scale(const std::filesystem::path& dir) {
  PipelineConfig cfg;
  cfg.input.src = dir / "src.en";
  cfg.input.tgt = dir / "tgt.fr";
  cfg.input.conllu = dir / "tgt.conllu";
  if (std::filesystem::exists(dir / "ner.jsonl")) cfg.input.ner = dir / "ner.jsonl";
  cfg.out_dir = dir / "acceptance_out";
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto report = run_pipeline(cfg);
  PipelineConfig rc = cfg;
  rc.labels = cfg.out_dir / "labels.jsonl";
  rc.spans = cfg.out_dir / "spans.jsonl";
  rc.name = "John";
  const auto ratio = run_ratio(rc);
  const double share = report.counts.trg_gendered_tc == 0
                           ? 0.0
                           : static_cast<double>(report.counts.trg_gendered_no_pron) /
                                 static_cast<double>(report.counts.trg_gendered_tc);
  const bool ok = ratio.ratio && *ratio.ratio >= 1.8 && *ratio.ratio <= 2.6 && share > 0.8;
  return {ok, fmt::format("John ratio {}, no-pronoun share {:.3f}", ratio.ratio ? fmt::format("{:.3f}", *ratio.ratio) : "undefined",
                          share)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "name rule recall", regex_recall_check},
      {2, "method monotonicity", method_monotonicity},
      {3, "pronoun oracle equivalence", pronoun_oracle},
      {4, "kappa fixtures", kappa_fixtures},
      {5, "golden end-to-end", golden_end_to_end},
      {6, "preprocess properties", preprocess_properties},
      {7, "extraction oracle", extraction_oracle},
      {8, "sampling determinism", sampling_determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    fmt::print("{} [{}] {}: {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail);
  }
  if (const char* large = std::getenv("AMBIG_ACCEPT_LARGE_DIR")) {
    Outcome o;
    try {
      o = large_scale(large);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    fmt::print("{} [9] large-scale ratios (non-gating): {}\n", o.pass ? "PASS" : "FAIL", o.detail);
  } else {
    fmt::print("SKIP [9] large-scale ratios (non-gating): set AMBIG_ACCEPT_LARGE_DIR to run\n");
  }
  return all ? 0 : 1;
}
