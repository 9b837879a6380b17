// ambig_miner: mine gender-ambiguous person-name segments from parallel
// corpora. One subcommand per pipeline stage; see --help.

#include <spdlog/spdlog.h>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ambig/error.h"
#include "ambig/pipeline.h"
#include "ambig/report.h"

namespace {

using ambig::PipelineConfig;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInput = 3 };

struct Flags {
  std::string src_lang = "en";
  std::string tgt_lang = "fr";
  std::string method = "tc";
  std::string population = "detected";
  std::string question = "is-person-name";
  std::string pronoun_side = "src";
  bool paper_literal = false;
  bool no_langid = false;
  bool no_ratio = false;
  std::uint64_t total = 0;
};

void add_bitext(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--src", cfg.input.src, "Source side, one segment per line");
  cmd->add_option("--tgt", cfg.input.tgt, "Target side, one segment per line");
}

void add_corpus(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--corpus", cfg.input.corpus, "Interchange corpus.jsonl (from preprocess)");
  add_bitext(cmd, cfg);
}

void add_sidecars(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--conllu", cfg.input.conllu, "CoNLL-U parses of the target side");
  cmd->add_option("--ner-sidecar", cfg.input.ner, "NER spans of the source side (JSONL)");
}

void add_policy(CLI::App* cmd, Flags& f) {
  cmd->add_flag("--paper-literal-range", f.paper_literal,
                "Read the name class with '-_ as a range (U+0027..U+005F); auditing only");
}

void add_method(CLI::App* cmd, Flags& f) {
  cmd->add_option("--method", f.method, "Detection method")->check(CLI::IsMember({"tc", "sa", "sp"}));
}

// Settles the string-valued flags into the typed config.
void finalize(PipelineConfig& cfg, const Flags& f, bool total_given) {
  cfg.preprocess.expected_src_lang = ambig::parse_lang(f.src_lang);
  cfg.preprocess.expected_tgt_lang = ambig::parse_lang(f.tgt_lang);
  cfg.preprocess.use_langid = !f.no_langid;
  cfg.preprocess.use_ratio = !f.no_ratio;
  cfg.method = ambig::parse_method(f.method);
  cfg.population = ambig::parse_population(f.population);
  cfg.question = ambig::parse_question(f.question);
  cfg.pronoun_side = ambig::parse_pronoun_side(f.pronoun_side);
  cfg.policy.range = f.paper_literal ? ambig::NameCharPolicy::Range::kPaperLiteral
                                     : ambig::NameCharPolicy::Range::kLiteral;
  if (total_given) cfg.total = f.total;
}

int run_stage(const std::string& stage, const PipelineConfig& cfg) {
  if (stage == "preprocess") {
    ambig::run_preprocess(cfg);
  } else if (stage == "detect") {
    ambig::run_detect(cfg);
  } else if (stage == "extract") {
    ambig::run_extract(cfg);
  } else if (stage == "report") {
    std::cout << ambig::render_report_table(ambig::run_report(cfg));
  } else if (stage == "ratio") {
    std::cout << ambig::ratio_to_json(ambig::run_ratio(cfg)).dump() << '\n';
  } else if (stage == "sample") {
    ambig::run_sample(cfg);
  } else if (stage == "agree") {
    std::cout << ambig::run_agree(cfg).dump(2) << '\n';
  } else if (stage == "tag") {
    ambig::run_tag(cfg);
  } else if (stage == "score") {
    ambig::run_score(cfg);
  } else if (stage == "recall") {
    std::cout << ambig::run_recall(cfg) << '\n';
  } else if (stage == "pipeline") {
    std::cout << ambig::render_report_table(ambig::run_pipeline(cfg));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  ambig::init_logging_from_env();

  CLI::App app{"Mine gender-ambiguous person-name segments from parallel corpora"};
  app.set_version_flag("--version", std::string(ambig::tool_version()));
  app.require_subcommand(1);

  PipelineConfig cfg;
  Flags f;
  app.add_option("--jobs,-j", cfg.jobs, "Worker threads for per-line stages")->check(CLI::Range(1, 1024));
  app.add_option("--out,-o", cfg.out_dir, "Output directory");
  app.add_option("--seed", cfg.seed, "Seed for sampling");

  auto* pre = app.add_subcommand("preprocess", "Dedup, length-ratio and language-id filtering");
  add_bitext(pre, cfg);
  add_sidecars(pre, cfg);
  pre->add_option("--max-ratio", cfg.preprocess.max_length_ratio, "Maximum token-count ratio between sides");
  pre->add_option("--src-lang", f.src_lang, "Expected source language")->check(CLI::IsMember({"en", "fr", "de", "es"}));
  pre->add_option("--tgt-lang", f.tgt_lang, "Expected target language")->check(CLI::IsMember({"en", "fr", "de", "es"}));
  pre->add_flag("--no-langid", f.no_langid, "Skip the language-id filter");
  pre->add_flag("--no-ratio", f.no_ratio, "Skip the length-ratio filter");

  auto* detect = app.add_subcommand("detect", "Person-name candidates (TC/SA/SP) as spans.jsonl");
  add_corpus(detect, cfg);
  detect->add_option("--ner-sidecar", cfg.input.ner, "NER spans of the source side (required for sa/sp)");
  add_method(detect, f);
  add_policy(detect, f);

  auto* extract = app.add_subcommand("extract", "Per-line labels with target gendered terms");
  add_corpus(extract, cfg);
  add_sidecars(extract, cfg);
  extract->add_option("--spans", cfg.spans, "spans.jsonl from detect (default: detect inline)");
  extract->add_flag("--include-head", cfg.include_head, "Also count a gendered head token");
  extract->add_option("--pronoun-side", f.pronoun_side, "Side scanned for binary pronouns")
      ->check(CLI::IsMember({"src", "tgt"}));
  add_policy(extract, f);

  auto* report = app.add_subcommand("report", "Dataset percentages from labels.jsonl");
  report->add_option("--labels", cfg.labels, "labels.jsonl from extract")->required();
  auto* total_opt = report->add_option("--total", f.total, "Corpus line count (default: labelled lines)");

  auto* ratio = app.add_subcommand("ratio", "Masculine:feminine term ratio for one name");
  ratio->add_option("--labels", cfg.labels, "labels.jsonl")->required();
  ratio->add_option("--spans", cfg.spans, "spans.jsonl")->required();
  ratio->add_option("--name", cfg.name, "Name surface, matched exactly")->required();

  auto* smp = app.add_subcommand("sample", "Seeded annotation sheet");
  add_corpus(smp, cfg);
  smp->add_option("--labels", cfg.labels, "labels.jsonl")->required();
  smp->add_option("--spans", cfg.spans, "spans.jsonl used for the surface column");
  smp->add_option("--population", f.population, "Lines to draw from")
      ->check(CLI::IsMember({"detected", "non-detected", "trg-gendered"}));
  smp->add_option("--question", f.question, "Annotation question")
      ->check(CLI::IsMember({"is-person-name", "is-coreferent", "name", "coref"}));
  smp->add_option("--n", cfg.sample_size, "Sample size");
  add_method(smp, f);
  add_policy(smp, f);

  auto* agree = app.add_subcommand("agree", "Rates and Cohen's kappa over filled sheets");
  agree->add_option("--a", cfg.sheet_a, "First annotator's sheet")->required();
  agree->add_option("--b", cfg.sheet_b, "Second annotator's sheet");

  auto* tag = app.add_subcommand("tag", "Prefix source lines with gender tags");
  tag->add_option("--src", cfg.input.src, "Source side")->required();
  tag->add_option("--labels", cfg.labels, "labels.jsonl")->required();
  tag->add_flag("--tag-none", cfg.tag_none, "Also prefix <NONE> on untagged lines");

  auto* score = app.add_subcommand("score", "Gendered-term counts for translation hypotheses");
  score->add_option("--hyp-conllu", cfg.hyp_conllu, "CoNLL-U parses of the hypotheses")->required();
  score->add_option("--spans", cfg.spans, "spans.jsonl of the source side")->required();
  score->add_flag("--include-head", cfg.include_head, "Also count a gendered head token");
  add_policy(score, f);

  auto* recall = app.add_subcommand("recall", "Share of a name list the name rule accepts");
  recall->add_option("--name-list", cfg.name_list, "One name per line")->required();
  add_policy(recall, f);

  auto* pipe = app.add_subcommand("pipeline", "preprocess, detect, extract and report in one run");
  add_bitext(pipe, cfg);
  add_sidecars(pipe, cfg);
  pipe->add_option("--max-ratio", cfg.preprocess.max_length_ratio, "Maximum token-count ratio between sides");
  pipe->add_option("--src-lang", f.src_lang, "Expected source language")->check(CLI::IsMember({"en", "fr", "de", "es"}));
  pipe->add_option("--tgt-lang", f.tgt_lang, "Expected target language")->check(CLI::IsMember({"en", "fr", "de", "es"}));
  pipe->add_flag("--no-langid", f.no_langid, "Skip the language-id filter");
  pipe->add_flag("--no-ratio", f.no_ratio, "Skip the length-ratio filter");
  pipe->add_flag("--include-head", cfg.include_head, "Also count a gendered head token");
  add_method(pipe, f);
  add_policy(pipe, f);

  CLI11_PARSE(app, argc, argv);

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    finalize(cfg, f, total_opt->count() > 0);
    return run_stage(stage, cfg);
  } catch (const ambig::ConfigError& e) {
    spdlog::error("{}: config error: {}", stage, e.what());
    return kConfig;
  } catch (const ambig::Error& e) {
    spdlog::error("{}: {}", stage, e.what());
    return kInput;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", stage, e.what());
    return kFailure;
  }
}
