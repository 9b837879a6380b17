#include "ambig/pipeline.h"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "ambig/content_hash.h"
#include "ambig/error.h"
#include "ambig/pronoun.h"
#include "ambig/tagger.h"
#include "ambig/text.h"

namespace ambig {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kBatchSize = 8192;

// Writes to "<path>.tmp" and renames on commit, so an interrupted stage never
// leaves a truncated artifact under the final name.
class AtomicOutput {
 public:
  explicit AtomicOutput(fs::path path) : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
    out_ = open_output(tmp_);
  }
  ~AtomicOutput() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }
  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw Error("write failed: " + tmp_.string());
    out_.close();
    fs::rename(tmp_, path_);
    committed_ = true;
  }

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  fs::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_text_file(const fs::path& path, std::string_view content) {
  AtomicOutput out(path);
  out.stream() << content;
  out.commit();
}

ordered_json config_to_json(const PipelineConfig& cfg) {
  const auto p = [](const fs::path& path) { return path.empty() ? ordered_json(nullptr) : ordered_json(path.generic_string()); };
  ordered_json j;
  j["corpus"] = p(cfg.input.corpus);
  j["src"] = p(cfg.input.src);
  j["tgt"] = p(cfg.input.tgt);
  j["conllu"] = p(cfg.input.conllu);
  j["ner"] = p(cfg.input.ner);
  j["spans"] = p(cfg.spans);
  j["labels"] = p(cfg.labels);
  j["name_list"] = p(cfg.name_list);
  j["hyp_conllu"] = p(cfg.hyp_conllu);
  j["preprocess"] = {
      {"max_length_ratio", cfg.preprocess.max_length_ratio},
      {"src_lang", lang_code(cfg.preprocess.expected_src_lang)},
      {"tgt_lang", lang_code(cfg.preprocess.expected_tgt_lang)},
      {"min_tokens_for_langid", cfg.preprocess.min_tokens_for_langid},
      {"use_ratio", cfg.preprocess.use_ratio},
      {"use_langid", cfg.preprocess.use_langid},
  };
  j["name_range"] = cfg.policy.range == NameCharPolicy::Range::kLiteral ? "literal" : "paper-literal";
  j["method"] = method_name(cfg.method);
  j["include_head"] = cfg.include_head;
  j["pronoun_side"] = pronoun_side_name(cfg.pronoun_side);
  j["tag_none"] = cfg.tag_none;
  j["total"] = cfg.total ? ordered_json(*cfg.total) : ordered_json(nullptr);
  j["population"] = population_name(cfg.population);
  j["question"] = question_name(cfg.question);
  j["n"] = cfg.sample_size;
  return j;
}

// Manifest beside the stage's artifacts. Output paths are recorded relative
// to the output directory so reruns elsewhere stay byte-identical.
void write_manifest(const PipelineConfig& cfg, std::string_view stage, const std::vector<fs::path>& inputs,
                    const std::vector<fs::path>& outputs, ordered_json extra = ordered_json::object()) {
  ordered_json m;
  m["tool"] = "ambig_miner";
  m["version"] = tool_version();
  m["stage"] = stage;
  m["seed"] = cfg.seed;
  m["config"] = config_to_json(cfg);
  auto in = ordered_json::array();
  for (const auto& path : inputs) {
    if (path.empty()) continue;
    in.push_back({{"path", path.generic_string()}, {"sha256", sha256_file_hex(path)}});
  }
  m["inputs"] = std::move(in);
  auto out = ordered_json::array();
  for (const auto& path : outputs) {
    out.push_back({{"path", path.filename().generic_string()}, {"sha256", sha256_file_hex(path)}});
  }
  m["outputs"] = std::move(out);
  if (!extra.empty()) m["summary"] = std::move(extra);
  write_text_file(cfg.out_dir / ("manifest." + std::string(stage) + ".json"), m.dump(2) + "\n");
}

// Applies fn to every item on up to `jobs` threads; output order matches input.
template <typename T, typename F>
auto parallel_map(const std::vector<T>& items, std::size_t jobs, F fn) {
  using R = std::invoke_result_t<F, const T&>;
  std::vector<R> out(items.size());
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), items.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
    return out;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> threads;
  const std::size_t chunk = (items.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(items.size(), begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) out[i] = fn(items[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

bool has_bitext(const InputPaths& in) { return !in.src.empty() && !in.tgt.empty(); }

void require_segments_input(const PipelineConfig& cfg, std::string_view stage) {
  if (cfg.input.corpus.empty() && !has_bitext(cfg.input)) {
    throw ConfigError(std::string(stage) + " needs --corpus or both --src and --tgt");
  }
}

void require_file(const fs::path& path, std::string_view flag, std::string_view stage) {
  if (path.empty()) throw ConfigError(std::string(stage) + " needs " + std::string(flag));
  if (!fs::exists(path)) throw ConfigError(std::string(stage) + ": " + path.string() + " does not exist");
}

void check_exists(const fs::path& path, std::string_view stage) {
  if (!path.empty() && !fs::exists(path)) {
    throw ConfigError(std::string(stage) + ": " + path.string() + " does not exist");
  }
}

void prepare_out_dir(const PipelineConfig& cfg) { fs::create_directories(cfg.out_dir); }

std::vector<fs::path> input_files(const InputPaths& in) { return {in.corpus, in.src, in.tgt, in.conllu, in.ner}; }

std::string join_surfaces(const std::vector<NameSpan>& spans) {
  std::string out;
  for (const auto& s : spans) {
    if (!out.empty()) out += "; ";
    out += s.surface;
  }
  return out;
}

}  // namespace

std::string_view tool_version() { return AMBIG_MINER_VERSION; }

void init_logging_from_env() {
  auto logger = spdlog::get("ambig_miner");
  if (!logger) logger = spdlog::stderr_color_mt("ambig_miner");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("AMBIG_MINER_LOG")) {
    const auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to "off"; only honour explicit "off".
    if (parsed != spdlog::level::off || std::string_view(level) == "off") spdlog::set_level(parsed);
  }
}

std::string_view population_name(Population p) {
  switch (p) {
    case Population::kDetected: return "detected";
    case Population::kNonDetected: return "non-detected";
    case Population::kTrgGendered: return "trg-gendered";
  }
  return "detected";
}

Population parse_population(std::string_view name) {
  if (name == "detected") return Population::kDetected;
  if (name == "non-detected") return Population::kNonDetected;
  if (name == "trg-gendered") return Population::kTrgGendered;
  throw ConfigError("unknown population '" + std::string(name) + "'");
}

std::string_view pronoun_side_name(PronounSide s) { return s == PronounSide::kSrc ? "src" : "tgt"; }

PronounSide parse_pronoun_side(std::string_view name) {
  if (name == "src") return PronounSide::kSrc;
  if (name == "tgt") return PronounSide::kTgt;
  throw ConfigError("unknown pronoun side '" + std::string(name) + "' (use src or tgt)");
}

// ---------------------------------------------------------------------------
// Readers

struct SegmentSource::Impl {
  std::ifstream corpus_in;
  std::unique_ptr<CorpusJsonlReader> corpus;
  std::unique_ptr<BitextReader> bitext;
  std::ifstream conllu_in;
  std::unique_ptr<ConlluReader> conllu;
  std::ifstream ner_in;
  std::unique_ptr<NerSidecarReader> ner;
  std::size_t position = 0;
};

SegmentSource::SegmentSource(const InputPaths& paths) : impl_(std::make_unique<Impl>()) {
  if (!paths.corpus.empty()) {
    impl_->corpus_in = open_input(paths.corpus);
    impl_->corpus = std::make_unique<CorpusJsonlReader>(impl_->corpus_in, paths.corpus.string());
  } else if (has_bitext(paths)) {
    impl_->bitext = std::make_unique<BitextReader>(paths.src, paths.tgt);
  } else {
    throw ConfigError("no corpus or bitext input given");
  }
  if (!paths.conllu.empty()) {
    impl_->conllu_in = open_input(paths.conllu);
    impl_->conllu = std::make_unique<ConlluReader>(impl_->conllu_in, paths.conllu.string());
  }
  if (!paths.ner.empty()) {
    impl_->ner_in = open_input(paths.ner);
    impl_->ner = std::make_unique<NerSidecarReader>(impl_->ner_in, paths.ner.string());
  }
}

SegmentSource::~SegmentSource() = default;

bool SegmentSource::next(ParallelSegment& seg) {
  auto& d = *impl_;
  const bool more = d.corpus ? d.corpus->next(seg) : d.bitext->next(seg);
  if (!more) {
    ParsedSentence extra_parse;
    if (d.conllu && d.conllu->next(extra_parse)) {
      throw AlignmentError("parse count mismatch: CoNLL-U has more sentences than the " +
                           std::to_string(d.position) + " corpus lines");
    }
    std::vector<NerSpan> extra_spans;
    if (d.ner && d.ner->next(d.position, extra_spans)) {
      throw AlignmentError("NER sidecar has more records than the " + std::to_string(d.position) + " corpus lines");
    }
    return false;
  }
  if (d.conllu) {
    ParsedSentence parse;
    if (!d.conllu->next(parse)) {
      throw AlignmentError("parse count mismatch: CoNLL-U ends before corpus line " + std::to_string(d.position));
    }
    if (!matches_text(parse, seg.tgt)) {
      if (parse_mismatches_ < 5) spdlog::debug("parse of line {} does not spell its target text", d.position);
      ++parse_mismatches_;
    }
    seg.tgt_parse = std::move(parse);
  }
  if (d.ner) {
    std::vector<NerSpan> spans;
    if (!d.ner->next(d.position, spans)) {
      throw AlignmentError("NER sidecar ends before corpus line " + std::to_string(d.position));
    }
    check_ner_spans(spans, seg.src, d.position);
    seg.ner_spans = std::move(spans);
  }
  ++d.position;
  return true;
}

SpanReader::SpanReader(std::istream& in, std::string source_name) : in_(in), name_(std::move(source_name)) {}

bool SpanReader::peek() {
  if (pending_) return true;
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (trim_whitespace(line).empty()) continue;
    try {
      pending_ = span_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name_, line_no_, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(name_, line_no_, e.what());
    }
    if (any_ && pending_->segment_index < last_line_) {
      throw ParseError(name_, line_no_, "span records out of line order");
    }
    any_ = true;
    last_line_ = pending_->segment_index;
    return true;
  }
  return false;
}

std::vector<NameSpan> SpanReader::spans_for(std::size_t line) {
  std::vector<NameSpan> out;
  while (peek()) {
    if (pending_->segment_index < line) {
      throw AlignmentError(name_ + ": span for line " + std::to_string(pending_->segment_index) +
                           " has no matching segment");
    }
    if (pending_->segment_index > line) break;
    out.push_back(std::move(*pending_));
    pending_.reset();
  }
  return out;
}

void SpanReader::expect_end(std::size_t lines) {
  if (peek()) {
    throw AlignmentError(name_ + ": span for line " + std::to_string(pending_->segment_index) +
                         " beyond the " + std::to_string(lines) + " input lines");
  }
}

LabelReader::LabelReader(std::istream& in, std::string source_name) : in_(in), name_(std::move(source_name)) {}

bool LabelReader::next(SegmentLabels& labels) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (trim_whitespace(line).empty()) continue;
    try {
      labels = labels_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name_, line_no_, e.what());
    } catch (const Error& e) {
      throw ParseError(name_, line_no_, e.what());
    }
    return true;
  }
  return false;
}

std::vector<SegmentLabels> read_labels_jsonl(const fs::path& path) {
  auto in = open_input(path);
  LabelReader reader(in, path.string());
  std::vector<SegmentLabels> out;
  SegmentLabels labels;
  while (reader.next(labels)) out.push_back(std::move(labels));
  return out;
}

std::vector<NameSpan> read_spans_jsonl(const fs::path& path) {
  auto in = open_input(path);
  std::vector<NameSpan> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_whitespace(line).empty()) continue;
    try {
      out.push_back(span_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stages

void validate_config(const PipelineConfig& cfg, std::string_view stage) {
  for (const auto& path : input_files(cfg.input)) check_exists(path, stage);
  if (stage != "tag" && !cfg.input.src.empty() != !cfg.input.tgt.empty() && cfg.input.corpus.empty()) {
    throw ConfigError(std::string(stage) + " needs both --src and --tgt");
  }
  if (stage == "preprocess" || stage == "pipeline") {
    if (!has_bitext(cfg.input) && cfg.input.corpus.empty()) {
      throw ConfigError(std::string(stage) + " needs --src and --tgt (or --corpus)");
    }
    cfg.preprocess.validate();
  }
  if (stage == "detect" || stage == "extract" || stage == "pipeline") {
    require_segments_input(cfg, stage);
    if (cfg.method != Method::kTc && cfg.input.ner.empty() && cfg.input.corpus.empty()) {
      throw ConfigError(std::string(stage) + ": --method " + std::string(method_name(cfg.method)) +
                        " needs --ner-sidecar");
    }
  }
  if (stage == "extract" || stage == "pipeline") {
    if (cfg.input.conllu.empty() && cfg.input.corpus.empty()) {
      throw ConfigError(std::string(stage) + " needs --conllu with target parses");
    }
    check_exists(cfg.spans, stage);
  }
  if (stage == "report") require_file(cfg.labels, "--labels", stage);
  if (stage == "ratio") {
    require_file(cfg.labels, "--labels", stage);
    require_file(cfg.spans, "--spans", stage);
    if (cfg.name.empty()) throw ConfigError("ratio needs a non-empty --name");
  }
  if (stage == "sample") {
    require_file(cfg.labels, "--labels", stage);
    require_segments_input(cfg, stage);
    check_exists(cfg.spans, stage);
  }
  if (stage == "agree") require_file(cfg.sheet_a, "--a", stage), check_exists(cfg.sheet_b, stage);
  if (stage == "tag") {
    require_file(cfg.labels, "--labels", stage);
    require_file(cfg.input.src, "--src", stage);
  }
  if (stage == "score") {
    require_file(cfg.hyp_conllu, "--hyp-conllu", stage);
    require_file(cfg.spans, "--spans", stage);
  }
  if (stage == "recall") require_file(cfg.name_list, "--name-list", stage);
}

PreprocessStats run_preprocess(const PipelineConfig& cfg) {
  validate_config(cfg, "preprocess");
  prepare_out_dir(cfg);
  SegmentSource source(cfg.input);
  StreamingPreprocessor pre(cfg.preprocess);

  AtomicOutput corpus(cfg.out_dir / "corpus.jsonl");
  AtomicOutput src(cfg.out_dir / "src.txt");
  AtomicOutput tgt(cfg.out_dir / "tgt.txt");
  ParallelSegment seg;
  while (source.next(seg)) {
    if (auto kept = pre.accept(std::move(seg))) {
      write_segment_jsonl(corpus.stream(), *kept);
      src.stream() << kept->src << '\n';
      tgt.stream() << kept->tgt << '\n';
    }
  }
  corpus.commit();
  src.commit();
  tgt.commit();

  const auto& s = pre.stats();
  const ordered_json summary = {{"input", s.input},           {"duplicates", s.duplicates},
                                {"empty", s.empty},           {"ratio_dropped", s.ratio_dropped},
                                {"langid_dropped", s.langid_dropped}, {"kept", s.kept}};
  write_text_file(cfg.out_dir / "preprocess_stats.json", summary.dump(2) + "\n");
  write_manifest(cfg, "preprocess", input_files(cfg.input),
                 {corpus.path(), src.path(), tgt.path(), cfg.out_dir / "preprocess_stats.json"}, summary);
  spdlog::info("preprocess: kept {} of {} lines ({} duplicates, {} empty, {} ratio, {} langid)", s.kept, s.input,
               s.duplicates, s.empty, s.ratio_dropped, s.langid_dropped);
  return s;
}

std::size_t run_detect(const PipelineConfig& cfg) {
  validate_config(cfg, "detect");
  prepare_out_dir(cfg);
  SegmentSource source(cfg.input);
  AtomicOutput out(cfg.out_dir / "spans.jsonl");
  const bool needs_ner = cfg.method != Method::kTc;

  std::size_t written = 0;
  std::vector<ParallelSegment> batch;
  const auto flush = [&] {
    const auto spans = parallel_map(batch, cfg.jobs, [&](const ParallelSegment& seg) {
      if (needs_ner && !seg.ner_spans) {
        throw ConfigError("detect: line " + std::to_string(seg.index) + " has no NER spans; pass --ner-sidecar");
      }
      return detect_names(seg, cfg.policy);
    });
    for (const auto& seg_spans : spans) {
      for (const auto& span : seg_spans) {
        if (!has_method(span.methods, cfg.method)) continue;
        out.stream() << span_to_json(span).dump() << '\n';
        ++written;
      }
    }
    batch.clear();
  };
  ParallelSegment seg;
  while (source.next(seg)) {
    batch.push_back(std::move(seg));
    if (batch.size() >= kBatchSize * std::max<std::size_t>(cfg.jobs, 1)) flush();
  }
  flush();
  out.commit();
  write_manifest(cfg, "detect", input_files(cfg.input), {out.path()}, {{"spans", written}});
  spdlog::info("detect: {} {} spans", written, method_name(cfg.method));
  return written;
}

ReportCounts run_extract(const PipelineConfig& cfg) {
  validate_config(cfg, "extract");
  prepare_out_dir(cfg);
  SegmentSource source(cfg.input);
  std::ifstream spans_in;
  std::unique_ptr<SpanReader> spans;
  if (!cfg.spans.empty()) {
    spans_in = open_input(cfg.spans);
    spans = std::make_unique<SpanReader>(spans_in, cfg.spans.string());
  }
  AtomicOutput out(cfg.out_dir / "labels.jsonl");
  ReportCounts counts;

  struct Work {
    ParallelSegment seg;
    std::optional<std::vector<NameSpan>> spans;
  };
  std::vector<Work> batch;
  const auto flush = [&] {
    const auto labels = parallel_map(batch, cfg.jobs, [&](const Work& w) {
      const auto spans_here = w.spans ? *w.spans : detect_names(w.seg, cfg.policy);
      auto labels = label_segment(w.seg, spans_here, cfg.include_head, cfg.policy);
      if (cfg.pronoun_side == PronounSide::kTgt) labels.has_binary_pronoun = has_binary_pronoun(w.seg.tgt);
      return labels;
    });
    for (const auto& l : labels) {
      out.stream() << labels_to_json(l).dump() << '\n';
      counts.add(l);
    }
    batch.clear();
  };
  ParallelSegment seg;
  std::size_t lines = 0;
  while (source.next(seg)) {
    Work w;
    if (spans) w.spans = spans->spans_for(seg.index);
    w.seg = std::move(seg);
    batch.push_back(std::move(w));
    ++lines;
    if (batch.size() >= kBatchSize * std::max<std::size_t>(cfg.jobs, 1)) flush();
  }
  flush();
  if (spans) spans->expect_end(lines);
  out.commit();
  if (source.parse_text_mismatches() > 0) {
    spdlog::warn("extract: {} parses do not spell their target line (whitespace ignored)",
                 source.parse_text_mismatches());
  }
  write_manifest(cfg, "extract", {cfg.input.corpus, cfg.input.src, cfg.input.tgt, cfg.input.conllu, cfg.input.ner, cfg.spans},
                 {out.path()}, {{"lines", counts.lines}, {"trg_gendered_tc", counts.trg_gendered_tc}});
  spdlog::info("extract: {} lines, {} trg-gendered", counts.lines, counts.trg_gendered_tc);
  return counts;
}

DatasetReport run_report(const PipelineConfig& cfg) {
  validate_config(cfg, "report");
  prepare_out_dir(cfg);
  auto in = open_input(cfg.labels);
  LabelReader reader(in, cfg.labels.string());
  ReportCounts counts;
  SegmentLabels labels;
  while (reader.next(labels)) counts.add(labels);
  const auto report = build_report(counts, cfg.total.value_or(counts.lines));

  const auto json_path = cfg.out_dir / "report.json";
  const auto text_path = cfg.out_dir / "report.txt";
  write_text_file(json_path, report_to_json(report).dump(2) + "\n");
  write_text_file(text_path, render_report_table(report));
  write_manifest(cfg, "report", {cfg.labels}, {json_path, text_path});
  return report;
}

NameGenderRatio run_ratio(const PipelineConfig& cfg) {
  validate_config(cfg, "ratio");
  prepare_out_dir(cfg);
  auto labels_in = open_input(cfg.labels);
  auto spans_in = open_input(cfg.spans);
  LabelReader labels(labels_in, cfg.labels.string());
  SpanReader spans(spans_in, cfg.spans.string());
  NameRatioAccumulator acc(cfg.name);
  SegmentLabels l;
  std::size_t lines = 0;
  while (labels.next(l)) {
    acc.add(spans.spans_for(l.line), l);
    lines = l.line + 1;
  }
  spans.expect_end(lines);
  const auto result = acc.result();
  const auto path = cfg.out_dir / "ratio.json";
  write_text_file(path, ratio_to_json(result).dump(2) + "\n");
  write_manifest(cfg, "ratio", {cfg.labels, cfg.spans}, {path});
  return result;
}

AnnotationSheet run_sample(const PipelineConfig& cfg) {
  validate_config(cfg, "sample");
  prepare_out_dir(cfg);
  const auto in_population = [&](const SegmentLabels& l) {
    switch (cfg.population) {
      case Population::kDetected: return has_method({l.has_tc, l.has_sa, l.has_sp}, cfg.method);
      case Population::kNonDetected: return !has_method({l.has_tc, l.has_sa, l.has_sp}, cfg.method);
      case Population::kTrgGendered: return l.trg_gendered;
    }
    return false;
  };

  std::vector<std::size_t> population;
  {
    auto in = open_input(cfg.labels);
    LabelReader reader(in, cfg.labels.string());
    SegmentLabels l;
    while (reader.next(l)) {
      if (in_population(l)) population.push_back(l.line);
    }
  }
  const std::string sample_id = fmt::format("{}-{}-n{}-seed{}", population_name(cfg.population),
                                            question_name(cfg.question), cfg.sample_size, cfg.seed);
  auto sheet = sample(population, cfg.sample_size, cfg.seed, cfg.question, sample_id);

  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < sheet.items.size(); ++i) slot.emplace(sheet.items[i].segment_index, i);

  // Second pass: fill text, surfaces and (for trg-gendered) the terms.
  SegmentSource source(cfg.input);
  auto labels_in = open_input(cfg.labels);
  LabelReader labels(labels_in, cfg.labels.string());
  std::ifstream spans_in;
  std::unique_ptr<SpanReader> spans;
  if (!cfg.spans.empty()) {
    spans_in = open_input(cfg.spans);
    spans = std::make_unique<SpanReader>(spans_in, cfg.spans.string());
  }
  ParallelSegment seg;
  SegmentLabels l;
  while (source.next(seg)) {
    if (!labels.next(l) || l.line != seg.index) {
      throw AlignmentError("sample: labels do not align with corpus line " + std::to_string(seg.index));
    }
    auto seg_spans = spans ? spans->spans_for(seg.index) : std::vector<NameSpan>{};
    const auto it = slot.find(seg.index);
    if (it == slot.end()) continue;
    auto& item = sheet.items[it->second];
    item.src = seg.src;
    item.tgt = seg.tgt;
    if (cfg.population != Population::kNonDetected) {
      if (!spans) seg_spans = detect_names(seg, cfg.policy);
      item.surface = join_surfaces(seg_spans);
      if (cfg.population == Population::kTrgGendered && !l.gendered_terms.empty()) {
        item.surface += " |";
        for (const auto& t : l.gendered_terms) item.surface += fmt::format(" {}({})", t.form, gender_name(t.gender));
      }
    }
  }

  const auto path = cfg.out_dir / "sheet.tsv";
  AtomicOutput out(path);
  write_sheet_tsv(out.stream(), sheet);
  out.commit();
  write_manifest(cfg, "sample", {cfg.labels, cfg.input.corpus, cfg.input.src, cfg.input.tgt, cfg.spans}, {path},
                 {{"population_size", population.size()}, {"n", sheet.items.size()}});
  spdlog::info("sample: {} of {} {} lines", sheet.items.size(), population.size(), population_name(cfg.population));
  return sheet;
}

nlohmann::ordered_json run_agree(const PipelineConfig& cfg) {
  validate_config(cfg, "agree");
  prepare_out_dir(cfg);
  const auto load = [](const fs::path& p) {
    auto in = open_input(p);
    return read_sheet_tsv(in, p.string());
  };
  const auto rate_of = [](const AnnotationSheet& s) {
    const bool complete = !s.items.empty() && std::all_of(s.items.begin(), s.items.end(),
                                                          [](const SheetItem& i) { return i.mark.has_value(); });
    return complete ? ordered_json(estimate_rate(s)) : ordered_json(nullptr);
  };
  ordered_json result;
  const auto a = load(cfg.sheet_a);
  result["a"] = {{"sample_id", a.sample_id}, {"items", a.items.size()}, {"rate", rate_of(a)}};
  if (!cfg.sheet_b.empty()) {
    const auto b = load(cfg.sheet_b);
    result["b"] = {{"sample_id", b.sample_id}, {"items", b.items.size()}, {"rate", rate_of(b)}};
    result["agreement"] = agreement_to_json(sheet_agreement(a, b));
  }
  const auto path = cfg.out_dir / "agreement.json";
  write_text_file(path, result.dump(2) + "\n");
  write_manifest(cfg, "agree", {cfg.sheet_a, cfg.sheet_b}, {path});
  return result;
}

std::size_t run_tag(const PipelineConfig& cfg) {
  validate_config(cfg, "tag");
  prepare_out_dir(cfg);
  auto src = open_input(cfg.input.src);
  auto labels = open_input(cfg.labels);
  const auto path = cfg.out_dir / (cfg.input.src.stem().string() + ".tagged");
  AtomicOutput out(path);
  emit_tagged_corpus(src, labels, out.stream(), cfg.tag_none);
  out.commit();
  write_manifest(cfg, "tag", {cfg.input.src, cfg.labels}, {path});
  return 0;
}

std::size_t run_score(const PipelineConfig& cfg) {
  validate_config(cfg, "score");
  prepare_out_dir(cfg);
  auto hyp_in = open_input(cfg.hyp_conllu);
  ConlluReader hyps(hyp_in, cfg.hyp_conllu.string());
  auto spans_in = open_input(cfg.spans);
  SpanReader spans(spans_in, cfg.spans.string());
  const auto path = cfg.out_dir / "scores.jsonl";
  AtomicOutput out(path);
  ParsedSentence hyp;
  std::size_t line = 0;
  while (hyps.next(hyp)) {
    const auto line_spans = spans.spans_for(line);
    const auto score = neutralization_score(hyp, line_spans, cfg.include_head, cfg.policy);
    out.stream() << ordered_json{{"line", line}, {"score", score}}.dump() << '\n';
    ++line;
  }
  spans.expect_end(line);
  out.commit();
  write_manifest(cfg, "score", {cfg.hyp_conllu, cfg.spans}, {path});
  return line;
}

double run_recall(const PipelineConfig& cfg) {
  validate_config(cfg, "recall");
  prepare_out_dir(cfg);
  LineReader reader(cfg.name_list);
  std::vector<std::string> names;
  std::string line;
  while (reader.next(line)) {
    if (!trim_whitespace(line).empty()) names.push_back(line);
  }
  const double recall = regex_recall(cfg.policy, names);
  const auto path = cfg.out_dir / "recall.json";
  const ordered_json j = {{"names", names.size()},
                          {"recall", recall},
                          {"name_range", cfg.policy.range == NameCharPolicy::Range::kLiteral ? "literal" : "paper-literal"}};
  write_text_file(path, j.dump(2) + "\n");
  write_manifest(cfg, "recall", {cfg.name_list}, {path});
  return recall;
}

DatasetReport run_pipeline(const PipelineConfig& cfg) {
  validate_config(cfg, "pipeline");
  const auto stats = run_preprocess(cfg);

  PipelineConfig next = cfg;
  next.input = InputPaths{};
  next.input.corpus = cfg.out_dir / "corpus.jsonl";
  run_detect(next);

  next.spans = cfg.out_dir / "spans.jsonl";
  run_extract(next);

  next.labels = cfg.out_dir / "labels.jsonl";
  next.total = stats.kept;
  return run_report(next);
}

}  // namespace ambig
