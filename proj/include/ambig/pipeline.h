#pragma once

// Stage runners behind the ambig_miner subcommands. Every stage streams its
// inputs in line order, writes its artifacts under the output directory, and
// records a manifest (config, seed, tool version, input/output digests).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ambig/corpus.h"
#include "ambig/eval_sampling.h"
#include "ambig/gender_extract.h"
#include "ambig/name_detect.h"
#include "ambig/preprocess.h"
#include "ambig/report.h"

namespace ambig {

std::string_view tool_version();

// Reads AMBIG_MINER_LOG (trace, debug, info, warn, error, off).
void init_logging_from_env();

// Either an interchange corpus or a bitext pair, plus optional sidecars that
// are overlaid by line index.
struct InputPaths {
  std::filesystem::path corpus;
  std::filesystem::path src;
  std::filesystem::path tgt;
  std::filesystem::path conllu;
  std::filesystem::path ner;
};

enum class Population { kDetected, kNonDetected, kTrgGendered };

std::string_view population_name(Population p);
Population parse_population(std::string_view name);

// Which side of the pair the binary-pronoun label is computed on.
enum class PronounSide { kSrc, kTgt };

std::string_view pronoun_side_name(PronounSide s);
PronounSide parse_pronoun_side(std::string_view name);

struct PipelineConfig {
  InputPaths input;
  std::filesystem::path spans;
  std::filesystem::path labels;
  std::filesystem::path name_list;
  std::filesystem::path hyp_conllu;
  std::filesystem::path sheet_a;
  std::filesystem::path sheet_b;
  std::filesystem::path out_dir = ".";

  PreprocessConfig preprocess;
  NameCharPolicy policy;
  Method method = Method::kTc;
  bool include_head = false;
  PronounSide pronoun_side = PronounSide::kSrc;
  bool tag_none = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> total;
  std::string name;
  Population population = Population::kDetected;
  Question question = Question::kIsPersonName;
  std::size_t sample_size = 100;
};

// Streams segments from InputPaths, attaching sidecars and validating
// alignment. Throws AlignmentError when a sidecar is short or long.
class SegmentSource {
 public:
  explicit SegmentSource(const InputPaths& paths);
  ~SegmentSource();

  bool next(ParallelSegment& seg);
  std::size_t parse_text_mismatches() const { return parse_mismatches_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t parse_mismatches_ = 0;
};

// Reads spans.jsonl grouped by line; lines must be non-decreasing.
class SpanReader {
 public:
  SpanReader(std::istream& in, std::string source_name);

  // Spans for `line`; skips nothing, so call with increasing lines.
  std::vector<NameSpan> spans_for(std::size_t line);
  // Throws if records remain past `lines` lines.
  void expect_end(std::size_t lines);

 private:
  bool peek();

  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
  std::optional<NameSpan> pending_;
  std::size_t last_line_ = 0;
  bool any_ = false;
};

class LabelReader {
 public:
  LabelReader(std::istream& in, std::string source_name);
  bool next(SegmentLabels& labels);

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

std::vector<SegmentLabels> read_labels_jsonl(const std::filesystem::path& path);
std::vector<NameSpan> read_spans_jsonl(const std::filesystem::path& path);

// Throws ConfigError when the stage's required inputs are missing.
void validate_config(const PipelineConfig& cfg, std::string_view stage);

PreprocessStats run_preprocess(const PipelineConfig& cfg);
std::size_t run_detect(const PipelineConfig& cfg);
ReportCounts run_extract(const PipelineConfig& cfg);
DatasetReport run_report(const PipelineConfig& cfg);
NameGenderRatio run_ratio(const PipelineConfig& cfg);
AnnotationSheet run_sample(const PipelineConfig& cfg);
nlohmann::ordered_json run_agree(const PipelineConfig& cfg);
std::size_t run_tag(const PipelineConfig& cfg);
std::size_t run_score(const PipelineConfig& cfg);
double run_recall(const PipelineConfig& cfg);

// preprocess -> detect -> extract -> report, chaining artifacts in out_dir.
DatasetReport run_pipeline(const PipelineConfig& cfg);

}  // namespace ambig
