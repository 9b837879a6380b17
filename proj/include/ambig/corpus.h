#pragma once

// Data model and readers/writers for the three input kinds: plain-text
// bitext, CoNLL-U target parses, and the JSONL NER sidecar. Everything is
// aligned strictly by 0-based line (sentence) index.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ambig {

struct ParsedToken {
  int id = 0;  // 1-based within the sentence
  std::string form;
  std::string upos;
  std::map<std::string, std::string> feats;
  int head = 0;  // 0 for the root
  std::string deprel;
  bool space_after = true;  // false when MISC carries SpaceAfter=No

  bool operator==(const ParsedToken&) const = default;
};

using ParsedSentence = std::vector<ParsedToken>;

// Character offsets count Unicode code points of the source sentence,
// the convention NER toolkits such as spaCy emit.
struct NerSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;

  bool operator==(const NerSpan&) const = default;
};

struct ParallelSegment {
  std::size_t index = 0;
  std::string src;
  std::string tgt;
  std::optional<ParsedSentence> tgt_parse;
  std::optional<std::vector<NerSpan>> ner_spans;

  bool operator==(const ParallelSegment&) const = default;
};

// ---------------------------------------------------------------------------
// Bitext

std::vector<ParallelSegment> load_parallel_corpus(const std::filesystem::path& src_path,
                                                  const std::filesystem::path& tgt_path);

// Reads one-sentence-per-line text, validating UTF-8. A trailing '\r' is
// dropped so CRLF files pair correctly.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  bool next(std::string& line);
  std::size_t lines_read() const { return count_; }
  const std::string& name() const { return name_; }

 private:
  std::ifstream in_;
  std::string name_;
  std::size_t count_ = 0;
};

// Pairs two LineReaders; throws AlignmentError("line count mismatch") when
// one side runs out first.
class BitextReader {
 public:
  BitextReader(const std::filesystem::path& src_path, const std::filesystem::path& tgt_path);

  bool next(ParallelSegment& seg);

 private:
  LineReader src_;
  LineReader tgt_;
};

// ---------------------------------------------------------------------------
// CoNLL-U

// Parses one 10-column token line. Returns nullopt for multiword ranges
// ("1-2") and empty nodes ("1.1").
std::optional<ParsedToken> parse_conllu_token(const std::string& line, const std::string& source,
                                              std::size_t line_no);

class ConlluReader {
 public:
  ConlluReader(std::istream& in, std::string source_name);

  // Reads the next sentence block. Blocks of only comments or only skipped
  // ids yield an empty sentence so alignment with target lines is kept.
  bool next(ParsedSentence& sentence);
  std::size_t sentences_read() const { return sentences_; }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
  std::size_t sentences_ = 0;
};

std::vector<ParsedSentence> parse_conllu(std::istream& in, const std::string& source_name = "<stream>");
std::vector<ParsedSentence> parse_conllu(const std::filesystem::path& path);

// Surface text implied by the forms and their SpaceAfter flags.
std::string reconstruct_text(const ParsedSentence& sentence);

// True when the tokens differ from `text` only in whitespace.
bool matches_text(const ParsedSentence& sentence, std::string_view text);

// Single root, heads in range, no cycles.
bool is_tree(const ParsedSentence& sentence);

std::vector<ParallelSegment> attach_parses(std::vector<ParallelSegment> corpus,
                                           std::vector<ParsedSentence> parses);

// ---------------------------------------------------------------------------
// NER sidecar: {"line": int, "spans": [{"start": int, "end": int, "label": str}]}

std::vector<NerSpan> ner_spans_from_json(const nlohmann::json& spans);

class NerSidecarReader {
 public:
  NerSidecarReader(std::istream& in, std::string source_name);

  // Reads the record for `expected_line`; records must appear in line order.
  bool next(std::size_t expected_line, std::vector<NerSpan>& spans);

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

std::vector<std::vector<NerSpan>> load_ner_sidecar(const std::filesystem::path& path);

// Throws if a span falls outside the source sentence.
void check_ner_spans(const std::vector<NerSpan>& spans, std::string_view src, std::size_t line);

std::vector<ParallelSegment> attach_ner(std::vector<ParallelSegment> corpus,
                                        std::vector<std::vector<NerSpan>> spans);

// ---------------------------------------------------------------------------
// Interchange corpus: one segment per JSONL record with all fields.

nlohmann::ordered_json segment_to_json(const ParallelSegment& seg);
ParallelSegment segment_from_json(const nlohmann::json& j);

void write_segment_jsonl(std::ostream& out, const ParallelSegment& seg);

class CorpusJsonlReader {
 public:
  CorpusJsonlReader(std::istream& in, std::string source_name);
  bool next(ParallelSegment& seg);

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<ParallelSegment>& corpus);
std::vector<ParallelSegment> read_corpus_jsonl(const std::filesystem::path& path);

// Opens `path` for reading or throws ambig::Error naming the file.
std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace ambig
