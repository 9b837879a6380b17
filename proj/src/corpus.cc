#include "ambig/corpus.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "ambig/error.h"
#include "ambig/text.h"

namespace ambig {

namespace {

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

bool getline_stripped(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// Bitext

LineReader::LineReader(const std::filesystem::path& path)
    : in_(open_input(path)), name_(path.string()) {}

bool LineReader::next(std::string& line) {
  if (!getline_stripped(in_, line)) return false;
  ++count_;
  if (!valid_utf8(line)) throw ParseError(name_, count_, "invalid UTF-8");
  return true;
}

BitextReader::BitextReader(const std::filesystem::path& src_path,
                           const std::filesystem::path& tgt_path)
    : src_(src_path), tgt_(tgt_path) {}

bool BitextReader::next(ParallelSegment& seg) {
  std::string src;
  std::string tgt;
  const bool has_src = src_.next(src);
  const bool has_tgt = tgt_.next(tgt);
  if (has_src != has_tgt) {
    throw AlignmentError("line count mismatch: " + src_.name() + " and " + tgt_.name() +
                         " differ after line " +
                         std::to_string(std::min(src_.lines_read(), tgt_.lines_read())));
  }
  if (!has_src) return false;
  seg = ParallelSegment{};
  seg.index = src_.lines_read() - 1;
  seg.src = std::move(src);
  seg.tgt = std::move(tgt);
  return true;
}

std::vector<ParallelSegment> load_parallel_corpus(const std::filesystem::path& src_path,
                                                  const std::filesystem::path& tgt_path) {
  BitextReader reader(src_path, tgt_path);
  std::vector<ParallelSegment> corpus;
  ParallelSegment seg;
  while (reader.next(seg)) corpus.push_back(std::move(seg));
  return corpus;
}

// ---------------------------------------------------------------------------
// CoNLL-U

std::optional<ParsedToken> parse_conllu_token(const std::string& line, const std::string& source,
                                              std::size_t line_no) {
  const auto cols = split(line, '\t');
  if (cols.size() != 10) {
    throw ParseError(source, line_no,
                     "expected 10 tab-separated columns, got " + std::to_string(cols.size()));
  }
  // Multiword ranges and empty nodes carry no syntactic head.
  if (cols[0].find_first_of("-.") != std::string_view::npos) return std::nullopt;

  ParsedToken tok;
  const auto id = parse_int(cols[0]);
  if (!id || *id <= 0) throw ParseError(source, line_no, "non-integer id '" + std::string(cols[0]) + "'");
  const auto head = parse_int(cols[6]);
  if (!head || *head < 0) {
    throw ParseError(source, line_no, "non-integer head '" + std::string(cols[6]) + "'");
  }
  tok.id = *id;
  tok.head = *head;
  tok.form = std::string(cols[1]);
  tok.upos = std::string(cols[3]);
  tok.deprel = std::string(cols[7]);
  if (!valid_utf8(tok.form)) throw ParseError(source, line_no, "invalid UTF-8");

  if (cols[5] != "_") {
    for (const auto feat : split(cols[5], '|')) {
      const auto eq = feat.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ParseError(source, line_no, "malformed feature '" + std::string(feat) + "'");
      }
      tok.feats.emplace(std::string(feat.substr(0, eq)), std::string(feat.substr(eq + 1)));
    }
  }
  if (cols[9] != "_") {
    for (const auto item : split(cols[9], '|')) {
      if (item == "SpaceAfter=No") tok.space_after = false;
    }
  }
  return tok;
}

ConlluReader::ConlluReader(std::istream& in, std::string source_name)
    : in_(in), name_(std::move(source_name)) {}

bool ConlluReader::next(ParsedSentence& sentence) {
  sentence.clear();
  std::vector<std::size_t> token_lines;
  bool in_block = false;
  std::string line;
  while (getline_stripped(in_, line)) {
    ++line_no_;
    if (line.empty()) {
      if (in_block) break;
      continue;
    }
    in_block = true;
    if (line.front() == '#') continue;
    auto tok = parse_conllu_token(line, name_, line_no_);
    if (!tok) continue;
    if (tok->id != static_cast<int>(sentence.size()) + 1) {
      throw ParseError(name_, line_no_, "token id " + std::to_string(tok->id) + " out of sequence");
    }
    sentence.push_back(std::move(*tok));
    token_lines.push_back(line_no_);
  }
  if (!in_block) return false;

  const int n = static_cast<int>(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto& tok = sentence[i];
    if (tok.head > n) {
      throw ParseError(name_, token_lines[i], "head " + std::to_string(tok.head) + " out of range");
    }
    if (tok.head == tok.id) throw ParseError(name_, token_lines[i], "token is its own head");
  }
  ++sentences_;
  return true;
}

std::vector<ParsedSentence> parse_conllu(std::istream& in, const std::string& source_name) {
  ConlluReader reader(in, source_name);
  std::vector<ParsedSentence> sentences;
  ParsedSentence sentence;
  while (reader.next(sentence)) sentences.push_back(std::move(sentence));
  return sentences;
}

std::vector<ParsedSentence> parse_conllu(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_conllu(in, path.string());
}

std::string reconstruct_text(const ParsedSentence& sentence) {
  std::string text;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    text += sentence[i].form;
    if (sentence[i].space_after && i + 1 < sentence.size()) text += ' ';
  }
  return text;
}

bool matches_text(const ParsedSentence& sentence, std::string_view text) {
  std::string a;
  for (const auto& tok : sentence) {
    for (const char c : tok.form) {
      if (!is_ascii_space(c)) a += c;
    }
  }
  std::string b;
  for (const char c : text) {
    if (!is_ascii_space(c)) b += c;
  }
  return a == b;
}

bool is_tree(const ParsedSentence& sentence) {
  const int n = static_cast<int>(sentence.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const auto& tok = sentence[i];
    if (tok.id != i + 1 || tok.head < 0 || tok.head > n || tok.head == tok.id) return false;
    if (tok.head == 0) ++roots;
  }
  if (n > 0 && roots != 1) return false;
  for (int i = 0; i < n; ++i) {
    int cur = sentence[i].id;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) return false;
      cur = sentence[cur - 1].head;
    }
  }
  return true;
}

std::vector<ParallelSegment> attach_parses(std::vector<ParallelSegment> corpus,
                                           std::vector<ParsedSentence> parses) {
  if (corpus.size() != parses.size()) {
    throw AlignmentError("parse count mismatch: " + std::to_string(corpus.size()) +
                         " segments, " + std::to_string(parses.size()) + " parses");
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) corpus[i].tgt_parse = std::move(parses[i]);
  return corpus;
}

// ---------------------------------------------------------------------------
// NER sidecar

std::vector<NerSpan> ner_spans_from_json(const nlohmann::json& spans) {
  std::vector<NerSpan> out;
  for (const auto& s : spans) {
    const auto start = s.at("start").get<long long>();
    const auto end = s.at("end").get<long long>();
    if (start < 0 || end < 0) throw Error("negative NER offset");
    out.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(end),
                   s.at("label").get<std::string>()});
  }
  return out;
}

NerSidecarReader::NerSidecarReader(std::istream& in, std::string source_name)
    : in_(in), name_(std::move(source_name)) {}

bool NerSidecarReader::next(std::size_t expected_line, std::vector<NerSpan>& spans) {
  std::string line;
  while (getline_stripped(in_, line)) {
    ++line_no_;
    if (trim_whitespace(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto got = j.at("line").get<long long>();
      if (got != static_cast<long long>(expected_line)) {
        throw AlignmentError(name_ + ":" + std::to_string(line_no_) + ": expected record for line " +
                             std::to_string(expected_line) + ", got " + std::to_string(got));
      }
      spans = ner_spans_from_json(j.at("spans"));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name_, line_no_, e.what());
    } catch (const AlignmentError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(name_, line_no_, e.what());
    }
    return true;
  }
  return false;
}

std::vector<std::vector<NerSpan>> load_ner_sidecar(const std::filesystem::path& path) {
  auto in = open_input(path);
  NerSidecarReader reader(in, path.string());
  std::vector<std::vector<NerSpan>> out;
  std::vector<NerSpan> spans;
  while (reader.next(out.size(), spans)) out.push_back(spans);
  return out;
}

void check_ner_spans(const std::vector<NerSpan>& spans, std::string_view src, std::size_t line) {
  const std::size_t length = codepoint_count(src);
  for (const auto& s : spans) {
    if (!(s.start < s.end && s.end <= length)) {
      throw AlignmentError("NER span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                           ") outside source line " + std::to_string(line) + " of length " +
                           std::to_string(length));
    }
  }
}

std::vector<ParallelSegment> attach_ner(std::vector<ParallelSegment> corpus,
                                        std::vector<std::vector<NerSpan>> spans) {
  if (corpus.size() != spans.size()) {
    throw AlignmentError("NER record count mismatch: " + std::to_string(corpus.size()) +
                         " segments, " + std::to_string(spans.size()) + " records");
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    check_ner_spans(spans[i], corpus[i].src, i);
    corpus[i].ner_spans = std::move(spans[i]);
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Interchange JSONL

nlohmann::ordered_json segment_to_json(const ParallelSegment& seg) {
  nlohmann::ordered_json j;
  j["index"] = seg.index;
  j["src"] = seg.src;
  j["tgt"] = seg.tgt;
  if (seg.tgt_parse) {
    auto tokens = nlohmann::ordered_json::array();
    for (const auto& tok : *seg.tgt_parse) {
      nlohmann::ordered_json t;
      t["id"] = tok.id;
      t["form"] = tok.form;
      t["upos"] = tok.upos;
      t["feats"] = nlohmann::ordered_json::object();
      for (const auto& [k, v] : tok.feats) t["feats"][k] = v;
      t["head"] = tok.head;
      t["deprel"] = tok.deprel;
      t["space_after"] = tok.space_after;
      tokens.push_back(std::move(t));
    }
    j["tgt_parse"] = std::move(tokens);
  } else {
    j["tgt_parse"] = nullptr;
  }
  if (seg.ner_spans) {
    auto spans = nlohmann::ordered_json::array();
    for (const auto& s : *seg.ner_spans) {
      spans.push_back({{"start", s.start}, {"end", s.end}, {"label", s.label}});
    }
    j["ner_spans"] = std::move(spans);
  } else {
    j["ner_spans"] = nullptr;
  }
  return j;
}

ParallelSegment segment_from_json(const nlohmann::json& j) {
  ParallelSegment seg;
  seg.index = j.at("index").get<std::size_t>();
  seg.src = j.at("src").get<std::string>();
  seg.tgt = j.at("tgt").get<std::string>();
  if (const auto it = j.find("tgt_parse"); it != j.end() && !it->is_null()) {
    ParsedSentence sentence;
    for (const auto& t : *it) {
      ParsedToken tok;
      tok.id = t.at("id").get<int>();
      tok.form = t.at("form").get<std::string>();
      tok.upos = t.at("upos").get<std::string>();
      for (const auto& [k, v] : t.at("feats").items()) tok.feats.emplace(k, v.get<std::string>());
      tok.head = t.at("head").get<int>();
      tok.deprel = t.at("deprel").get<std::string>();
      tok.space_after = t.value("space_after", true);
      sentence.push_back(std::move(tok));
    }
    seg.tgt_parse = std::move(sentence);
  }
  if (const auto it = j.find("ner_spans"); it != j.end() && !it->is_null()) {
    seg.ner_spans = ner_spans_from_json(*it);
  }
  return seg;
}

void write_segment_jsonl(std::ostream& out, const ParallelSegment& seg) {
  out << segment_to_json(seg).dump() << '\n';
}

CorpusJsonlReader::CorpusJsonlReader(std::istream& in, std::string source_name)
    : in_(in), name_(std::move(source_name)) {}

bool CorpusJsonlReader::next(ParallelSegment& seg) {
  std::string line;
  while (getline_stripped(in_, line)) {
    ++line_no_;
    if (trim_whitespace(line).empty()) continue;
    try {
      seg = segment_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name_, line_no_, e.what());
    }
    return true;
  }
  return false;
}

void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<ParallelSegment>& corpus) {
  auto out = open_output(path);
  for (const auto& seg : corpus) write_segment_jsonl(out, seg);
}

std::vector<ParallelSegment> read_corpus_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  CorpusJsonlReader reader(in, path.string());
  std::vector<ParallelSegment> corpus;
  ParallelSegment seg;
  while (reader.next(seg)) corpus.push_back(std::move(seg));
  return corpus;
}

}  // namespace ambig
