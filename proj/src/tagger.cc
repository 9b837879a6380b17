#include "ambig/tagger.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "ambig/error.h"
#include "ambig/text.h"

namespace ambig {

namespace {

constexpr std::array<GenderTag, 4> kTags = {GenderTag::kMasc, GenderTag::kFem, GenderTag::kMixed,
                                            GenderTag::kNone};

bool next_labels(std::istream& in, SegmentLabels& labels) {
  std::string line;
  while (std::getline(in, line)) {
    if (trim_whitespace(line).empty()) continue;
    try {
      labels = labels_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("labels: ") + e.what());
    }
    return true;
  }
  return false;
}

}  // namespace

std::string_view tag_name(GenderTag tag) {
  switch (tag) {
    case GenderTag::kMasc: return "MASC";
    case GenderTag::kFem: return "FEM";
    case GenderTag::kMixed: return "MIXED";
    case GenderTag::kNone: return "NONE";
  }
  return "NONE";
}

GenderTag parse_tag(std::string_view name) {
  for (const auto tag : kTags) {
    if (tag_name(tag) == name) return tag;
  }
  throw Error("unknown gender tag '" + std::string(name) + "'");
}

GenderTag gender_tag(std::span<const GenderedTerm> terms) {
  const bool masc = std::any_of(terms.begin(), terms.end(), [](const auto& t) { return t.gender == Gender::kMasc; });
  const bool fem = std::any_of(terms.begin(), terms.end(), [](const auto& t) { return t.gender == Gender::kFem; });
  if (masc && fem) return GenderTag::kMixed;
  if (masc) return GenderTag::kMasc;
  if (fem) return GenderTag::kFem;
  return GenderTag::kNone;
}

GenderTag gender_tag(const SegmentLabels& labels) { return gender_tag(labels.gendered_terms); }

std::string tag_line(std::string_view src, GenderTag tag, bool tag_none) {
  if (tag == GenderTag::kNone && !tag_none) return std::string(src);
  std::string out;
  out.reserve(src.size() + 8);
  out += '<';
  out += tag_name(tag);
  out += "> ";
  out += src;
  return out;
}

std::string_view strip_tag(std::string_view line) {
  for (const auto tag : kTags) {
    const auto name = tag_name(tag);
    if (line.size() >= name.size() + 3 && line[0] == '<' && line.substr(1, name.size()) == name &&
        line.substr(name.size() + 1, 2) == "> ") {
      return line.substr(name.size() + 3);
    }
  }
  return line;
}

void emit_tagged_corpus(std::istream& src, std::istream& labels_jsonl, std::ostream& out, bool tag_none) {
  std::string line;
  std::size_t index = 0;
  SegmentLabels labels;
  while (std::getline(src, line)) {
    const bool terminated = !src.eof();
    if (!next_labels(labels_jsonl, labels)) {
      throw AlignmentError("labels end before source line " + std::to_string(index));
    }
    if (labels.line != index) {
      throw AlignmentError("labels record for line " + std::to_string(labels.line) + " found at source line " +
                           std::to_string(index));
    }
    out << tag_line(line, labels.tag, tag_none);
    if (terminated) out << '\n';
    ++index;
  }
  if (next_labels(labels_jsonl, labels)) {
    throw AlignmentError("more label records than the " + std::to_string(index) + " source lines");
  }
}

std::vector<std::string> emit_tagged_corpus(std::span<const ParallelSegment> corpus,
                                            std::span<const SegmentLabels> labels, bool tag_none) {
  if (corpus.size() != labels.size()) {
    throw AlignmentError("labels misaligned: " + std::to_string(corpus.size()) + " segments, " +
                         std::to_string(labels.size()) + " label records");
  }
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) out.push_back(tag_line(corpus[i].src, labels[i].tag, tag_none));
  return out;
}

std::size_t neutralization_score(std::span<const ParsedToken> hyp_parse, std::span<const NameSpan> spans,
                                 bool include_head, const NameCharPolicy& policy) {
  return collect_gendered_terms(hyp_parse, spans, include_head, policy).size();
}

}  // namespace ambig
