#pragma once

// Title-copy (TC) person-name candidates and their NER-confirmed subsets:
// SA (overlaps any NER entity) and SP (overlaps a PERSON entity).

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ambig/corpus.h"
#include "json.hpp"

namespace ambig {

// Which detectors fired for a span. SP implies SA implies TC.
struct Methods {
  bool tc = false;
  bool sa = false;
  bool sp = false;

  bool operator==(const Methods&) const = default;
};

enum class Method { kTc, kSa, kSp };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
bool has_method(const Methods& methods, Method m);

// Name-character policy. The default reads the class [A-Za-zÀ-ž'-_.] with
// ', -, _ and . as literal characters. kPaperLiteral keeps the bracket
// expression's '-_ range (U+0027..U+005F), which also admits digits and
// most ASCII punctuation; it exists for auditing only.
struct NameCharPolicy {
  enum class Range { kLiteral, kPaperLiteral };
  Range range = Range::kLiteral;

  bool allowed(char32_t cp) const;
  bool titlecase(char32_t cp) const;
};

// Strips leading/trailing code points outside the allowed set, then
// leading/trailing ' - _ and . so "Finn." and "-Jax" reduce to the name.
std::string_view trim_name_punct(std::string_view token, const NameCharPolicy& policy);

// Token must already be trimmed.
bool tc_token_ok(std::string_view token, const NameCharPolicy& policy);

struct NameSpan {
  std::size_t segment_index = 0;
  std::size_t start_tok = 0;  // whitespace tokens of src, [start_tok, end_tok)
  std::size_t end_tok = 0;
  std::string surface;
  Methods methods;

  bool operator==(const NameSpan&) const = default;
};

std::vector<NameSpan> tc_spans(const ParallelSegment& seg, const NameCharPolicy& policy);

// Code-point extent [begin, end) of the span's trimmed surface inside `src`.
std::pair<std::size_t, std::size_t> span_char_extent(const NameSpan& span, std::string_view src,
                                                     const NameCharPolicy& policy = {});

std::vector<NameSpan> refine_with_ner(std::vector<NameSpan> spans, std::span<const NerSpan> ner,
                                      std::string_view src, const NameCharPolicy& policy = {});

// TC spans of a segment, refined when the segment carries NER spans.
std::vector<NameSpan> detect_names(const ParallelSegment& seg, const NameCharPolicy& policy);

// Fraction of names whose every space-separated token passes tc_token_ok
// (tokens taken as-is, without trimming). Throws on an empty list.
double regex_recall(const NameCharPolicy& policy, std::span<const std::string> names);

// {"line": int, "start_tok": int, "end_tok": int, "surface": str, "methods": [str]}
nlohmann::ordered_json span_to_json(const NameSpan& span);
NameSpan span_from_json(const nlohmann::json& j);

}  // namespace ambig
