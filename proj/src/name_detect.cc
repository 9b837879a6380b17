#include "ambig/name_detect.h"

#include <algorithm>

#include "ambig/error.h"
#include "ambig/text.h"

namespace ambig {

namespace {

bool is_name_punct(char32_t cp) { return cp == '\'' || cp == '-' || cp == '_' || cp == '.'; }

struct TrimmedToken {
  std::string_view text;  // view into the parent string
  std::size_t offset;     // byte offset of `text` in the parent
};

std::vector<TrimmedToken> trimmed_tokens(std::string_view s, const NameCharPolicy& policy) {
  std::vector<TrimmedToken> out;
  for (const auto& tok : whitespace_tokens(s)) {
    const auto trimmed = trim_name_punct(tok.text, policy);
    const std::size_t offset =
        trimmed.empty() ? tok.offset : tok.offset + static_cast<std::size_t>(trimmed.data() - tok.text.data());
    out.push_back({trimmed, offset});
  }
  return out;
}

std::string join_surface(const std::vector<TrimmedToken>& tokens, std::size_t begin, std::size_t end) {
  std::string surface;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) surface += ' ';
    surface += tokens[i].text;
  }
  return surface;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kTc: return "TC";
    case Method::kSa: return "SA";
    case Method::kSp: return "SP";
  }
  return "TC";
}

Method parse_method(std::string_view name) {
  if (name == "tc" || name == "TC") return Method::kTc;
  if (name == "sa" || name == "SA") return Method::kSa;
  if (name == "sp" || name == "SP") return Method::kSp;
  throw Error("unknown detection method '" + std::string(name) + "'");
}

bool has_method(const Methods& methods, Method m) {
  switch (m) {
    case Method::kTc: return methods.tc;
    case Method::kSa: return methods.sa;
    case Method::kSp: return methods.sp;
  }
  return false;
}

bool NameCharPolicy::allowed(char32_t cp) const {
  if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z')) return true;
  if (cp >= 0xC0 && cp <= 0x17E) return true;
  if (range == Range::kPaperLiteral) return (cp >= 0x27 && cp <= 0x5F) || cp == '.';
  return is_name_punct(cp);
}

bool NameCharPolicy::titlecase(char32_t cp) const { return is_latin_upper(cp); }

std::string_view trim_name_punct(std::string_view token, const NameCharPolicy& policy) {
  const auto cps = decode_utf8(token);
  const auto keep = [&](const CodePoint& cp) { return policy.allowed(cp.value) && !is_name_punct(cp.value); };
  const auto first = std::find_if(cps.begin(), cps.end(), keep);
  if (first == cps.end()) return token.substr(0, 0);
  const auto last = std::find_if(cps.rbegin(), cps.rend(), keep);
  const std::size_t begin = first->offset;
  const std::size_t end = last->offset + last->length;
  return token.substr(begin, end - begin);
}

bool tc_token_ok(std::string_view token, const NameCharPolicy& policy) {
  if (token.empty()) return false;
  std::size_t i = 0;
  bool first = true;
  while (i < token.size()) {
    const auto cp = decode_at(token, i);
    if (!cp || !policy.allowed(cp->value)) return false;
    if (first && !policy.titlecase(cp->value)) return false;
    first = false;
    i += cp->length;
  }
  return true;
}

std::vector<NameSpan> tc_spans(const ParallelSegment& seg, const NameCharPolicy& policy) {
  const auto src = trimmed_tokens(seg.src, policy);
  const auto tgt = trimmed_tokens(seg.tgt, policy);

  std::vector<bool> eligible(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) eligible[i] = tc_token_ok(src[i].text, policy);

  // Every contiguous sub-span of an eligible run whose surface occurs in the
  // target is a candidate; presence is closed under sub-spans, so the
  // longest match starting at each position describes all of them.
  // Candidates may overlap partially ("A B" and "B C" in the target, "A B C"
  // not), so spans are taken greedily: longest first, then leftmost, each
  // clipped to the tokens not yet covered.
  struct Candidate {
    std::size_t begin, end;
  };
  std::vector<Candidate> chosen;
  std::size_t a = 0;
  while (a < src.size()) {
    if (!eligible[a]) {
      ++a;
      continue;
    }
    std::size_t b = a;
    while (b < src.size() && eligible[b]) ++b;

    std::vector<std::size_t> longest(b - a, 0);
    for (std::size_t i = a; i < b; ++i) {
      for (std::size_t p = 0; p < tgt.size(); ++p) {
        std::size_t k = 0;
        while (i + k < b && p + k < tgt.size() && src[i + k].text == tgt[p + k].text) ++k;
        longest[i - a] = std::max(longest[i - a], k);
      }
    }
    std::vector<bool> covered(b - a, false);
    while (true) {
      Candidate best{0, 0};
      for (std::size_t i = a; i < b; ++i) {
        if (covered[i - a]) continue;
        std::size_t len = 0;
        while (len < longest[i - a] && !covered[i - a + len]) ++len;
        if (len > best.end - best.begin) best = {i, i + len};
      }
      if (best.end == best.begin) break;
      for (std::size_t i = best.begin; i < best.end; ++i) covered[i - a] = true;
      chosen.push_back(best);
    }
    a = b;
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Candidate& x, const Candidate& y) { return x.begin < y.begin; });

  std::vector<NameSpan> spans;
  spans.reserve(chosen.size());
  for (const auto& c : chosen) {
    NameSpan span;
    span.segment_index = seg.index;
    span.start_tok = c.begin;
    span.end_tok = c.end;
    span.surface = join_surface(src, c.begin, c.end);
    span.methods.tc = true;
    spans.push_back(std::move(span));
  }
  return spans;
}

std::pair<std::size_t, std::size_t> span_char_extent(const NameSpan& span, std::string_view src,
                                                     const NameCharPolicy& policy) {
  const auto tokens = trimmed_tokens(src, policy);
  if (span.start_tok >= span.end_tok || span.end_tok > tokens.size()) {
    throw Error("name span [" + std::to_string(span.start_tok) + "," + std::to_string(span.end_tok) +
                ") outside source of " + std::to_string(tokens.size()) + " tokens");
  }
  const auto& first = tokens[span.start_tok];
  const auto& last = tokens[span.end_tok - 1];
  const std::size_t begin = codepoint_count(src.substr(0, first.offset));
  const std::size_t end = codepoint_count(src.substr(0, last.offset + last.text.size()));
  return {begin, end};
}

std::vector<NameSpan> refine_with_ner(std::vector<NameSpan> spans, std::span<const NerSpan> ner,
                                      std::string_view src, const NameCharPolicy& policy) {
  for (auto& span : spans) {
    const auto [begin, end] = span_char_extent(span, src, policy);
    span.methods.tc = true;
    for (const auto& entity : ner) {
      if (entity.start < end && begin < entity.end) {
        span.methods.sa = true;
        if (entity.label == "PERSON") span.methods.sp = true;
      }
    }
  }
  return spans;
}

std::vector<NameSpan> detect_names(const ParallelSegment& seg, const NameCharPolicy& policy) {
  auto spans = tc_spans(seg, policy);
  if (seg.ner_spans) spans = refine_with_ner(std::move(spans), *seg.ner_spans, seg.src, policy);
  return spans;
}

double regex_recall(const NameCharPolicy& policy, std::span<const std::string> names) {
  if (names.empty()) throw Error("regex_recall: empty name list");
  std::size_t passed = 0;
  for (const auto& name : names) {
    bool ok = false;
    for (const auto part : split(name, ' ')) {
      if (part.empty()) continue;
      ok = tc_token_ok(part, policy);
      if (!ok) break;
    }
    if (ok) ++passed;
  }
  return static_cast<double>(passed) / static_cast<double>(names.size());
}

nlohmann::ordered_json span_to_json(const NameSpan& span) {
  nlohmann::ordered_json j;
  j["line"] = span.segment_index;
  j["start_tok"] = span.start_tok;
  j["end_tok"] = span.end_tok;
  j["surface"] = span.surface;
  auto methods = nlohmann::ordered_json::array();
  if (span.methods.tc) methods.push_back("TC");
  if (span.methods.sa) methods.push_back("SA");
  if (span.methods.sp) methods.push_back("SP");
  j["methods"] = std::move(methods);
  return j;
}

NameSpan span_from_json(const nlohmann::json& j) {
  NameSpan span;
  span.segment_index = j.at("line").get<std::size_t>();
  span.start_tok = j.at("start_tok").get<std::size_t>();
  span.end_tok = j.at("end_tok").get<std::size_t>();
  span.surface = j.at("surface").get<std::string>();
  for (const auto& m : j.at("methods")) {
    switch (parse_method(m.get<std::string>())) {
      case Method::kTc: span.methods.tc = true; break;
      case Method::kSa: span.methods.sa = true; break;
      case Method::kSp: span.methods.sp = true; break;
    }
  }
  return span;
}

}  // namespace ambig
