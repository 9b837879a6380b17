#include "ambig/gender_extract.h"

#include <algorithm>

#include "ambig/error.h"
#include "ambig/pronoun.h"
#include "ambig/tagger.h"
#include "ambig/text.h"

namespace ambig {

std::string_view gender_name(Gender g) { return g == Gender::kMasc ? "Masc" : "Fem"; }

Gender parse_gender(std::string_view name) {
  if (name == "Masc") return Gender::kMasc;
  if (name == "Fem") return Gender::kFem;
  throw Error("unknown gender '" + std::string(name) + "'");
}

std::optional<Gender> token_gender(const ParsedToken& tok) {
  const auto it = tok.feats.find("Gender");
  if (it == tok.feats.end()) return std::nullopt;
  if (it->second == "Masc") return Gender::kMasc;
  if (it->second == "Fem") return Gender::kFem;
  return std::nullopt;
}

std::string_view relation_name(TermRelation r) {
  return r == TermRelation::kDependentOfHead ? "dependent-of-head" : "head-itself";
}

bool is_punct_only(std::string_view form) {
  std::size_t i = 0;
  while (i < form.size()) {
    const auto cp = decode_at(form, i);
    if (!cp) return false;
    if (cp->value != '_' && is_word_char(cp->value)) return false;
    i += cp->length;
  }
  return true;
}

std::vector<int> locate_in_target(const NameSpan& span, std::span<const ParsedToken> tokens,
                                  const NameCharPolicy& policy) {
  std::vector<std::string_view> words;
  for (const auto w : split(span.surface, ' ')) {
    if (!w.empty()) words.push_back(w);
  }
  if (words.empty()) return {};

  std::vector<std::string_view> keys(tokens.size());
  std::vector<bool> punct(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    punct[i] = is_punct_only(tokens[i].form);
    keys[i] = trim_name_punct(tokens[i].form, policy);
  }

  for (std::size_t start = 0; start < tokens.size(); ++start) {
    if (punct[start]) continue;
    std::size_t matched = 0;
    std::size_t t = start;
    while (t < tokens.size() && matched < words.size()) {
      if (punct[t]) {
        ++t;
        continue;
      }
      if (keys[t] != words[matched]) break;
      ++matched;
      ++t;
    }
    if (matched == words.size()) {
      std::vector<int> ids;
      for (std::size_t k = start; k < t; ++k) ids.push_back(tokens[k].id);
      return ids;
    }
  }
  return {};
}

int name_head(std::span<const int> name_ids, std::span<const ParsedToken> tokens) {
  if (name_ids.empty()) return 0;
  const int n = static_cast<int>(tokens.size());
  const auto in_name = [&](int id) { return std::find(name_ids.begin(), name_ids.end(), id) != name_ids.end(); };
  const auto token = [&](int id) -> const ParsedToken& {
    if (id < 1 || id > n) throw Error("name token id " + std::to_string(id) + " outside the parse");
    return tokens[static_cast<std::size_t>(id - 1)];
  };

  const auto depth = [&](int id) {
    int d = 0;
    for (int cur = token(id).head; cur != 0 && d <= n; cur = token(cur).head) ++d;
    return d;
  };

  // Among name tokens governed from outside the span, take a word token over
  // punctuation swept up inside the run, then the one nearest the root.
  int top = 0;
  int top_depth = 0;
  for (const int id : name_ids) {
    const auto& tok = token(id);
    if (tok.head != 0 && in_name(tok.head)) continue;
    const int d = depth(id);
    if (top == 0) {
      top = id;
      top_depth = d;
      continue;
    }
    const bool top_punct = is_punct_only(token(top).form);
    const bool punct = is_punct_only(tok.form);
    if ((top_punct && !punct) || (top_punct == punct && d < top_depth)) {
      top = id;
      top_depth = d;
    }
  }
  if (top == 0) top = name_ids.front();
  const int governor = token(top).head;
  return governor == 0 ? top : governor;
}

std::vector<GenderedTerm> extract_gendered_terms(std::span<const int> name_ids,
                                                 std::span<const ParsedToken> tokens, bool include_head) {
  std::vector<GenderedTerm> terms;
  const int head = name_head(name_ids, tokens);
  if (head == 0) return terms;
  const auto in_name = [&](int id) { return std::find(name_ids.begin(), name_ids.end(), id) != name_ids.end(); };

  for (const auto& tok : tokens) {
    if (tok.head != head || in_name(tok.id)) continue;
    if (const auto g = token_gender(tok)) {
      terms.push_back({tok.id, tok.form, *g, TermRelation::kDependentOfHead});
    }
  }
  if (include_head && !in_name(head)) {
    const auto& tok = tokens[static_cast<std::size_t>(head - 1)];
    if (const auto g = token_gender(tok)) terms.push_back({tok.id, tok.form, *g, TermRelation::kHeadItself});
  }
  return terms;
}

std::vector<GenderedTerm> collect_gendered_terms(std::span<const ParsedToken> tokens,
                                                 std::span<const NameSpan> spans, bool include_head,
                                                 const NameCharPolicy& policy) {
  std::vector<GenderedTerm> terms;
  for (const auto& span : spans) {
    const auto ids = locate_in_target(span, tokens, policy);
    if (ids.empty()) continue;
    for (auto& term : extract_gendered_terms(ids, tokens, include_head)) {
      const bool seen = std::any_of(terms.begin(), terms.end(),
                                    [&](const GenderedTerm& t) { return t.token_id == term.token_id; });
      if (!seen) terms.push_back(std::move(term));
    }
  }
  return terms;
}

SegmentLabels label_segment(const ParallelSegment& seg, std::span<const NameSpan> spans, bool include_head,
                            const NameCharPolicy& policy) {
  SegmentLabels labels;
  labels.line = seg.index;
  for (const auto& span : spans) {
    labels.has_tc = labels.has_tc || span.methods.tc;
    labels.has_sa = labels.has_sa || span.methods.sa;
    labels.has_sp = labels.has_sp || span.methods.sp;
  }
  labels.has_binary_pronoun = has_binary_pronoun(seg.src);
  labels.parsed = seg.tgt_parse.has_value();
  if (labels.parsed && !spans.empty()) {
    labels.gendered_terms = collect_gendered_terms(*seg.tgt_parse, spans, include_head, policy);
  }
  labels.trg_gendered = !labels.gendered_terms.empty();
  labels.tag = gender_tag(labels.gendered_terms);
  return labels;
}

nlohmann::ordered_json labels_to_json(const SegmentLabels& labels) {
  nlohmann::ordered_json j;
  j["line"] = labels.line;
  j["tc"] = labels.has_tc;
  j["sa"] = labels.has_sa;
  j["sp"] = labels.has_sp;
  j["pron"] = labels.has_binary_pronoun;
  j["trg_gendered"] = labels.trg_gendered;
  j["parsed"] = labels.parsed;
  auto terms = nlohmann::ordered_json::array();
  for (const auto& t : labels.gendered_terms) {
    nlohmann::ordered_json term;
    term["id"] = t.token_id;
    term["form"] = t.form;
    term["gender"] = gender_name(t.gender);
    term["rel"] = relation_name(t.relation);
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  j["tag"] = tag_name(labels.tag);
  return j;
}

SegmentLabels labels_from_json(const nlohmann::json& j) {
  SegmentLabels labels;
  labels.line = j.at("line").get<std::size_t>();
  labels.has_tc = j.at("tc").get<bool>();
  labels.has_sa = j.at("sa").get<bool>();
  labels.has_sp = j.at("sp").get<bool>();
  labels.has_binary_pronoun = j.at("pron").get<bool>();
  labels.trg_gendered = j.at("trg_gendered").get<bool>();
  labels.parsed = j.value("parsed", true);
  for (const auto& t : j.at("terms")) {
    GenderedTerm term;
    term.token_id = t.value("id", 0);
    term.form = t.at("form").get<std::string>();
    term.gender = parse_gender(t.at("gender").get<std::string>());
    const auto rel = t.at("rel").get<std::string>();
    if (rel == "head-itself") {
      term.relation = TermRelation::kHeadItself;
    } else if (rel == "dependent-of-head") {
      term.relation = TermRelation::kDependentOfHead;
    } else {
      throw Error("unknown term relation '" + rel + "'");
    }
    labels.gendered_terms.push_back(std::move(term));
  }
  labels.tag = parse_tag(j.at("tag").get<std::string>());
  return labels;
}

}  // namespace ambig
