#pragma once

// Target-side gendered language attached to a source name: locate the name in
// the target parse, take its syntactic head, and collect the head's direct
// dependents whose morphology says Gender=Masc or Gender=Fem.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ambig/corpus.h"
#include "ambig/name_detect.h"
#include "json.hpp"

namespace ambig {

enum class Gender { kMasc, kFem };

std::string_view gender_name(Gender g);  // "Masc" / "Fem"
Gender parse_gender(std::string_view name);

// Exactly "Masc" or "Fem"; multi-valued features such as "Fem,Masc" do not count.
std::optional<Gender> token_gender(const ParsedToken& tok);

enum class TermRelation { kDependentOfHead, kHeadItself };

std::string_view relation_name(TermRelation r);  // "dependent-of-head" / "head-itself"

struct GenderedTerm {
  int token_id = 0;
  std::string form;
  Gender gender = Gender::kMasc;
  TermRelation relation = TermRelation::kDependentOfHead;

  bool operator==(const GenderedTerm&) const = default;
};

enum class GenderTag { kMasc, kFem, kMixed, kNone };

struct SegmentLabels {
  std::size_t line = 0;
  bool has_tc = false;
  bool has_sa = false;
  bool has_sp = false;
  bool has_binary_pronoun = false;
  bool trg_gendered = false;
  bool parsed = false;
  std::vector<GenderedTerm> gendered_terms;
  GenderTag tag = GenderTag::kNone;

  bool operator==(const SegmentLabels&) const = default;
};

// True for forms with no letter or digit ("," "." "--").
bool is_punct_only(std::string_view form);

// Token ids of the first contiguous run of tokens spelling the span surface.
// Forms and surface words are compared after name-punctuation trimming;
// punctuation-only tokens inside the run are skipped but included in the
// returned ids so the result stays contiguous.
std::vector<int> locate_in_target(const NameSpan& span, std::span<const ParsedToken> tokens,
                                  const NameCharPolicy& policy = {});

// The name's head: the governor of the name token attached outside the
// span (the one nearest the root if several are), or that token itself when
// it is the root. Returns 0 if ids are empty.
int name_head(std::span<const int> name_ids, std::span<const ParsedToken> tokens);

std::vector<GenderedTerm> extract_gendered_terms(std::span<const int> name_ids,
                                                 std::span<const ParsedToken> tokens, bool include_head);

// Terms of every span, union by token id in span order.
std::vector<GenderedTerm> collect_gendered_terms(std::span<const ParsedToken> tokens,
                                                 std::span<const NameSpan> spans, bool include_head,
                                                 const NameCharPolicy& policy = {});

SegmentLabels label_segment(const ParallelSegment& seg, std::span<const NameSpan> spans, bool include_head,
                            const NameCharPolicy& policy = {});

// {"line", "tc", "sa", "sp", "pron", "trg_gendered", "parsed",
//  "terms": [{"id", "form", "gender", "rel"}], "tag"}
nlohmann::ordered_json labels_to_json(const SegmentLabels& labels);
SegmentLabels labels_from_json(const nlohmann::json& j);

}  // namespace ambig
