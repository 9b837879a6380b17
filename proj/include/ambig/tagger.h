#pragma once

// Source-side gender tags derived from target grammatical gender, and a
// neutralization score for translation hypotheses.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ambig/corpus.h"
#include "ambig/gender_extract.h"
#include "ambig/name_detect.h"

namespace ambig {

std::string_view tag_name(GenderTag tag);  // "MASC", "FEM", "MIXED", "NONE"
GenderTag parse_tag(std::string_view name);

GenderTag gender_tag(std::span<const GenderedTerm> terms);
GenderTag gender_tag(const SegmentLabels& labels);

// "<FEM> " + src; NONE leaves the line untouched unless `tag_none`.
std::string tag_line(std::string_view src, GenderTag tag, bool tag_none = false);

// Removes one leading tag pseudo-token, if present.
std::string_view strip_tag(std::string_view line);

// Source lines paired with their labels; throws AlignmentError if the counts
// or the labels' line numbers disagree. Line terminators are preserved
// byte-for-byte, including a missing final newline.
void emit_tagged_corpus(std::istream& src, std::istream& labels_jsonl, std::ostream& out, bool tag_none = false);

std::vector<std::string> emit_tagged_corpus(std::span<const ParallelSegment> corpus,
                                            std::span<const SegmentLabels> labels, bool tag_none = false);

// Number of gendered terms attached to the named entities of a hypothesis;
// 0 means gender-neutral with respect to them.
std::size_t neutralization_score(std::span<const ParsedToken> hyp_parse, std::span<const NameSpan> spans,
                                 bool include_head, const NameCharPolicy& policy = {});

}  // namespace ambig
