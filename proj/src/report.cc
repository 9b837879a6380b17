#include "ambig/report.h"

#include <fmt/format.h>

#include <algorithm>
#include <map>

#include "ambig/error.h"

namespace ambig {

namespace {

double pct(std::uint64_t count, std::uint64_t total) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

void ReportCounts::add(const SegmentLabels& labels) {
  ++lines;
  tc += labels.has_tc;
  sa += labels.has_sa;
  sp += labels.has_sp;
  pronoun += labels.has_binary_pronoun;
  name_and_pronoun += labels.has_tc && labels.has_binary_pronoun;
  if (labels.has_tc && labels.trg_gendered) {
    ++trg_gendered_tc;
    if (labels.has_binary_pronoun) {
      ++trg_gendered_with_pron;
    } else {
      ++trg_gendered_no_pron;
    }
  }
  without_parse += !labels.parsed;
}

ReportCounts& ReportCounts::merge(const ReportCounts& o) {
  lines += o.lines;
  tc += o.tc;
  sa += o.sa;
  sp += o.sp;
  pronoun += o.pronoun;
  name_and_pronoun += o.name_and_pronoun;
  trg_gendered_tc += o.trg_gendered_tc;
  trg_gendered_no_pron += o.trg_gendered_no_pron;
  trg_gendered_with_pron += o.trg_gendered_with_pron;
  without_parse += o.without_parse;
  return *this;
}

DatasetReport build_report(const ReportCounts& counts, std::uint64_t total) {
  if (total == 0) throw Error("report: total line count is 0");
  if (total < counts.lines) {
    throw Error("report: total " + std::to_string(total) + " is smaller than the " + std::to_string(counts.lines) +
                " labelled lines");
  }
  DatasetReport r;
  r.total_lines = total;
  r.counts = counts;
  r.pct_tc = pct(counts.tc, total);
  r.pct_sa = pct(counts.sa, total);
  r.pct_sp = pct(counts.sp, total);
  r.pct_pronoun = pct(counts.pronoun, total);
  r.pct_name_and_pronoun = pct(counts.name_and_pronoun, total);
  r.pct_trg_gendered_tc = pct(counts.trg_gendered_tc, total);
  r.pct_trg_gendered_no_pron = pct(counts.trg_gendered_no_pron, total);
  r.pct_trg_gendered_with_pron = pct(counts.trg_gendered_with_pron, total);
  r.lines_without_parse = counts.without_parse;
  return r;
}

DatasetReport build_report(std::span<const SegmentLabels> labels, std::uint64_t total) {
  ReportCounts counts;
  for (const auto& l : labels) counts.add(l);
  return build_report(counts, total);
}

nlohmann::ordered_json report_to_json(const DatasetReport& r) {
  const auto& c = r.counts;
  nlohmann::ordered_json j;
  j["total_lines"] = r.total_lines;
  j["counts"] = {
      {"labelled_lines", c.lines},
      {"tc", c.tc},
      {"sa", c.sa},
      {"sp", c.sp},
      {"pronoun", c.pronoun},
      {"name_and_pronoun", c.name_and_pronoun},
      {"trg_gendered_tc", c.trg_gendered_tc},
      {"trg_gendered_no_pron", c.trg_gendered_no_pron},
      {"trg_gendered_with_pron", c.trg_gendered_with_pron},
  };
  j["percentages"] = {
      {"pct_tc", r.pct_tc},
      {"pct_sa", r.pct_sa},
      {"pct_sp", r.pct_sp},
      {"pct_pronoun", r.pct_pronoun},
      {"pct_name_and_pronoun", r.pct_name_and_pronoun},
      {"pct_trg_gendered_tc", r.pct_trg_gendered_tc},
      {"pct_trg_gendered_no_pron", r.pct_trg_gendered_no_pron},
      {"pct_trg_gendered_with_pron", r.pct_trg_gendered_with_pron},
  };
  j["lines_without_parse"] = r.lines_without_parse;
  return j;
}

std::string render_report_table(const DatasetReport& r) {
  std::string out;
  out += fmt::format("{:<12}{:>8}{:>8}{:>8}{:>8}\n", "Lines (M)", "%N", "%P", "%N&P", "lines");
  out += fmt::format("{:<12.2f}{:>8.1f}{:>8.1f}{:>8.1f}{:>8}\n\n", static_cast<double>(r.total_lines) / 1e6,
                     r.pct_tc, r.pct_pronoun, r.pct_name_and_pronoun, r.total_lines);

  out += fmt::format("{:<40}{:>8}\n", "Name detection", "%");
  out += fmt::format("{:<40}{:>8.1f}\n", "Title-copy (TC)", r.pct_tc);
  out += fmt::format("{:<40}{:>8.1f}\n", "Spacy-any (SA)", r.pct_sa);
  out += fmt::format("{:<40}{:>8.1f}\n\n", "Spacy-person (SP)", r.pct_sp);

  out += fmt::format("{:<40}{:>8}\n", "Target gendered", "%");
  out += fmt::format("{:<40}{:>8.1f}\n", "Trg-gendered TC", r.pct_trg_gendered_tc);
  out += fmt::format("{:<40}{:>8.1f}\n", "- Subset with no src binary pronouns", r.pct_trg_gendered_no_pron);
  out += fmt::format("{:<40}{:>8.1f}\n", "- Subset with src binary pronouns", r.pct_trg_gendered_with_pron);
  out += fmt::format("\nLines without parse: {}\n", r.lines_without_parse);
  return out;
}

NameRatioAccumulator::NameRatioAccumulator(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw Error("ratio: name must be non-empty");
}

void NameRatioAccumulator::add(std::span<const NameSpan> spans, const SegmentLabels& labels) {
  const bool mentioned =
      std::any_of(spans.begin(), spans.end(), [&](const NameSpan& s) { return s.surface == name_; });
  if (!mentioned) return;
  for (const auto& term : labels.gendered_terms) {
    if (term.gender == Gender::kMasc) {
      ++masc_;
    } else {
      ++fem_;
    }
  }
}

NameGenderRatio NameRatioAccumulator::result() const {
  NameGenderRatio r;
  r.name = name_;
  r.masc_count = masc_;
  r.fem_count = fem_;
  if (fem_ > 0) r.ratio = static_cast<double>(masc_) / static_cast<double>(fem_);
  return r;
}

NameGenderRatio name_gender_ratio(std::span<const SegmentLabels> labels, std::span<const NameSpan> spans,
                                  const std::string& name) {
  std::map<std::size_t, std::vector<NameSpan>> by_line;
  for (const auto& s : spans) by_line[s.segment_index].push_back(s);
  NameRatioAccumulator acc(name);
  for (const auto& l : labels) {
    const auto it = by_line.find(l.line);
    if (it != by_line.end()) acc.add(it->second, l);
  }
  return acc.result();
}

nlohmann::ordered_json ratio_to_json(const NameGenderRatio& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["masc_count"] = r.masc_count;
  j["fem_count"] = r.fem_count;
  if (r.ratio) {
    j["ratio"] = *r.ratio;
  } else {
    j["ratio"] = nullptr;
  }
  return j;
}

}  // namespace ambig
