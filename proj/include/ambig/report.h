#pragma once

// Dataset-level statistics over per-segment labels: name-method prevalence,
// pronoun prevalence and overlap, trg-gendered shares, and per-name
// masculine/feminine co-occurrence ratios.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ambig/gender_extract.h"
#include "ambig/name_detect.h"
#include "json.hpp"

namespace ambig {

// Counter bag; merge is a field-wise sum, so sharded reduction is exact.
struct ReportCounts {
  std::uint64_t lines = 0;
  std::uint64_t tc = 0;
  std::uint64_t sa = 0;
  std::uint64_t sp = 0;
  std::uint64_t pronoun = 0;
  std::uint64_t name_and_pronoun = 0;
  std::uint64_t trg_gendered_tc = 0;
  std::uint64_t trg_gendered_no_pron = 0;
  std::uint64_t trg_gendered_with_pron = 0;
  std::uint64_t without_parse = 0;

  void add(const SegmentLabels& labels);
  ReportCounts& merge(const ReportCounts& other);

  bool operator==(const ReportCounts&) const = default;
};

struct DatasetReport {
  std::uint64_t total_lines = 0;
  ReportCounts counts;
  double pct_tc = 0;
  double pct_sa = 0;
  double pct_sp = 0;
  double pct_pronoun = 0;
  double pct_name_and_pronoun = 0;
  double pct_trg_gendered_tc = 0;
  double pct_trg_gendered_no_pron = 0;
  double pct_trg_gendered_with_pron = 0;
  std::uint64_t lines_without_parse = 0;
};

// Percentages are taken against `total` (lines after preprocessing).
// Throws when total is 0 or smaller than the number of labelled lines.
DatasetReport build_report(const ReportCounts& counts, std::uint64_t total);
DatasetReport build_report(std::span<const SegmentLabels> labels, std::uint64_t total);

nlohmann::ordered_json report_to_json(const DatasetReport& report);

// Fixed-width tables, one decimal place.
std::string render_report_table(const DatasetReport& report);

struct NameGenderRatio {
  std::string name;
  std::uint64_t masc_count = 0;
  std::uint64_t fem_count = 0;
  std::optional<double> ratio;  // empty when fem_count == 0
};

// Streaming accumulator: feed each segment's spans with its labels.
class NameRatioAccumulator {
 public:
  explicit NameRatioAccumulator(std::string name);

  void add(std::span<const NameSpan> spans, const SegmentLabels& labels);
  NameGenderRatio result() const;

 private:
  std::string name_;
  std::uint64_t masc_ = 0;
  std::uint64_t fem_ = 0;
};

// Spans are matched to labels by line number.
NameGenderRatio name_gender_ratio(std::span<const SegmentLabels> labels, std::span<const NameSpan> spans,
                                  const std::string& name);

nlohmann::ordered_json ratio_to_json(const NameGenderRatio& ratio);

}  // namespace ambig
