#pragma once

// Human-evaluation support: seeded annotation samples, rate estimates over
// filled sheets, and Cohen's kappa between two annotators.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ambig {

// SplitMix64 (Steele, Lea & Flood 2014; the seeding generator of the
// xoshiro family). 64 bits of state, fully specified, so samples are
// reproducible on every platform and in any language.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t state_;
};

// Uniform integer in [0, bound) by rejection; bound must be > 0.
std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound);

enum class Question { kIsPersonName, kIsCoreferent };

std::string_view question_name(Question q);  // "is-person-name" / "is-coreferent"
Question parse_question(std::string_view name);

struct SheetItem {
  std::size_t segment_index = 0;
  std::string src;
  std::string tgt;
  std::string surface;
  std::optional<bool> mark;

  bool operator==(const SheetItem&) const = default;
};

struct AnnotationSheet {
  std::string sample_id;
  std::uint64_t seed = 0;
  Question question = Question::kIsPersonName;
  std::vector<SheetItem> items;

  bool operator==(const AnnotationSheet&) const = default;
};

// Partial Fisher-Yates over a copy of `population`: position i swaps with
// i + uniform_below(size - i). Returns the first n entries in draw order.
std::vector<std::size_t> sample_indices(std::span<const std::size_t> population, std::size_t n,
                                        std::uint64_t seed);

// Items carry segment indices only; callers fill in text and surfaces.
AnnotationSheet sample(std::span<const std::size_t> population, std::size_t n, std::uint64_t seed,
                       Question question = Question::kIsPersonName, std::string sample_id = "");

// TSV sheet: "#" metadata lines (sample_id, seed, question), a header
// "idx\tsrc\ttgt\tsurface\tmark", then one row per item. Backslash, tab,
// CR and LF inside fields are escaped as \\ \t \r \n. Marks are Y/N, empty
// when unmarked.
void write_sheet_tsv(std::ostream& out, const AnnotationSheet& sheet);
AnnotationSheet read_sheet_tsv(std::istream& in, const std::string& source_name = "<sheet>");

// Fraction of items marked true. Throws if any item is unmarked.
double estimate_rate(const AnnotationSheet& sheet);

struct AgreementStats {
  double p_o = 0;
  double p_e = 0;
  double kappa = 0;
  std::size_t n = 0;
};

// Throws on length mismatch, empty input, or p_e == 1.
AgreementStats cohens_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

// Marks of two sheets over the same items, in order.
AgreementStats sheet_agreement(const AnnotationSheet& a, const AnnotationSheet& b);

nlohmann::ordered_json agreement_to_json(const AgreementStats& stats);

}  // namespace ambig
