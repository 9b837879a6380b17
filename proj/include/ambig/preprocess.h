#pragma once

// Corpus cleaning: exact-duplicate pair removal, token length-ratio filter, and
// a stopword-coverage language check.

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ambig/content_hash.h"
#include "ambig/corpus.h"

namespace ambig {

enum class Lang { kEn, kFr, kDe, kEs, kUnknown };

inline constexpr std::array<Lang, 4> kKnownLangs = {Lang::kEn, Lang::kFr, Lang::kDe, Lang::kEs};

std::string_view lang_code(Lang lang);
// Throws ConfigError for anything outside {en, fr, de, es}.
Lang parse_lang(std::string_view code);

struct PreprocessConfig {
  double max_length_ratio = 9.0;
  Lang expected_src_lang = Lang::kEn;
  Lang expected_tgt_lang = Lang::kFr;
  std::size_t min_tokens_for_langid = 4;
  bool use_ratio = true;
  bool use_langid = true;

  void validate() const;
};

// Seen-set over 128-bit content hashes of (src, tgt) with trailing
// whitespace trimmed. Returns true the first time a pair is offered.
class PairDeduper {
 public:
  bool insert(std::string_view src, std::string_view tgt);
  std::size_t size() const { return seen_.size(); }

 private:
  std::unordered_set<Hash128, Hash128Hasher> seen_;
};

std::vector<ParallelSegment> dedup_exact_pairs(std::vector<ParallelSegment> corpus);

bool length_ratio_ok(const ParallelSegment& seg, const PreprocessConfig& cfg);

// Fraction of lowercased letter-run tokens found in each language's bundled
// closed-class word list, indexed like kKnownLangs.
std::array<double, 4> stopword_coverage(std::string_view text);

// Highest-coverage language; ties resolve in kKnownLangs order; kUnknown when
// nothing is covered.
Lang langid_of(std::string_view text);

// True unless the text is long enough to classify and some other language
// scores strictly higher than `expected`.
bool langid_ok(std::string_view text, Lang expected, const PreprocessConfig& cfg);

struct PreprocessStats {
  std::size_t input = 0;
  std::size_t duplicates = 0;
  std::size_t empty = 0;
  std::size_t ratio_dropped = 0;
  std::size_t langid_dropped = 0;
  std::size_t kept = 0;
};

// Single-pass streaming form of preprocess(): offers segments in order and
// returns the re-indexed survivors.
class StreamingPreprocessor {
 public:
  explicit StreamingPreprocessor(PreprocessConfig cfg);

  std::optional<ParallelSegment> accept(ParallelSegment seg);
  const PreprocessStats& stats() const { return stats_; }

 private:
  PreprocessConfig cfg_;
  PairDeduper dedup_;
  PreprocessStats stats_;
};

std::vector<ParallelSegment> preprocess(std::vector<ParallelSegment> corpus, const PreprocessConfig& cfg,
                                        PreprocessStats* stats = nullptr);

}  // namespace ambig
