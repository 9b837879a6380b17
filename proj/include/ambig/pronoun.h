#pragma once

// Binary English pronoun detection equivalent to
//   grep -Pwi "(she|her|hers|herself|he|him|his|himself)"

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ambig {

inline constexpr std::array<std::string_view, 8> kBinaryPronouns = {
    "she", "her", "hers", "herself", "he", "him", "his", "himself"};

struct PronounHit {
  std::string pronoun;      // lowercased form
  std::size_t token_index;  // whitespace token holding the match

  bool operator==(const PronounHit&) const = default;
};

// Word characters for boundary purposes: ASCII letters, digits, underscore,
// and non-ASCII letters/marks (everything at or above U+0080 except the
// Latin-1 symbol block, × ÷, and the general/CJK punctuation blocks).
bool is_word_char(char32_t cp);

std::vector<PronounHit> binary_pronouns(std::string_view text);
bool has_binary_pronoun(std::string_view text);

}  // namespace ambig
