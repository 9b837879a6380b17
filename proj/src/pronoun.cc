#include "ambig/pronoun.h"

#include "ambig/text.h"

namespace ambig {

namespace {

char ascii_fold(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 0x20) : c; }

// Code point ending at byte `end` (exclusive); text is valid UTF-8.
char32_t codepoint_before(std::string_view text, std::size_t end) {
  std::size_t start = end - 1;
  while (start > 0 && (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80) --start;
  const auto cp = decode_at(text, start);
  return cp ? cp->value : 0xFFFD;
}

bool word_char_at(std::string_view text, std::size_t offset) {
  const auto cp = decode_at(text, offset);
  return is_word_char(cp ? cp->value : 0xFFFD);
}

}  // namespace

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') || cp == '_';
  }
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (cp < 0xC0) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols, arrows
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp == 0xFEFF || cp == 0xFFFD) return false;
  return true;
}

std::vector<PronounHit> binary_pronouns(std::string_view text) {
  std::vector<PronounHit> hits;
  std::size_t token_index = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_ascii_space(c)) {
      if (in_token) ++token_index;
      in_token = false;
      continue;
    }
    in_token = true;
    const char folded = ascii_fold(c);
    if (folded != 's' && folded != 'h') continue;
    if (i > 0 && is_word_char(codepoint_before(text, i))) continue;

    for (const auto form : kBinaryPronouns) {
      if (i + form.size() > text.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < form.size() && match; ++k) match = ascii_fold(text[i + k]) == form[k];
      if (!match) continue;
      const std::size_t end = i + form.size();
      if (end < text.size() && word_char_at(text, end)) continue;
      hits.push_back({std::string(form), token_index});
      break;
    }
  }
  return hits;
}

bool has_binary_pronoun(std::string_view text) { return !binary_pronouns(text).empty(); }

}  // namespace ambig
