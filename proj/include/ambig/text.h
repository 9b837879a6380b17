#pragma once

// UTF-8 and whitespace helpers shared by every module. All offsets handed out
// by this header are byte offsets unless the name says otherwise.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ambig {

// A decoded code point and the bytes it occupies in the source string.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

// Decodes the code point starting at `offset`. Returns nullopt on malformed
// input (overlong forms, surrogates, truncated sequences, > U+10FFFF).
std::optional<CodePoint> decode_at(std::string_view text, std::size_t offset);

bool valid_utf8(std::string_view text);

// Throws ambig::Error on malformed input.
std::vector<CodePoint> decode_utf8(std::string_view text);

std::size_t codepoint_count(std::string_view text);

void append_utf8(std::string& out, char32_t cp);

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// A whitespace-delimited token and its byte offset in the parent string.
struct WsToken {
  std::string_view text;
  std::size_t offset;
};

std::vector<WsToken> whitespace_tokens(std::string_view text);
std::size_t whitespace_token_count(std::string_view text);

std::string_view rtrim_whitespace(std::string_view text);
std::string_view trim_whitespace(std::string_view text);

// Case information for the Latin code points the name policy admits
// (ASCII, Latin-1 Supplement, Latin Extended-A). Everything outside those
// blocks is neither upper nor lower here.
bool is_latin_upper(char32_t cp);
bool is_latin_lower(char32_t cp);
inline bool is_latin_letter(char32_t cp) { return is_latin_upper(cp) || is_latin_lower(cp); }
char32_t latin_to_lower(char32_t cp);

// Lowercases ASCII, Latin-1 and Latin Extended-A letters; other code points
// pass through. Input must be valid UTF-8.
std::string latin_lowercase(std::string_view text);

// Splits `text` on `sep`, keeping empty fields.
std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace ambig
