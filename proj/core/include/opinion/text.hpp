#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace opinion::text {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at `pos` and advances `pos` past it.
// Malformed sequences yield U+FFFD and advance by one byte.
char32_t decode_utf8(std::string_view s, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
// Punctuation stripped from token edges. '#' and '@' are not included.
bool is_edge_punct(char32_t cp);
// Pictographic code points that start an emoji cluster.
bool is_emoji_base(char32_t cp);
// Code points that extend a preceding emoji (modifiers, selectors, ZWJ).
bool is_emoji_extender(char32_t cp);

// Simple (1:1) lowercase mapping for Latin, Greek and Cyrillic letters.
char32_t to_lower(char32_t cp);
std::string fold_case(std::string_view s);

// Strips Unicode whitespace from both ends.
std::string_view trim(std::string_view s);

// Token rules shared by query expansion, polarity and the classifier:
// lowercase; split on Unicode whitespace; emoji clusters become their own
// tokens; leading/trailing punctuation other than '#' and '@' is stripped;
// empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view s);
void tokenize(std::string_view s, std::vector<std::string>& out);

// Byte offsets of code point starts in `s`, plus s.size() as a sentinel.
std::vector<std::size_t> codepoint_offsets(std::string_view s);

}  // namespace opinion::text
