#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace refiner::text {

// Collapses whitespace runs to one space and trims both ends.
std::string normalize_ws(std::string_view s);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

bool is_ident_char(char c);

// Splits on every character outside [A-Za-z0-9_'], dropping empties.
// Case is preserved.
std::vector<std::string> identifier_tokens(std::string_view s);

// Lexes identifiers/numerals and symbol runs, dropping whitespace and the
// grouping characters ( ) [ ] { }. ',' and ';' are single-character tokens.
std::vector<std::string> lexical_tokens(std::string_view s);

// Identifier tokens that start with a letter or underscore.
bool is_identifier(std::string_view token);

bool starts_with_word(std::string_view s, std::string_view word);

std::vector<std::string> split_lines(std::string_view s);

// Pulls the declared name out of "Lemma name ..." / "Theorem name ...".
// Returns empty when the sentence has no name in that position.
std::string declared_name(std::string_view sentence);

}  // namespace refiner::text
