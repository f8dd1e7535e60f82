#include "refiner/core/text.hpp"

#include <cctype>

namespace refiner::text {

std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<std::string> identifier_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_ident_char(c)) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

namespace {
bool is_grouping(char c) {
  switch (c) {
    case '(': case ')': case '[': case ']': case '{': case '}':
      return true;
    default:
      return false;
  }
}

bool is_separator(char c) { return c == ',' || c == ';'; }
}  // namespace

std::vector<std::string> lexical_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c)) || is_grouping(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (is_separator(c)) {
      j = i + 1;
    } else if (is_ident_char(c)) {
      while (j < s.size() && is_ident_char(s[j])) ++j;
    } else {
      while (j < s.size() && !is_ident_char(s[j]) && !is_grouping(s[j]) && !is_separator(s[j]) &&
             !std::isspace(static_cast<unsigned char>(s[j])))
        ++j;
    }
    out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_identifier(std::string_view token) {
  if (token.empty()) return false;
  char c = token.front();
  if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return false;
  for (char d : token)
    if (!is_ident_char(d)) return false;
  return true;
}

bool starts_with_word(std::string_view s, std::string_view word) {
  if (s.substr(0, word.size()) != word) return false;
  return s.size() == word.size() || !is_ident_char(s[word.size()]);
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < s.size()) out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::string declared_name(std::string_view sentence) {
  auto toks = identifier_tokens(sentence);
  if (toks.size() < 2) return {};
  // The keyword is the first token; the name must directly follow it, which
  // rules out "Lemma : forall ..." where the next token is already the body.
  std::string_view rest = sentence;
  auto kw = rest.find(toks[0]);
  rest.remove_prefix(kw + toks[0].size());
  std::size_t i = 0;
  while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
  if (rest.substr(i, toks[1].size()) != toks[1]) return {};
  if (!is_identifier(toks[1])) return {};
  if (toks[1] == "forall" || toks[1] == "exists") return {};
  return toks[1];
}

}  // namespace refiner::text
