#include <set>

#include "refiner/core/text.hpp"
#include "refiner/core/vernacular.hpp"
#include "refiner/llm/gateway.hpp"
#include "refiner/prover/sentences.hpp"

namespace refiner {

namespace {

bool boundary_before(const std::string& s, std::size_t i) {
  return i == 0 || !text::is_ident_char(s[i - 1]);
}

bool terminator_at(const std::string& s, std::size_t i) {
  return s[i] == '.' &&
         (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '`');
}

// Position just past "word." when it starts at i as a whole word.
std::optional<std::size_t> keyword_sentence(const std::string& s, std::size_t i,
                                            const std::string& word) {
  if (s.compare(i, word.size(), word) != 0 || !boundary_before(s, i)) return std::nullopt;
  std::size_t dot = i + word.size();
  if (dot >= s.size() || !terminator_at(s, dot)) return std::nullopt;
  return dot + 1;
}

struct Found {
  std::string statement;
  std::size_t end;
};

// Fence lines would otherwise glue into neighbouring sentences.
std::string without_fences(const std::string& response) {
  std::string out;
  for (const auto& line : text::split_lines(response)) {
    if (text::trim(line).rfind("```", 0) == 0) {
      out += "\n";
      continue;
    }
    out += line + "\n";
  }
  return out;
}

std::vector<Found> find_statements(const std::string& s) {
  std::vector<Found> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::size_t kw = 0;
    for (const char* word : {"Lemma", "Theorem"}) {
      std::string w(word);
      if (s.compare(i, w.size(), w) == 0 && boundary_before(s, i) && i + w.size() < s.size() &&
          std::isspace(static_cast<unsigned char>(s[i + w.size()])))
        kw = w.size();
    }
    if (!kw) continue;
    // The keyword must be followed by an optional name and then ':' or a
    // binder, which keeps prose such as "the Lemma below" out.
    std::size_t j = i + kw;
    while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    std::size_t name_start = j;
    while (j < s.size() && text::is_ident_char(s[j])) ++j;
    if (j > name_start && !text::is_identifier(s.substr(name_start, j - name_start))) continue;
    while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j >= s.size() || (s[j] != ':' && s[j] != '(' && s[j] != '{' && s[j] != '[')) continue;
    std::size_t end = j;
    while (end < s.size() && !terminator_at(s, end)) ++end;
    if (end >= s.size()) break;
    out.push_back({text::normalize_ws(s.substr(i, end + 1 - i)), end + 1});
    i = end;
  }
  return out;
}

std::optional<std::string> proof_span(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto after_open = keyword_sentence(s, i, "Proof");
    if (!after_open) continue;
    for (std::size_t j = *after_open; j < s.size(); ++j) {
      for (const char* close : {"Qed", "Defined", "Admitted", "Abort"}) {
        if (auto end = keyword_sentence(s, j, close))
          return text::trim(s.substr(i, *end - i));
      }
    }
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_proof(const std::string& response) {
  auto open = response.find("```");
  if (open != std::string::npos) {
    auto body = response.find('\n', open);
    if (body != std::string::npos) {
      auto close = response.find("```", body + 1);
      std::string block = text::trim(response.substr(
          body + 1, close == std::string::npos ? std::string::npos : close - body - 1));
      if (!block.empty()) return block;
    }
  }
  return proof_span(response);
}

std::vector<std::string> extract_lemma_statements(const std::string& response) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& f : find_statements(without_fences(response)))
    if (seen.insert(f.statement).second) out.push_back(std::move(f.statement));
  return out;
}

std::optional<std::pair<std::string, std::string>> extract_lemma_with_proof(
    const std::string& response) {
  std::string s = without_fences(response);
  auto found = find_statements(s);
  if (found.empty()) return std::nullopt;
  auto proof = proof_span(s.substr(found.front().end));
  if (!proof) return std::nullopt;
  return std::make_pair(found.front().statement, *proof);
}

std::string proof_body(const std::string& proof) {
  auto sentences = split_sentences(proof);
  std::size_t skip = 0;
  while (skip < sentences.size()) {
    auto kind = vernacular::classify(sentences[skip].text);
    if (!kind || !is_provable(*kind)) break;
    ++skip;
  }
  if (skip == 0 || skip == sentences.size()) return text::trim(proof);
  return text::trim(proof.substr(sentences[skip].begin));
}

}  // namespace refiner
