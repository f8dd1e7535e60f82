#include "refiner/prover/prover.hpp"

#include <cstdint>
#include <cstdio>

#include "refiner/core/text.hpp"
#include "refiner/prover/sentences.hpp"

namespace refiner {

std::string preamble_hash(const std::vector<ContextItem>& preamble) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& item : preamble) {
    for (char c : text::normalize_ws(item.statement) + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Index of the ':' that separates the header from the body, at paren depth 0.
std::size_t header_colon(std::string_view s) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '{' || c == '[') ++depth;
    else if (c == ')' || c == '}' || c == ']') --depth;
    else if (c == ':' && depth == 0 && (i + 1 >= s.size() || s[i + 1] != '=')) return i;
  }
  return std::string_view::npos;
}

// "(n m : nat) (H : le n m)" -> hypotheses n, m : nat; H : le n m.
std::vector<Hypothesis> parse_binders(std::string_view s) {
  std::vector<Hypothesis> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '(') {
      ++i;
      continue;
    }
    int depth = 0;
    std::size_t j = i;
    for (; j < s.size(); ++j) {
      if (s[j] == '(') ++depth;
      if (s[j] == ')' && --depth == 0) break;
    }
    std::string_view group = s.substr(i + 1, j - i - 1);
    auto colon = group.find(':');
    if (colon != std::string_view::npos) {
      std::string type = text::trim(group.substr(colon + 1));
      for (const auto& name : text::identifier_tokens(group.substr(0, colon)))
        out.push_back({name, type});
    }
    i = j + 1;
  }
  return out;
}

}  // namespace

ProofState initial_state(const std::string& statement) {
  std::string stmt = text::normalize_ws(statement);
  if (!stmt.empty() && stmt.back() == '.') stmt.pop_back();
  std::string name = text::declared_name(stmt);
  std::size_t colon = header_colon(stmt);
  Goal goal;
  if (colon == std::string::npos) {
    goal.conclusion = text::trim(stmt);
  } else {
    std::string header = stmt.substr(0, colon);
    if (!name.empty()) {
      auto pos = header.find(name);
      header = header.substr(pos + name.size());
    }
    goal.hypotheses = parse_binders(header);
    goal.conclusion = text::trim(stmt.substr(colon + 1));
  }
  ProofState state;
  state.goals.push_back(std::move(goal));
  return state;
}

std::vector<std::string> body_sentences(const std::string& script) {
  std::vector<std::string> out;
  for (auto& s : sentence_texts(script)) {
    if (is_proof_open(s) || is_any_close(s)) continue;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> tactic_sentences(const std::string& script) {
  std::vector<std::string> out;
  for (auto& s : sentence_texts(script)) {
    if (is_proof_open(s) || is_bullet(s) || is_any_close(s)) continue;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace refiner
