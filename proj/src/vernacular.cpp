#include "refiner/core/vernacular.hpp"

#include <array>
#include <set>

#include "refiner/core/text.hpp"

namespace refiner::vernacular {

namespace {

std::string_view strip_locality(std::string_view sentence) {
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (std::string_view prefix : {"Local ", "Global ", "Program ", "#[global] ", "#[local] "}) {
      if (sentence.substr(0, prefix.size()) == prefix) {
        sentence.remove_prefix(prefix.size());
        stripped = true;
      }
    }
  }
  return sentence;
}

}  // namespace

std::string item_name(std::string_view sentence) {
  sentence = strip_locality(sentence);
  if (text::starts_with_word(sentence, "Notation")) {
    auto open = sentence.find('"');
    if (open == std::string_view::npos) return {};
    auto close = sentence.find('"', open + 1);
    if (close == std::string_view::npos || close == open + 1) return {};
    return std::string(sentence.substr(open + 1, close - open - 1));
  }
  return text::declared_name(sentence);
}

std::optional<ItemKind> classify(std::string_view sentence) {
  using text::starts_with_word;
  // Locality prefixes do not change the kind.
  sentence = strip_locality(sentence);
  if (starts_with_word(sentence, "Definition")) return ItemKind::Definition;
  if (starts_with_word(sentence, "Fixpoint")) return ItemKind::Fixpoint;
  if (starts_with_word(sentence, "Inductive")) return ItemKind::Inductive;
  if (starts_with_word(sentence, "Notation")) return ItemKind::Notation;
  if (starts_with_word(sentence, "Theorem")) return ItemKind::Theorem;
  for (std::string_view kw : {"Lemma", "Corollary", "Fact", "Remark", "Proposition", "Example"})
    if (starts_with_word(sentence, kw)) return ItemKind::Lemma;
  return std::nullopt;
}

std::vector<std::string> constructor_names(std::string_view statement) {
  std::vector<std::string> out;
  auto def = statement.find(":=");
  if (def == std::string_view::npos) return out;
  std::string_view body = statement.substr(def + 2);
  int depth = 0;
  bool expect_name = true;  // the first constructor may omit its leading bar
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (c == '|' && depth == 0) expect_name = true;
    else if (expect_name && text::is_ident_char(c)) {
      std::size_t j = i;
      while (j < body.size() && text::is_ident_char(body[j])) ++j;
      std::string name(body.substr(i, j - i));
      if (text::is_identifier(name)) out.push_back(name);
      expect_name = false;
      i = j - 1;
    }
  }
  return out;
}

std::vector<std::string> introduced_names(const ContextItem& item) {
  std::vector<std::string> out{item.name};
  if (item.kind == ItemKind::Inductive) {
    auto ctors = constructor_names(item.statement);
    out.insert(out.end(), ctors.begin(), ctors.end());
  }
  return out;
}

std::vector<std::string> bound_names(std::string_view statement) {
  std::vector<std::string> out;
  auto lex = text::lexical_tokens(statement);
  // Binder groups between the declared name and the statement colon.
  std::string name = text::declared_name(statement);
  std::size_t i = 0;
  if (!name.empty()) {
    while (i < lex.size() && lex[i] != name) ++i;
    ++i;
    for (; i < lex.size() && lex[i] != ":"; ++i)
      if (text::is_identifier(lex[i])) out.push_back(lex[i]);
  }
  for (std::size_t k = 0; k < lex.size(); ++k) {
    const std::string& t = lex[k];
    if (t == "forall" || t == "exists" || t == "fun") {
      for (++k; k < lex.size() && lex[k] != "," && lex[k] != "=>"; ++k)
        if (text::is_identifier(lex[k])) out.push_back(lex[k]);
    } else if (t == "|") {
      for (++k; k < lex.size() && lex[k] != "=>"; ++k)
        if (text::is_identifier(lex[k])) out.push_back(lex[k]);
    }
  }
  // Comma-separated patterns ("| O, _ =>") are split by the lexer; the
  // pattern scan above already captured them.
  return out;
}

bool is_prelude_name(std::string_view name) {
  static const std::set<std::string, std::less<>> kPrelude = {
      "forall", "exists", "fun", "fix", "match", "with", "end", "as", "in", "return", "let",
      "if", "then", "else", "Prop", "Set", "Type", "SProp", "nat", "O", "S", "bool", "true",
      "false", "True", "False", "I", "list", "nil", "cons", "option", "Some", "None", "prod",
      "pair", "fst", "snd", "sum", "inl", "inr", "unit", "tt", "eq", "eq_refl", "not", "and",
      "or", "iff", "ex", "conj", "le", "lt", "ge", "gt", "plus", "mult", "minus", "pred",
      "negb", "andb", "orb", "length", "app", "map", "rev", "Nat", "List", "_",
  };
  return kPrelude.count(name) > 0;
}

}  // namespace refiner::vernacular
