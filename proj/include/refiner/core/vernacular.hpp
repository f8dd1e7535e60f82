#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refiner/core/types.hpp"

namespace refiner::vernacular {

// Kind of a top-level sentence by its leading keyword. Corollary, Fact,
// Remark, Proposition and Example count as Lemma.
std::optional<ItemKind> classify(std::string_view sentence);

// Declared name of an item sentence, locality prefixes skipped. For a
// Notation this is the quoted notation string. Empty when absent.
std::string item_name(std::string_view sentence);

// Constructor names of an Inductive sentence ("| O : nat | S : ...").
std::vector<std::string> constructor_names(std::string_view statement);

// Names an item brings into scope: its own name plus its constructors.
std::vector<std::string> introduced_names(const ContextItem& item);

// Identifiers bound inside a term: forall/exists/fun binders, binder groups
// before the statement colon, and match-pattern variables.
std::vector<std::string> bound_names(std::string_view statement);

// Identifiers of the Coq prelude that need no declaration.
bool is_prelude_name(std::string_view name);

}  // namespace refiner::vernacular
