#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "refiner/core/types.hpp"

namespace refiner {

class DuplicateName : public std::runtime_error {
 public:
  explicit DuplicateName(std::vector<std::string> names);
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

struct SourceFile {
  std::string path;
  std::string text;
};

// A parsed Notation sentence. Identifiers in the notation string are its
// variables; everything else is literal. Literal runs between variables form
// groups that must appear in order for the notation to match a text.
struct NotationEntry {
  std::string notation;
  std::vector<std::vector<std::string>> groups;
  std::string target;  // head identifier of the right-hand side

  // Literal tokens joined by spaces, e.g. "+ 1" or "<=".
  std::string key() const;
  bool matches(const std::vector<std::string>& lexical) const;
};

std::optional<NotationEntry> parse_notation(const std::string& statement);

// BM25 scoring constants and the per-document statistics behind them.
struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// Lower-cased identifier tokens of a text, the unit BM25 works on.
std::vector<std::string> bm25_tokens(const std::string& text);

// The project corpus `g`. Immutable once built; every query is const and
// safe to call concurrently.
class GlobalContext {
 public:
  GlobalContext() { build(); }

  // Parses files in order. Ordinals count items across all files.
  // Throws DuplicateName listing every clashing name.
  static GlobalContext ingest(const std::vector<SourceFile>& files);
  // Rebuilds from already-parsed items (snapshot load, filtering).
  static GlobalContext from_items(std::vector<ContextItem> ordered,
                                  std::vector<std::string> skipped = {});

  // Every ingested item in ingestion order, notations included.
  const std::vector<ContextItem>& ordered() const { return ordered_; }
  // Named items only (no notations).
  std::vector<const ContextItem*> named_items() const;
  std::size_t named_count() const { return by_name_.size(); }
  std::size_t notation_count() const { return notations_.size(); }
  const std::vector<NotationEntry>& notations() const { return notations_; }
  // Notation key -> target identifier.
  std::map<std::string, std::string> notation_map() const;
  // Sentences that looked like items but could not be parsed.
  const std::vector<std::string>& skipped() const { return skipped_; }

  const ContextItem* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  // Items ingested strictly before `name` (the project as it stood then).
  GlobalContext prefix_before(const std::string& name) const;
  GlobalContext filtered(const std::function<bool(const ContextItem&)>& keep) const;

  // Top-k Lemma/Theorem items by BM25 against the query statement. The
  // theorem the query declares is left out by name.
  std::vector<const ContextItem*> bm25_top_k(const std::string& query_statement,
                                             std::size_t k) const;
  // BM25 scores of every Lemma/Theorem item, in ingestion order.
  std::vector<std::pair<const ContextItem*, double>> bm25_scores(
      const std::string& query_statement) const;
  // Best-scoring proved Lemma/Theorem; `exclude` names an extra item to skip.
  std::optional<SimilarProof> most_similar_proof(const std::string& theorem_statement,
                                                 const std::string& exclude = {}) const;
  std::vector<const ContextItem*> keyword_search(const std::vector<std::string>& keywords) const;
  // Definitional items named in the text directly or through a notation.
  // Sorted by name.
  std::vector<const ContextItem*> definitions_in(const std::string& text) const;
  // Notation targets whose notation occurs in the text.
  std::vector<std::string> notation_targets(const std::string& text) const;

  void save(const std::filesystem::path& path) const;
  static GlobalContext load(const std::filesystem::path& path);

  bool operator==(const GlobalContext& other) const {
    return ordered_ == other.ordered_ && skipped_ == other.skipped_;
  }

 private:
  struct Doc {
    std::size_t item;
    std::unordered_map<std::string, std::size_t> tf;
    std::size_t length = 0;
  };

  void build();
  double score(const std::vector<std::string>& query, const Doc& doc) const;
  std::vector<std::string> search_tokens(const ContextItem& item) const;

  std::vector<ContextItem> ordered_;
  std::vector<std::string> skipped_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::vector<NotationEntry> notations_;
  std::unordered_map<std::string, std::string> constructor_of_;  // constructor -> inductive
  std::vector<Doc> docs_;
  std::unordered_map<std::string, std::size_t> df_;
  double avgdl_ = 0.0;
  Bm25Params params_;
};

// Source files under root with the given extension, in manifest order when a
// manifest (one relative path per line, '#' comments) is given, otherwise
// sorted by relative path.
std::vector<SourceFile> collect_sources(const std::filesystem::path& root,
                                        const std::string& extension = ".v",
                                        const std::optional<std::filesystem::path>& manifest = {});

}  // namespace refiner
