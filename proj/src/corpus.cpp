#include "refiner/corpus/global_context.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "refiner/core/serialize.hpp"
#include "refiner/core/text.hpp"
#include "refiner/core/vernacular.hpp"
#include "refiner/prover/sentences.hpp"

namespace refiner {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool by_name(const ContextItem* a, const ContextItem* b) { return a->name < b->name; }

}  // namespace

DuplicateName::DuplicateName(std::vector<std::string> names)
    : std::runtime_error("duplicate item names: " + join(names, ", ")), names_(std::move(names)) {}

std::string NotationEntry::key() const {
  std::vector<std::string> flat;
  for (const auto& g : groups) flat.insert(flat.end(), g.begin(), g.end());
  return join(flat, " ");
}

bool NotationEntry::matches(const std::vector<std::string>& lexical) const {
  if (groups.empty()) return false;
  std::size_t pos = 0;
  for (const auto& group : groups) {
    bool found = false;
    for (; pos + group.size() <= lexical.size(); ++pos) {
      if (std::equal(group.begin(), group.end(), lexical.begin() + static_cast<long>(pos))) {
        pos += group.size();
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::optional<NotationEntry> parse_notation(const std::string& statement) {
  NotationEntry e;
  e.notation = vernacular::item_name(statement);
  if (e.notation.empty()) return std::nullopt;
  auto close = statement.find('"', statement.find('"') + 1);
  auto def = statement.find(":=", close);
  if (def == std::string::npos) return std::nullopt;
  for (const auto& tok : text::identifier_tokens(statement.substr(def + 2))) {
    if (text::is_identifier(tok)) {
      e.target = tok;
      break;
    }
  }
  if (e.target.empty()) return std::nullopt;
  std::vector<std::string> group;
  for (const auto& tok : text::lexical_tokens(e.notation)) {
    if (text::is_identifier(tok)) {
      if (!group.empty()) e.groups.push_back(std::move(group));
      group.clear();
    } else {
      group.push_back(tok);
    }
  }
  if (!group.empty()) e.groups.push_back(std::move(group));
  return e;
}

std::vector<std::string> bm25_tokens(const std::string& s) {
  auto toks = text::identifier_tokens(s);
  for (auto& t : toks) t = text::to_lower(t);
  return toks;
}

GlobalContext GlobalContext::ingest(const std::vector<SourceFile>& files) {
  std::vector<ContextItem> items;
  std::vector<std::string> skipped;
  std::size_t ordinal = 0;
  for (const auto& file : files) {
    auto sentences = split_sentences(file.text);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      const Sentence& s = sentences[i];
      auto kind = vernacular::classify(s.text);
      if (!kind) continue;  // commands and stray tactics are not items

      // A proof block directly after the sentence belongs to it.
      std::optional<std::string> proof;
      if (i + 1 < sentences.size() && is_proof_open(sentences[i + 1].text)) {
        std::size_t j = i + 1;
        while (j < sentences.size() && !is_any_close(sentences[j].text)) ++j;
        if (j == sentences.size()) {
          skipped.push_back(file.path + ": unterminated proof after: " + s.text);
          i = j;
          continue;
        }
        if (is_accepting_close(sentences[j].text) && is_provable(*kind)) {
          const auto begin = sentences[i + 1].begin;
          proof = file.text.substr(begin, sentences[j].end - begin);
        }
        i = j;
      }

      ContextItem item;
      item.kind = *kind;
      item.statement = s.text;
      item.proof = std::move(proof);
      item.name = vernacular::item_name(s.text);
      if (item.kind == ItemKind::Notation && !parse_notation(s.text)) item.name.clear();
      if (item.name.empty() || s.text.empty() || s.text.back() != '.') {
        skipped.push_back(file.path + ": unparsable sentence: " + s.text);
        continue;
      }
      item.origin = {file.path, ordinal++};
      items.push_back(std::move(item));
    }
  }

  std::map<std::string, int> counts;
  for (const auto& it : items)
    if (it.kind != ItemKind::Notation) ++counts[it.name];
  std::vector<std::string> dupes;
  for (const auto& [name, n] : counts)
    if (n > 1) dupes.push_back(name);
  if (!dupes.empty()) throw DuplicateName(std::move(dupes));

  return from_items(std::move(items), std::move(skipped));
}

GlobalContext GlobalContext::from_items(std::vector<ContextItem> ordered,
                                        std::vector<std::string> skipped) {
  GlobalContext g;
  g.ordered_ = std::move(ordered);
  g.skipped_ = std::move(skipped);
  g.build();
  return g;
}

void GlobalContext::build() {
  by_name_.clear();
  notations_.clear();
  constructor_of_.clear();
  docs_.clear();
  df_.clear();
  avgdl_ = 0.0;

  std::vector<std::string> dupes;
  for (std::size_t i = 0; i < ordered_.size(); ++i) {
    const ContextItem& item = ordered_[i];
    validate(item);
    if (item.kind == ItemKind::Notation) {
      if (auto n = parse_notation(item.statement)) notations_.push_back(std::move(*n));
      continue;
    }
    if (!by_name_.emplace(item.name, i).second) dupes.push_back(item.name);
    if (item.kind == ItemKind::Inductive)
      for (const auto& c : vernacular::constructor_names(item.statement))
        constructor_of_.emplace(c, item.name);
    if (is_provable(item.kind)) {
      Doc d{i, {}, 0};
      for (auto& t : bm25_tokens(item.name + " " + item.statement)) {
        ++d.tf[t];
        ++d.length;
      }
      for (const auto& [t, n] : d.tf) ++df_[t];
      avgdl_ += static_cast<double>(d.length);
      docs_.push_back(std::move(d));
    }
  }
  if (!dupes.empty()) throw DuplicateName(std::move(dupes));
  if (!docs_.empty()) avgdl_ /= static_cast<double>(docs_.size());
}

std::vector<const ContextItem*> GlobalContext::named_items() const {
  std::vector<const ContextItem*> out;
  for (const auto& item : ordered_)
    if (item.kind != ItemKind::Notation) out.push_back(&item);
  return out;
}

std::map<std::string, std::string> GlobalContext::notation_map() const {
  std::map<std::string, std::string> out;
  for (const auto& n : notations_) out.emplace(n.key(), n.target);
  return out;
}

const ContextItem* GlobalContext::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &ordered_[it->second];
}

GlobalContext GlobalContext::prefix_before(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::invalid_argument("unknown item: " + name);
  std::vector<ContextItem> items(ordered_.begin(),
                                 ordered_.begin() + static_cast<long>(it->second));
  return from_items(std::move(items), skipped_);
}

GlobalContext GlobalContext::filtered(
    const std::function<bool(const ContextItem&)>& keep) const {
  std::vector<ContextItem> items;
  for (const auto& item : ordered_)
    if (keep(item)) items.push_back(item);
  return from_items(std::move(items), skipped_);
}

double GlobalContext::score(const std::vector<std::string>& query, const Doc& doc) const {
  const double n = static_cast<double>(docs_.size());
  double total = 0.0;
  for (const auto& term : query) {
    auto tf_it = doc.tf.find(term);
    if (tf_it == doc.tf.end()) continue;
    const double df = static_cast<double>(df_.at(term));
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    const double tf = static_cast<double>(tf_it->second);
    const double norm = params_.k1 * (1.0 - params_.b +
                                      params_.b * static_cast<double>(doc.length) / avgdl_);
    total += idf * tf * (params_.k1 + 1.0) / (tf + norm);
  }
  return total;
}

std::vector<std::pair<const ContextItem*, double>> GlobalContext::bm25_scores(
    const std::string& query_statement) const {
  auto query = bm25_tokens(query_statement);
  std::vector<std::pair<const ContextItem*, double>> out;
  out.reserve(docs_.size());
  for (const auto& d : docs_) out.emplace_back(&ordered_[d.item], score(query, d));
  return out;
}

namespace {

void rank(std::vector<std::pair<const ContextItem*, double>>& scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first->name < b.first->name;
  });
}

}  // namespace

std::vector<const ContextItem*> GlobalContext::bm25_top_k(const std::string& query_statement,
                                                          std::size_t k) const {
  const std::string self = vernacular::item_name(query_statement);
  auto scored = bm25_scores(query_statement);
  std::erase_if(scored, [&](const auto& p) { return !self.empty() && p.first->name == self; });
  rank(scored);
  std::vector<const ContextItem*> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].first);
  return out;
}

std::optional<SimilarProof> GlobalContext::most_similar_proof(
    const std::string& theorem_statement, const std::string& exclude) const {
  const std::string self = vernacular::item_name(theorem_statement);
  auto scored = bm25_scores(theorem_statement);
  std::erase_if(scored, [&](const auto& p) {
    const ContextItem& item = *p.first;
    return !item.proof || (!self.empty() && item.name == self) ||
           (!exclude.empty() && item.name == exclude);
  });
  if (scored.empty()) return std::nullopt;
  rank(scored);
  const ContextItem& best = *scored.front().first;
  return SimilarProof{best.name, best.statement, *best.proof, scored.front().second};
}

std::vector<std::string> GlobalContext::notation_targets(const std::string& s) const {
  std::vector<std::string> out;
  if (notations_.empty()) return out;
  auto lexical = text::lexical_tokens(s);
  for (const auto& n : notations_)
    if (n.matches(lexical) && std::find(out.begin(), out.end(), n.target) == out.end())
      out.push_back(n.target);
  return out;
}

std::vector<std::string> GlobalContext::search_tokens(const ContextItem& item) const {
  std::vector<std::string> toks = text::identifier_tokens(item.statement);
  toks.push_back(item.name);
  std::stringstream parts(item.name);
  for (std::string part; std::getline(parts, part, '_');)
    if (!part.empty()) toks.push_back(part);
  for (auto& t : notation_targets(item.statement)) toks.push_back(std::move(t));
  for (auto& t : toks) t = text::to_lower(t);
  return toks;
}

std::vector<const ContextItem*> GlobalContext::keyword_search(
    const std::vector<std::string>& keywords) const {
  std::set<std::string> wanted;
  for (const auto& k : keywords) {
    auto t = text::to_lower(text::trim(k));
    if (!t.empty()) wanted.insert(t);
  }
  std::vector<std::pair<const ContextItem*, std::size_t>> hits;
  if (wanted.empty()) return {};
  for (const auto* item : named_items()) {
    auto toks = search_tokens(*item);
    std::set<std::string> have(toks.begin(), toks.end());
    std::size_t matched = 0;
    for (const auto& w : wanted) matched += have.count(w);
    if (matched > 0) hits.emplace_back(item, matched);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first->name < b.first->name;
  });
  std::vector<const ContextItem*> out;
  for (const auto& h : hits) out.push_back(h.first);
  return out;
}

std::vector<const ContextItem*> GlobalContext::definitions_in(const std::string& s) const {
  std::set<const ContextItem*> found;
  auto add = [&](const std::string& name) {
    if (const ContextItem* item = find(name); item && is_definitional(item->kind))
      found.insert(item);
  };
  for (const auto& tok : text::identifier_tokens(s)) add(tok);
  for (const auto& target : notation_targets(s)) {
    add(target);
    if (auto c = constructor_of_.find(target); c != constructor_of_.end()) add(c->second);
  }
  std::vector<const ContextItem*> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), by_name);
  return out;
}

void GlobalContext::save(const std::filesystem::path& path) const {
  json j;
  j["format"] = "refiner-snapshot";
  j["version"] = 1;
  j["items"] = ordered_;
  j["skipped"] = skipped_;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot: " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing snapshot: " + path.string());
}

GlobalContext GlobalContext::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read snapshot: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed snapshot " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "refiner-snapshot")
    throw std::runtime_error("not a snapshot file: " + path.string());
  return from_items(j.at("items").get<std::vector<ContextItem>>(),
                    j.value("skipped", std::vector<std::string>{}));
}

std::vector<SourceFile> collect_sources(const std::filesystem::path& root,
                                        const std::string& extension,
                                        const std::optional<std::filesystem::path>& manifest) {
  namespace fs = std::filesystem;
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  std::vector<std::string> rel;
  if (manifest) {
    std::istringstream lines(read(*manifest));
    for (std::string line; std::getline(lines, line);) {
      line = text::trim(line);
      if (!line.empty() && line[0] != '#') rel.push_back(line);
    }
  } else {
    if (!fs::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
    for (const auto& e : fs::recursive_directory_iterator(root))
      if (e.is_regular_file() && e.path().extension() == extension)
        rel.push_back(fs::relative(e.path(), root).generic_string());
    std::sort(rel.begin(), rel.end());
  }
  std::vector<SourceFile> out;
  for (const auto& r : rel) out.push_back({r, read(root / r)});
  return out;
}

}  // namespace refiner
