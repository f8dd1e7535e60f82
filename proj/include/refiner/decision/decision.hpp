#pragma once

#include <iosfwd>
#include <memory>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "refiner/core/types.hpp"
#include "refiner/corpus/global_context.hpp"
#include "refiner/llm/gateway.hpp"

namespace refiner {

class DecisionParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Scans for the first line that is exactly one of the three output formats,
// ignoring case, list markers, quotes and a leading "Strategy:" label.
Decision parse_decision(const std::string& text);
// Canonical text; parse_decision(format_decision(d)) == d.
std::string format_decision(const Decision& decision);

struct FeatureVector {
  std::size_t f1 = 0;  // definitions in the goal
  std::size_t f2 = 0;  // definitions in the hypotheses
  std::size_t f3 = 0;  // goal definitions not in the hypotheses
  std::size_t f4 = 0;  // goal definitions no context lemma mentions
  double f5 = 0.0;     // BM25 score of the similar theorem
  std::size_t f6 = 0;  // similar-proof lemmas missing from the context

  bool operator==(const FeatureVector&) const = default;
};

struct LabeledExample {
  FeatureVector features;
  Strategy label = Strategy::Regeneration;

  bool operator==(const LabeledExample&) const = default;
};

// Names of Lemma/Theorem items of g that the similar proof's text uses, in
// order of first use.
std::vector<std::string> similar_proof_lemmas(const GlobalContext& g, const WorkingContext& ctx);
// Definitional items any context lemma mentions (directly or via notation).
std::set<std::string> mentioned_definitions(const GlobalContext& g, const WorkingContext& ctx);

FeatureVector extract_features(const GlobalContext& g, const FailureReport& report,
                               const WorkingContext& ctx);

Strategy derive_label(const std::string& tactic, const GlobalContext& g,
                      const std::set<std::string>& commit_boundary);

// Header f1,f2,f3,f4,f5,f6,label.
void write_dataset(std::ostream& out, const std::vector<LabeledExample>& rows);
std::vector<LabeledExample> read_dataset(std::istream& in);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Strategy predict(const FeatureVector& features) const = 0;
};

// Predicts the most frequent training label (ties: enum order).
class MajorityClassifier : public Classifier {
 public:
  explicit MajorityClassifier(Strategy label = Strategy::Regeneration) : label_(label) {}
  static MajorityClassifier train(const std::vector<LabeledExample>& examples);
  Strategy predict(const FeatureVector&) const override { return label_; }

 private:
  Strategy label_;
};

struct DecisionInput {
  const GlobalContext* g = nullptr;
  std::string theorem;
  const FailureReport* report = nullptr;
  const WorkingContext* ctx = nullptr;
  int iteration = 1;
  std::vector<Strategy> enabled = {Strategy::LemmaDiscovery, Strategy::ContextEnrichment,
                                   Strategy::Regeneration};
};

struct DecisionResult {
  Decision decision;
  bool fallback = false;
  std::vector<LlmCallRecord> calls;
};

class DecisionMaker {
 public:
  virtual ~DecisionMaker() = default;
  virtual DecisionResult decide(const DecisionInput& input) = 0;
};

Decision decide_rule(const GlobalContext& g, const FailureReport& report, const WorkingContext& ctx,
                     const std::vector<Strategy>& enabled = {Strategy::LemmaDiscovery,
                                                             Strategy::ContextEnrichment,
                                                             Strategy::Regeneration});
Decision decide_random(std::mt19937_64& rng, const GlobalContext& g, const FailureReport& report,
                       const std::vector<Strategy>& enabled = {Strategy::LemmaDiscovery,
                                                               Strategy::ContextEnrichment,
                                                               Strategy::Regeneration});
DecisionResult decide_llm(const Gateway& gateway, const DecisionInput& input);

class LlmDecisionMaker : public DecisionMaker {
 public:
  explicit LlmDecisionMaker(std::shared_ptr<const Gateway> gateway) : gateway_(std::move(gateway)) {}
  DecisionResult decide(const DecisionInput& input) override { return decide_llm(*gateway_, input); }

 private:
  std::shared_ptr<const Gateway> gateway_;
};

class RuleDecisionMaker : public DecisionMaker {
 public:
  DecisionResult decide(const DecisionInput& in) override {
    return {decide_rule(*in.g, *in.report, *in.ctx, in.enabled), false, {}};
  }
};

class RandomDecisionMaker : public DecisionMaker {
 public:
  explicit RandomDecisionMaker(std::uint64_t seed) : rng_(seed) {}
  DecisionResult decide(const DecisionInput& in) override {
    return {decide_random(rng_, *in.g, *in.report, in.enabled), false, {}};
  }

 private:
  std::mt19937_64 rng_;
};

// Maps a predicted label to a decision with the same payloads the rule-based
// maker would use.
class ClassifierDecisionMaker : public DecisionMaker {
 public:
  explicit ClassifierDecisionMaker(std::shared_ptr<const Classifier> model)
      : model_(std::move(model)) {}
  DecisionResult decide(const DecisionInput& input) override;

 private:
  std::shared_ptr<const Classifier> model_;
};

}  // namespace refiner
