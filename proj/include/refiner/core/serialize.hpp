#pragma once

#include <nlohmann/json.hpp>

#include "refiner/core/types.hpp"

// JSON mappings for the domain types. Traces are written one object per line.
namespace refiner {

using json = nlohmann::json;

void to_json(json& j, const Origin& o);
void from_json(const json& j, Origin& o);
void to_json(json& j, const ContextItem& item);
void from_json(const json& j, ContextItem& item);
void to_json(json& j, const Hypothesis& h);
void from_json(const json& j, Hypothesis& h);
void to_json(json& j, const Goal& g);
void from_json(const json& j, Goal& g);
void to_json(json& j, const ProofState& s);
void from_json(const json& j, ProofState& s);
void to_json(json& j, const FailureReport& r);
void from_json(const json& j, FailureReport& r);
void to_json(json& j, const SimilarProof& s);
void from_json(const json& j, SimilarProof& s);
void to_json(json& j, const WorkingContext& ctx);
void from_json(const json& j, WorkingContext& ctx);
void to_json(json& j, const Decision& d);
void from_json(const json& j, Decision& d);
void to_json(json& j, const PromptBudgets& b);
void from_json(const json& j, PromptBudgets& b);
void to_json(json& j, const EngineConfig& c);
void from_json(const json& j, EngineConfig& c);
void to_json(json& j, const LlmCallSummary& c);
void from_json(const json& j, LlmCallSummary& c);
void to_json(json& j, const AttemptRecord& a);
void from_json(const json& j, AttemptRecord& a);
void to_json(json& j, const IterationRecord& r);
void from_json(const json& j, IterationRecord& r);
void to_json(json& j, const TraceTotals& t);
void from_json(const json& j, TraceTotals& t);
void to_json(json& j, const RefinementTrace& t);
void from_json(const json& j, RefinementTrace& t);

// One compact line, no trailing newline.
std::string trace_to_line(const RefinementTrace& trace);
RefinementTrace trace_from_line(const std::string& line);

}  // namespace refiner
