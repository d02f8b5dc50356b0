#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomgen/engine.hpp"

namespace geomgen {

/// One derivation step with all statements spelled out, independent of the
/// ProofState it came from.
struct ProofStep {
  Statement derived;
  std::string rule_id;    // knowledge rule id, or "AR"
  std::string subsystem;  // algebraic steps: "angle" | "ratio" | "cong"
  std::map<std::string, std::string> binding;
  std::vector<Statement> antecedents;
  std::vector<Statement> guards;

  bool algebraic() const { return rule_id == "AR"; }
};

/// Ancestor DAG of a conclusion, one chosen derivation per fact, in
/// topological order (antecedents first, conclusion last).
struct ProofDAG {
  Statement conclusion;
  std::vector<Statement> premises;  // premises the DAG reaches
  std::vector<ProofStep> steps;
  const NumericScene* scene = nullptr;
  const std::vector<KnowledgeRule>* rules = nullptr;
};

struct ProofPath {
  Statement conclusion;
  std::vector<Statement> premises;
  std::vector<ProofStep> steps;

  int step_count() const { return static_cast<int>(steps.size()); }
  std::set<std::string> used_rules() const;  // knowledge rule ids, "AR" excluded
};

/// Picks, per fact, the derivation with the least cumulative step count
/// (earliest derivation on ties). Throws NotDerived for premises and facts
/// absent from the state.
ProofDAG traceback(const ProofState& state, const Statement& conclusion);

/// Drops steps no later step or the conclusion uses, then replays the path
/// from its premises. Throws BrokenProof when a step does not replay.
ProofPath prune(const ProofDAG& dag);

/// Re-executes every step against the rule catalog, the scene (guards) and
/// fresh algebraic subsystems. Returns an empty string on success, otherwise
/// a description of the first failing step.
std::string replay(const ProofPath& path, const std::vector<KnowledgeRule>& rules, const NumericScene& scene);

nlohmann::ordered_json to_json(const ProofPath& path);

}  // namespace geomgen
