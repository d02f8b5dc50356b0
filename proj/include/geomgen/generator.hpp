#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomgen/engine.hpp"
#include "geomgen/exdef.hpp"
#include "geomgen/mapping_table.hpp"
#include "geomgen/numeric.hpp"
#include "geomgen/proof.hpp"

namespace geomgen {

enum class Difficulty { Easy, Moderate, Difficult };

std::string difficulty_name(Difficulty d);
/// Accepts "easy", "moderate", "difficult" in any letter case.
Difficulty parse_difficulty(const std::string& s);

/// Easy below 10 steps, Moderate for 10 to 20 inclusive, Difficult above 20.
Difficulty classify_difficulty(int step_count);

struct GenerationRequest {
  std::vector<std::string> knowledge_points;
  Difficulty difficulty = Difficulty::Easy;
  std::uint64_t seed = 0;
  int max_candidates = 4;
  int retry_budget = 32;
  EngineLimits limits{};
};

struct QualifiedProblem {
  ExDefinitionSet exd;
  Statement conclusion;
  ProofPath proof;
  std::set<std::string> used_rules;
  NumericScene scene;
  std::uint64_t seed = 0;  // scene seed
};

struct CheckVerdict {
  bool shortest = false;
  bool kp_complete = false;
  bool clause_complete = false;
  bool difficulty = false;

  bool passed() const { return shortest && kp_complete && clause_complete && difficulty; }
};

/// The four qualification constraints for one candidate proof.
CheckVerdict check(const ExDefinitionSet& exd, const ProofPath& proof, const GenerationRequest& req,
                   const ProofState& state, const Repository& repo);

/// Entries of `exd` that contribute nothing to `proof`: none of their points
/// occurs in a proof statement, none of their emissions is a premise of it,
/// and no contributing entry depends on their points.
std::vector<std::size_t> unused_entries(const ExDefinitionSet& exd, const ProofPath& proof, const Repository& repo);

struct GenerationDiagnostics {
  int attempts = 0;
  int merge_conflicts = 0;
  int disconnected = 0;  // merged sets that split into separate figures
  int degenerate = 0;
  int incomplete = 0;
  int candidates = 0;
  int broken = 0;
  std::map<std::string, int> failures;  // constraint name -> count
};

/// Samples, merges, saturates and checks until `max_candidates` problems
/// qualify or the retry budget runs out. Deterministic in (req, table, repo).
/// Throws UnknownKP for a requested id absent from the table.
std::vector<QualifiedProblem> generate(const GenerationRequest& req, const MappingTable& table, const Repository& repo,
                                       GenerationDiagnostics* diagnostics = nullptr);

nlohmann::ordered_json request_json(const GenerationRequest& req);
/// {request, exdefs, clauses_formal, question_formal, proof_steps, used_rules,
///  step_count, difficulty, seed}
nlohmann::ordered_json problem_json(const QualifiedProblem& p, const GenerationRequest& req, const Repository& repo);

}  // namespace geomgen
