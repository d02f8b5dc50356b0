#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geomgen/algebra.hpp"
#include "geomgen/numeric.hpp"
#include "geomgen/repository.hpp"
#include "geomgen/statement.hpp"

namespace geomgen {

struct EngineLimits {
  int max_facts = 5000;
  int max_rounds = 20;
  int max_derivations_per_fact = 8;
};

struct Derivation {
  enum class Kind { rule, algebraic };
  Kind kind = Kind::rule;
  std::string rule_id;                         // rule derivations
  std::map<std::string, std::string> binding;  // rule variable -> point
  std::string subsystem;                       // algebraic: "angle" | "ratio" | "cong"
  std::vector<FactId> antecedents;             // symbolic antecedents
  std::vector<Statement> guards;               // numeric antecedents (ncoll, npara, sameside)
};

struct Fact {
  Statement stmt;  // canonical
  bool premise = false;
  int round = 0;
  std::vector<Derivation> derivations;
};

struct AlgebraState;

/// Saturated (or partially saturated) deduction state. Immutable after
/// saturate() returns.
class ProofState {
 public:
  const std::vector<Fact>& facts() const { return facts_; }
  const Fact& fact(FactId id) const { return facts_.at(static_cast<std::size_t>(id)); }
  std::optional<FactId> find(const Statement& s) const;
  bool contains(const Statement& s) const { return find(s).has_value(); }
  const NumericScene& scene() const { return *scene_; }
  const std::vector<KnowledgeRule>& rules() const { return *rules_; }
  const KnowledgeRule& rule(const std::string& id) const;

  bool complete = true;
  std::string incomplete_reason;  // "max_facts" | "max_rounds"
  int rounds = 0;

 private:
  friend class Saturator;
  std::vector<Fact> facts_;
  std::map<Statement, FactId> index_;
  const NumericScene* scene_ = nullptr;
  const std::vector<KnowledgeRule>* rules_ = nullptr;
  std::shared_ptr<AlgebraState> algebra_;

  friend std::optional<Certificate> query_ar(const ProofState&, const Statement&);
};

/// Forward-chains `rules` from `premises` interleaved with algebraic passes
/// until fixpoint or a limit is hit (then `complete` is false). The scene and
/// rules must outlive the returned state.
ProofState saturate(const std::vector<Statement>& premises, const std::vector<KnowledgeRule>& rules,
                    const NumericScene& scene, const EngineLimits& limits = {});

/// Derivation of `candidate` from `given` with freshly built algebraic
/// subsystems; returns the indices into `given` that the certificate uses.
/// Handles para/perp/eqangle(6)/cong/eqratio(6) plus circle and midp.
std::optional<std::vector<int>> algebraic_certificate(const std::vector<Statement>& given,
                                                      const Statement& candidate);

/// Membership query against the algebraic subsystems of a saturated state;
/// no mutation. Certificates name fact ids.
std::optional<Certificate> query_ar(const ProofState& state, const Statement& candidate);

/// Minimum proof cost per fact: premises 0, otherwise the cheapest
/// derivation's 1 + sum of antecedent costs (fixpoint over the derivation
/// graph). Unreachable facts get INT_MAX.
std::vector<int> derivation_costs(const ProofState& state);

/// Storage form: eqangle6/eqratio6 are pattern-level aliases of
/// eqangle/eqratio and are stored under the base predicate, canonicalized.
Statement storage_form(const Statement& s);

/// Derived facts, excluding premises and single-premise algebraic rewrites,
/// ordered by proof cost descending then canonical text.
std::vector<Statement> enumerate_conclusions(const ProofState& state);

/// Components a triangle relation expands to (angle/ratio/cong equalities),
/// for the orientation fixed by the predicate; simtri*/contri* take the
/// orientation from `scene`.
std::vector<Statement> expand_triangle_relation(const Statement& s, const NumericScene* scene);

/// Instantiates a statement pattern.
Statement instantiate(const Statement& pattern, const std::map<std::string, std::string>& binding);

}  // namespace geomgen
