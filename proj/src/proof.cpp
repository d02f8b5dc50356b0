#include "geomgen/proof.hpp"

#include <algorithm>
#include <climits>
#include <functional>

#include "geomgen/errors.hpp"

namespace geomgen {

std::set<std::string> ProofPath::used_rules() const {
  std::set<std::string> out;
  for (const auto& s : steps)
    if (!s.algebraic()) out.insert(s.rule_id);
  return out;
}

namespace {

struct Choice {
  Derivation derivation;
  long long cost = LLONG_MAX;
};

long long tree_cost(const Derivation& d, const std::vector<long long>& cost) {
  long long c = 1;
  for (FactId a : d.antecedents) {
    if (cost[a] == LLONG_MAX) return LLONG_MAX;
    c += cost[a];
  }
  return c;
}

/// Algebraic certificate for `id` drawn from the cheapest facts of the state:
/// the shortest cost tier prefix that implies it, then repeated removal of the
/// most expensive certificate member that the remaining facts can replace.
std::optional<Derivation> recertify(const ProofState& state, FactId id, const std::vector<long long>& cost,
                                    const std::set<FactId>& active, long long bound) {
  const Statement& target = state.fact(id).stmt;
  if (!is_algebraic(target.pred)) return std::nullopt;
  std::vector<FactId> pool;
  for (std::size_t i = 0; i < state.facts().size(); ++i) {
    FactId f = static_cast<FactId>(i);
    if (f == id || active.count(f) || cost[f] >= bound) continue;
    if (is_numeric_guard(state.fact(f).stmt.pred)) continue;
    pool.push_back(f);
  }
  std::stable_sort(pool.begin(), pool.end(), [&](FactId x, FactId y) { return cost[x] < cost[y]; });
  auto derives = [&](const std::vector<FactId>& ids) -> std::optional<AlgebraicProof> {
    AlgebraState st;
    for (FactId f : ids) st.add(state.fact(f).stmt, f);
    return st.derive(target);
  };
  std::size_t lo = 1, hi = pool.size();
  if (pool.empty() || !derives(pool)) return std::nullopt;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (derives({pool.begin(), pool.begin() + static_cast<long>(mid)}))
      hi = mid;
    else
      lo = mid + 1;
  }
  while (lo < pool.size() && cost[pool[lo]] == cost[pool[lo - 1]]) ++lo;
  std::vector<FactId> kept(pool.begin(), pool.begin() + static_cast<long>(lo));
  auto weight = [&](const std::vector<FactId>& ids) {
    long long w = 0;
    for (FactId f : ids) w += cost[f];
    return w;
  };
  // Certificate of `ids`, shrunk by dropping its most expensive redundant members.
  auto certify = [&](const std::vector<FactId>& ids) -> std::optional<AlgebraicProof> {
    auto proof = derives(ids);
    if (!proof) return std::nullopt;
    std::vector<FactId> src = proof->cert.sources;
    std::sort(src.begin(), src.end(), [&](FactId x, FactId y) { return cost[x] > cost[y]; });
    for (std::size_t i = 0; i < src.size();) {
      std::vector<FactId> rest = src;
      rest.erase(rest.begin() + static_cast<long>(i));
      if (auto p = derives(rest)) {
        src = std::move(rest);
        proof = std::move(p);
      } else {
        ++i;
      }
    }
    return proof;
  };
  std::set<FactId> essential;
  auto proof = certify(kept);
  for (;;) {
    std::vector<FactId> sources = proof->cert.sources;
    std::sort(sources.begin(), sources.end(), [&](FactId x, FactId y) { return cost[x] > cost[y]; });
    bool improved = false;
    for (FactId s : sources) {
      if (essential.count(s)) continue;
      std::vector<FactId> rest;
      for (FactId f : kept)
        if (f != s) rest.push_back(f);
      auto p = certify(rest);
      if (p && weight(p->cert.sources) < weight(proof->cert.sources)) {
        kept = std::move(rest);
        proof = std::move(p);
        improved = true;
        break;
      }
      essential.insert(s);
    }
    if (!improved) break;
  }
  Derivation d;
  d.kind = Derivation::Kind::algebraic;
  d.subsystem = proof->subsystem;
  d.antecedents = proof->cert.sources;
  std::sort(d.antecedents.begin(), d.antecedents.end());
  return d;
}

}  // namespace

ProofDAG traceback(const ProofState& state, const Statement& conclusion) {
  auto target = state.find(conclusion);
  if (!target) throw NotDerived(format_statement(conclusion) + " is not among the derived facts");
  if (state.fact(*target).premise) throw NotDerived(format_statement(conclusion) + " is a premise");
  auto dp = derivation_costs(state);
  if (dp[*target] == INT_MAX) throw NotDerived(format_statement(conclusion) + " has no grounded derivation");
  std::vector<long long> cost(dp.begin(), dp.end());
  for (auto& c : cost)
    if (c == INT_MAX) c = LLONG_MAX;

  ProofDAG dag;
  dag.conclusion = state.fact(*target).stmt;
  dag.scene = &state.scene();
  dag.rules = &state.rules();
  std::set<FactId> visited, active;
  std::function<void(FactId)> visit = [&](FactId id) {
    if (!visited.insert(id).second) return;
    const Fact& f = state.fact(id);
    if (f.premise) {
      dag.premises.push_back(f.stmt);
      return;
    }
    active.insert(id);
    Choice best;
    for (const auto& d : f.derivations) {
      bool cyclic = std::any_of(d.antecedents.begin(), d.antecedents.end(), [&](FactId a) { return active.count(a); });
      long long c = cyclic ? LLONG_MAX : tree_cost(d, cost);
      if (c < best.cost) best = {d, c};
    }
    // An alternative cheaper than best.cost needs antecedents costing at most best.cost - 2.
    if (best.cost >= 2) {
      long long bound = best.cost == LLONG_MAX ? LLONG_MAX : best.cost - 1;
      if (auto alt = recertify(state, id, cost, active, bound)) {
        long long c = tree_cost(*alt, cost);
        if (c < best.cost) best = {*alt, c};
      }
    }
    if (best.cost == LLONG_MAX) throw NotDerived(format_statement(f.stmt) + " has no acyclic derivation");
    for (FactId a : best.derivation.antecedents) visit(a);
    active.erase(id);
    cost[id] = best.cost;
    const Derivation& d = best.derivation;
    ProofStep step;
    step.derived = f.stmt;
    step.rule_id = d.kind == Derivation::Kind::algebraic ? "AR" : d.rule_id;
    step.subsystem = d.subsystem;
    step.binding = d.binding;
    step.guards = d.guards;
    for (FactId a : d.antecedents) step.antecedents.push_back(state.fact(a).stmt);
    dag.steps.push_back(std::move(step));
  };
  visit(*target);
  return dag;
}

namespace {

std::string check_rule_step(const ProofStep& step, const std::vector<KnowledgeRule>& rules,
                            const NumericScene& scene, const std::set<Statement>& known) {
  auto rule = std::find_if(rules.begin(), rules.end(), [&](const KnowledgeRule& r) { return r.id == step.rule_id; });
  if (rule == rules.end()) return "unknown rule " + step.rule_id;
  std::set<Statement> ants;
  for (const auto& a : step.antecedents) ants.insert(storage_form(a));
  for (const auto& p : rule->premises) {
    Statement inst = instantiate(p, step.binding);
    if (is_numeric_guard(p.pred)) {
      if (!check_numeric(inst, scene)) return "guard " + format_statement(inst) + " fails";
      continue;
    }
    Statement s = storage_form(inst);
    if (!ants.count(s)) return "premise " + format_statement(inst) + " is not an antecedent";
  }
  for (const auto& a : ants)
    if (!known.count(a)) return "antecedent " + format_statement(a) + " is not established";
  Statement concl = instantiate(rule->conclusion, step.binding);
  Statement derived = storage_form(step.derived);
  if (storage_form(concl) == derived) return {};
  for (const auto& c : expand_triangle_relation(concl, &scene))
    if (c == derived) return {};
  return "conclusion " + format_statement(concl) + " does not yield " + format_statement(step.derived);
}

std::string check_algebraic_step(const ProofStep& step, const NumericScene& scene, const std::set<Statement>& known) {
  for (const auto& a : step.antecedents)
    if (!known.count(storage_form(a))) return "antecedent " + format_statement(a) + " is not established";
  if (!algebraic_certificate(step.antecedents, step.derived)) return "not implied algebraically";
  if (!check_numeric(step.derived, scene)) return "fails numerically";
  return {};
}

}  // namespace

std::string replay(const ProofPath& path, const std::vector<KnowledgeRule>& rules, const NumericScene& scene) {
  std::set<Statement> known;
  for (const auto& p : path.premises) known.insert(storage_form(p));
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const auto& step = path.steps[i];
    std::string err = step.algebraic() ? check_algebraic_step(step, scene, known)
                                       : check_rule_step(step, rules, scene, known);
    if (!err.empty()) return "step " + std::to_string(i + 1) + " (" + format_statement(step.derived) + "): " + err;
    known.insert(storage_form(step.derived));
  }
  if (path.steps.empty() || storage_form(path.steps.back().derived) != storage_form(path.conclusion))
    return "path does not end in the conclusion";
  return {};
}

ProofPath prune(const ProofDAG& dag) {
  if (!dag.scene || !dag.rules) throw BrokenProof("proof DAG carries no scene or rule catalog");
  std::vector<ProofStep> steps = dag.steps;
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<Statement> needed{storage_form(dag.conclusion)};
    std::vector<bool> keep(steps.size(), false);
    for (std::size_t i = steps.size(); i-- > 0;) {
      if (!needed.count(storage_form(steps[i].derived))) continue;
      keep[i] = true;
      for (const auto& a : steps[i].antecedents) needed.insert(storage_form(a));
    }
    std::vector<ProofStep> kept;
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (keep[i]) kept.push_back(std::move(steps[i]));
    changed = kept.size() != steps.size();
    steps = std::move(kept);
  }

  ProofPath path;
  path.conclusion = dag.conclusion;
  std::set<Statement> used;
  for (const auto& s : steps)
    for (const auto& a : s.antecedents) used.insert(storage_form(a));
  for (const auto& p : dag.premises)
    if (used.count(storage_form(p))) path.premises.push_back(p);
  path.steps = std::move(steps);
  if (auto err = replay(path, *dag.rules, *dag.scene); !err.empty()) throw BrokenProof(err);
  return path;
}

nlohmann::ordered_json to_json(const ProofPath& path) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& s : path.steps) {
    nlohmann::ordered_json ants = nlohmann::ordered_json::array();
    for (const auto& a : s.antecedents) ants.push_back(format_statement(a));
    steps.push_back({{"rule_id", s.rule_id}, {"antecedents", ants}, {"derived", format_statement(s.derived)}});
  }
  return {{"conclusion", format_statement(path.conclusion)}, {"steps", steps}};
}

}  // namespace geomgen
