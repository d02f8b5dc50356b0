#include "geomgen/engine.hpp"

#include <algorithm>
#include <climits>

#include "geomgen/errors.hpp"

namespace geomgen {

Statement instantiate(const Statement& pattern, const std::map<std::string, std::string>& binding) {
  Statement out{pattern.pred, {}};
  out.args.reserve(pattern.args.size());
  for (const auto& a : pattern.args) {
    auto it = binding.find(a);
    if (it == binding.end()) throw Error("unbound variable '" + a + "' in " + format_statement(pattern));
    out.args.push_back(it->second);
  }
  return out;
}

Statement storage_form(const Statement& s) {
  Statement t = s;
  if (t.pred == Predicate::eqangle6) t.pred = Predicate::eqangle;
  if (t.pred == Predicate::eqratio6) t.pred = Predicate::eqratio;
  return canonicalize(t);
}

std::optional<FactId> ProofState::find(const Statement& s) const {
  auto it = index_.find(storage_form(s));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const KnowledgeRule& ProofState::rule(const std::string& id) const {
  for (const auto& r : *rules_)
    if (r.id == id) return r;
  throw UnknownKP(id);
}

std::vector<Statement> expand_triangle_relation(const Statement& s, const NumericScene* scene) {
  if (!is_triangle_relation(s.pred)) return {};
  const auto& x = s.args;
  const std::string &a = x[0], &b = x[1], &c = x[2], &p = x[3], &q = x[4], &r = x[5];
  bool congruent = s.pred == Predicate::contri || s.pred == Predicate::contri2 || s.pred == Predicate::contriStar;
  int orient = 0;
  if (s.pred == Predicate::simtri || s.pred == Predicate::contri) orient = 1;
  if (s.pred == Predicate::simtri2 || s.pred == Predicate::contri2) orient = -1;
  if (orient == 0) {
    if (!scene) throw Error("orientation of " + format_statement(s) + " needs a scene");
    int o1 = orientation(scene->at(a), scene->at(b), scene->at(c));
    int o2 = orientation(scene->at(p), scene->at(q), scene->at(r));
    orient = o1 == o2 ? 1 : -1;
  }
  auto st = [](Predicate pr, std::vector<std::string> args) { return storage_form(Statement{pr, std::move(args)}); };
  std::vector<Statement> out;
  if (orient > 0) {
    out.push_back(st(Predicate::eqangle, {b, a, b, c, q, p, q, r}));
    out.push_back(st(Predicate::eqangle, {c, a, c, b, r, p, r, q}));
    out.push_back(st(Predicate::eqangle, {a, b, a, c, p, q, p, r}));
  } else {
    out.push_back(st(Predicate::eqangle, {b, a, b, c, q, r, q, p}));
    out.push_back(st(Predicate::eqangle, {c, a, c, b, r, q, r, p}));
    out.push_back(st(Predicate::eqangle, {a, b, a, c, p, r, p, q}));
  }
  if (congruent) {
    out.push_back(st(Predicate::cong, {a, b, p, q}));
    out.push_back(st(Predicate::cong, {b, c, q, r}));
    out.push_back(st(Predicate::cong, {c, a, r, p}));
  } else {
    out.push_back(st(Predicate::eqratio, {a, b, b, c, p, q, q, r}));
    out.push_back(st(Predicate::eqratio, {b, c, c, a, q, r, r, p}));
    out.push_back(st(Predicate::eqratio, {c, a, a, b, r, p, p, q}));
  }
  return out;
}

std::optional<std::vector<int>> algebraic_certificate(const std::vector<Statement>& given,
                                                      const Statement& candidate) {
  AlgebraState st;
  for (std::size_t i = 0; i < given.size(); ++i) st.add(given[i], static_cast<FactId>(i));
  auto proof = st.derive(candidate);
  if (!proof) return std::nullopt;
  return proof->cert.sources;
}

std::optional<Certificate> query_ar(const ProofState& state, const Statement& candidate) {
  if (!state.algebra_) return std::nullopt;
  auto proof = state.algebra_->derive(canonicalize(candidate));
  if (!proof) return std::nullopt;
  return proof->cert;
}

std::vector<int> derivation_costs(const ProofState& state) {
  const auto& facts = state.facts();
  std::vector<int> cost(facts.size(), INT_MAX);
  for (std::size_t i = 0; i < facts.size(); ++i)
    if (facts[i].premise) cost[i] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < facts.size(); ++i) {
      if (facts[i].premise) continue;
      for (const auto& d : facts[i].derivations) {
        long long sum = 1;
        bool ok = true;
        for (FactId a : d.antecedents) {
          if (cost[a] == INT_MAX) {
            ok = false;
            break;
          }
          sum += cost[a];
        }
        if (ok && sum < cost[i]) {
          cost[i] = static_cast<int>(std::min<long long>(sum, INT_MAX - 1));
          changed = true;
        }
      }
    }
  }
  return cost;
}

std::vector<Statement> enumerate_conclusions(const ProofState& state) {
  auto cost = derivation_costs(state);
  std::vector<std::pair<int, std::string>> keyed;
  std::vector<Statement> stmts;
  for (std::size_t i = 0; i < state.facts().size(); ++i) {
    const Fact& f = state.facts()[i];
    if (f.premise || cost[i] == INT_MAX) continue;
    bool rewrite = std::all_of(f.derivations.begin(), f.derivations.end(), [](const Derivation& d) {
      return d.kind == Derivation::Kind::algebraic && d.antecedents.size() <= 1;
    });
    if (rewrite) continue;
    keyed.emplace_back(cost[i], format_statement(f.stmt));
    stmts.push_back(f.stmt);
  }
  std::vector<std::size_t> order(stmts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (keyed[x].first != keyed[y].first) return keyed[x].first > keyed[y].first;
    return keyed[x].second < keyed[y].second;
  });
  std::vector<Statement> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(stmts[i]);
  return out;
}

}  // namespace geomgen
