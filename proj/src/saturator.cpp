#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <tuple>

#include "geomgen/engine.hpp"
#include "geomgen/errors.hpp"

namespace geomgen {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLookupTol = 1e-9;
constexpr std::size_t kMaxPendingPerPass = 50000;
constexpr std::size_t kMinimizeLimit = 24;

double wrap_pi(double x) {
  x = std::fmod(x, kPi);
  if (x < 0) x += kPi;
  if (x >= kPi) x -= kPi;
  return x;
}

double periodic_gap(double x, double y) {
  double d = std::abs(x - y);
  return std::min(d, kPi - d);
}

enum class Quantity { dir, len, ang, rat };

enum class Generator { tuples, halves, join, guard };

Generator generator_for(Predicate p) {
  switch (p) {
    case Predicate::ncoll:
    case Predicate::npara:
    case Predicate::sameside:
      return Generator::guard;
    case Predicate::eqangle:
    case Predicate::eqratio:
      return Generator::join;
    case Predicate::para:
    case Predicate::perp:
    case Predicate::cong:
    case Predicate::eqangle6:
    case Predicate::eqratio6:
      return Generator::halves;
    default:
      return Generator::tuples;
  }
}

Quantity quantity_for(Predicate p) {
  switch (p) {
    case Predicate::para:
    case Predicate::perp:
      return Quantity::dir;
    case Predicate::cong:
      return Quantity::len;
    case Predicate::eqangle6:
      return Quantity::ang;
    default:
      return Quantity::rat;
  }
}

bool periodic(Quantity q) { return q == Quantity::dir || q == Quantity::ang; }

// First-occurrence renumbering of a slot pattern.
std::vector<int> shape_of(const std::vector<int>& vars) {
  std::vector<int> seen, shape;
  for (int v : vars) {
    auto it = std::find(seen.begin(), seen.end(), v);
    if (it == seen.end()) {
      shape.push_back(static_cast<int>(seen.size()));
      seen.push_back(v);
    } else {
      shape.push_back(static_cast<int>(it - seen.begin()));
    }
  }
  return shape;
}

std::vector<int> distinct_vars(const std::vector<int>& vars) {
  std::vector<int> out;
  for (int v : vars)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

bool trivial_statement(const Statement& s) {
  const auto& a = s.args;
  auto pair_eq = [&](int i, int j) { return std::minmax(a[i], a[i + 1]) == std::minmax(a[j], a[j + 1]); };
  switch (s.pred) {
    case Predicate::para:
    case Predicate::cong:
      return pair_eq(0, 2) || a[0] == a[1] || a[2] == a[3];
    case Predicate::eqangle:
    case Predicate::eqangle6:
    case Predicate::eqratio:
    case Predicate::eqratio6:
      return (pair_eq(0, 2) && pair_eq(4, 6)) || (pair_eq(0, 4) && pair_eq(2, 6));
    default:
      return false;
  }
}

struct PremisePattern {
  Predicate pred;
  std::vector<int> vars;
  Generator gen;
};

struct CompiledRule {
  const KnowledgeRule* rule;
  std::vector<std::string> var_names;
  std::vector<PremisePattern> premises;
  PremisePattern conclusion;
};

struct Justification {
  FactId fact = -1;
  AlgebraicProof proof;
};

struct PendingAntecedent {
  Statement stmt;  // storage form
  Justification just;
};

struct Instance {
  const CompiledRule* rule;
  std::map<std::string, std::string> binding;
  std::vector<PendingAntecedent> ants;
  std::vector<Statement> guards;
  Statement conclusion;
};

struct HalfEntry {
  double value;
  std::vector<int> pts;
};

struct Line {
  int a, b;  // representative pair
  std::vector<int> pts;
  double theta;
};

}  // namespace

class Saturator {
 public:
  Saturator(ProofState& st, const NumericScene& scene, const std::vector<KnowledgeRule>& rules,
            const EngineLimits& limits)
      : st_(st), limits_(limits) {
    st_.scene_ = &scene;
    st_.rules_ = &rules;
    st_.algebra_ = std::make_shared<AlgebraState>();
    setup_points();
    compile_rules();
  }

  void run(const std::vector<Statement>& premises) {
    for (const auto& p : premises) {
      std::vector<Statement> forms{storage_form(p)};
      for (auto& c : expand_triangle_relation(p, &st_.scene())) forms.push_back(c);
      for (const auto& f : forms)
        if (!lookup(f)) insert_fact(f, true, 0);
    }
    for (int round = 1; round <= limits_.max_rounds; ++round) {
      round_ = round;
      st_.rounds = round;
      std::size_t before = st_.facts_.size();
      dd_pass();
      if (!st_.complete) return;
      ar_pass();
      if (!st_.complete) return;
      if (st_.facts_.size() == before) return;
    }
    st_.complete = false;
    st_.incomplete_reason = "max_rounds";
  }

 private:
  // ------------------------------------------------------------ points

  void setup_points() {
    names_ = st_.scene().order();
    std::sort(names_.begin(), names_.end());
    n_ = static_cast<int>(names_.size());
    for (int i = 0; i < n_; ++i) {
      idx_[names_[i]] = i;
      coords_.push_back(st_.scene().at(names_[i]));
    }
    theta_.assign(n_ * n_, 0.0);
    loglen_.assign(n_ * n_, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        Coord d = coords_[j] - coords_[i];
        theta_[i * n_ + j] = wrap_pi(std::atan2(d.y(), d.x()));
        loglen_[i * n_ + j] = std::log(d.norm());
      }
  }

  double theta(int i, int j) const { return theta_[i * n_ + j]; }
  double loglen(int i, int j) const { return loglen_[i * n_ + j]; }

  int point(const std::string& name) const {
    auto it = idx_.find(name);
    if (it == idx_.end()) throw Error("point '" + name + "' missing from scene");
    return it->second;
  }

  bool numeric(const Statement& s) const {
    std::array<Coord, 8> buf;
    if (s.args.size() > buf.size()) return false;
    for (std::size_t i = 0; i < s.args.size(); ++i) buf[i] = coords_[point(s.args[i])];
    return evaluate(s.pred, std::span<const Coord>(buf.data(), s.args.size()), st_.scene().tolerance,
                    st_.scene().margin);
  }

  // ------------------------------------------------------------ rules

  void compile_rules() {
    for (const auto& r : st_.rules()) {
      CompiledRule cr;
      cr.rule = &r;
      cr.var_names = r.variables();
      auto compile = [&](const Statement& s) {
        PremisePattern p{s.pred, {}, generator_for(s.pred)};
        for (const auto& a : s.args)
          p.vars.push_back(
              static_cast<int>(std::find(cr.var_names.begin(), cr.var_names.end(), a) - cr.var_names.begin()));
        return p;
      };
      for (const auto& p : r.premises) cr.premises.push_back(compile(p));
      cr.conclusion = compile(r.conclusion);
      compiled_.push_back(std::move(cr));
    }
  }

  // ------------------------------------------------------------ facts

  std::optional<FactId> lookup(const Statement& storage) const {
    auto it = st_.index_.find(storage);
    if (it == st_.index_.end()) return std::nullopt;
    return it->second;
  }

  bool full() const { return static_cast<int>(st_.facts_.size()) >= limits_.max_facts; }

  FactId insert_fact(const Statement& storage, bool premise, int cost) {
    FactId id = static_cast<FactId>(st_.facts_.size());
    st_.facts_.push_back(Fact{storage, premise, round_, {}});
    st_.index_.emplace(storage, id);
    cost_.push_back(cost);
    if (!is_triangle_relation(storage.pred)) st_.algebra_->add(storage, id);
    if (storage.pred == Predicate::eqangle || storage.pred == Predicate::eqratio) add_to_join(storage, id);
    return id;
  }

  int cost_of(const std::vector<FactId>& ants) const {
    long long c = 1;
    for (FactId a : ants) c += cost_[a];
    return static_cast<int>(std::min<long long>(c, INT_MAX / 2));
  }

  // Adds a derivation unless an identical one exists or the cap is reached.
  void add_derivation(FactId id, Derivation d) {
    Fact& f = st_.facts_[id];
    if (f.premise) return;
    if (std::find(d.antecedents.begin(), d.antecedents.end(), id) != d.antecedents.end()) return;
    if (static_cast<int>(f.derivations.size()) >= limits_.max_derivations_per_fact) return;
    std::sort(d.antecedents.begin(), d.antecedents.end());
    for (const auto& e : f.derivations)
      if (e.kind == d.kind && e.rule_id == d.rule_id && e.antecedents == d.antecedents && e.guards == d.guards) return;
    cost_[id] = std::min(cost_[id], cost_of(d.antecedents));
    f.derivations.push_back(std::move(d));
  }

  FactId derive_fact(const Statement& storage, Derivation d) {
    if (auto id = lookup(storage)) {
      add_derivation(*id, std::move(d));
      return *id;
    }
    FactId id = insert_fact(storage, false, INT_MAX / 2);
    add_derivation(id, std::move(d));
    return id;
  }

  // Shrinks an algebraic certificate: re-derive from the sources alone
  // (cheapest first) until stable, then greedily drop expensive sources.
  std::vector<FactId> minimize(const Statement& target, std::vector<FactId> sources) const {
    auto by_cost = [&](FactId x, FactId y) { return cost_[x] != cost_[y] ? cost_[x] < cost_[y] : x < y; };
    auto rederive = [&](const std::vector<FactId>& src) -> std::optional<std::vector<FactId>> {
      std::vector<Statement> given;
      for (FactId f : src) given.push_back(st_.facts_[f].stmt);
      auto cert = algebraic_certificate(given, target);
      if (!cert) return std::nullopt;
      std::vector<FactId> out;
      for (int i : *cert) out.push_back(src[i]);
      return out;
    };
    for (int iter = 0; iter < 3; ++iter) {
      std::sort(sources.begin(), sources.end(), by_cost);
      auto next = rederive(sources);
      if (!next || next->size() == sources.size()) break;
      sources = *next;
    }
    if (sources.size() <= kMinimizeLimit) {
      std::vector<FactId> order = sources;
      std::sort(order.begin(), order.end(), [&](FactId x, FactId y) { return by_cost(y, x); });
      for (FactId drop : order) {
        std::vector<FactId> rest;
        for (FactId f : sources)
          if (f != drop) rest.push_back(f);
        if (rest.empty()) continue;
        if (auto again = rederive(rest)) sources = *again;
      }
    }
    std::sort(sources.begin(), sources.end());
    return sources;
  }

  Derivation algebraic_derivation(const Statement& target, const AlgebraicProof& proof) const {
    Derivation d;
    d.kind = Derivation::Kind::algebraic;
    d.subsystem = proof.subsystem;
    d.antecedents = minimize(target, proof.cert.sources);
    return d;
  }

  // ------------------------------------------------------------ holds

  std::optional<Justification> holds(const Statement& inst) {
    Statement key = storage_form(inst);
    auto memo = memo_.find(key);
    if (memo != memo_.end()) return memo->second;
    std::optional<Justification> out;
    if (auto id = lookup(key)) {
      out = Justification{*id, {}};
    } else if (key.pred == Predicate::para || key.pred == Predicate::perp || key.pred == Predicate::eqangle ||
               key.pred == Predicate::cong || key.pred == Predicate::eqratio || key.pred == Predicate::circle ||
               key.pred == Predicate::midp) {
      if (auto p = st_.algebra_->derive(key); p && !p->cert.sources.empty()) out = Justification{-1, *p};
    }
    memo_.emplace(key, out);
    return out;
  }

  // ------------------------------------------------------------ matching state

  struct Ctx {
    const CompiledRule* rule;
    std::vector<int> bind;  // var -> point or -1
    std::vector<int> used;  // point -> var or -1
    std::vector<char> done;
    std::vector<PendingAntecedent> ants;
    std::vector<Statement> guards;
  };

  Statement inst(const Ctx& c, const PremisePattern& p) const {
    Statement s{p.pred, {}};
    for (int v : p.vars) s.args.push_back(names_[c.bind[v]]);
    return s;
  }

  bool bound(const Ctx& c, const PremisePattern& p) const {
    return std::all_of(p.vars.begin(), p.vars.end(), [&](int v) { return c.bind[v] >= 0; });
  }

  // Binds the given vars to pts (parallel) when consistent; records newly
  // bound vars in `fresh`. Returns false (with nothing bound) on conflict.
  bool try_bind(Ctx& c, const std::vector<int>& vars, const std::vector<int>& pts, std::vector<int>& fresh) {
    fresh.clear();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      int v = vars[i], p = pts[i];
      if (c.bind[v] >= 0) {
        if (c.bind[v] != p) {
          unbind(c, fresh);
          return false;
        }
        continue;
      }
      if (c.used[p] >= 0) {
        unbind(c, fresh);
        return false;
      }
      c.bind[v] = p;
      c.used[p] = v;
      fresh.push_back(v);
    }
    return true;
  }

  void unbind(Ctx& c, std::vector<int>& fresh) {
    for (int v : fresh) {
      c.used[c.bind[v]] = -1;
      c.bind[v] = -1;
    }
    fresh.clear();
  }

  // ------------------------------------------------------------ tables

  const std::vector<std::vector<int>>& tuple_table(Predicate pred, const std::vector<int>& shape) {
    auto key = std::make_pair(pred, shape);
    auto it = tuples_.find(key);
    if (it != tuples_.end()) return it->second;
    int m = shape.empty() ? 0 : *std::max_element(shape.begin(), shape.end()) + 1;
    std::vector<std::vector<int>> table;
    std::vector<int> pts(m, -1);
    std::array<Coord, 8> buf;
    std::function<void(int)> rec = [&](int depth) {
      if (depth == m) {
        for (std::size_t s = 0; s < shape.size(); ++s) buf[s] = coords_[pts[shape[s]]];
        if (evaluate(pred, std::span<const Coord>(buf.data(), shape.size()), st_.scene().tolerance,
                     st_.scene().margin))
          table.push_back(pts);
        return;
      }
      for (int p = 0; p < n_; ++p) {
        if (std::find(pts.begin(), pts.begin() + depth, p) != pts.begin() + depth) continue;
        pts[depth] = p;
        rec(depth + 1);
      }
    };
    rec(0);
    return tuples_.emplace(key, std::move(table)).first->second;
  }

  std::optional<double> half_value(Quantity q, const std::vector<int>& shape, const std::vector<int>& pts) const {
    auto P = [&](int s) { return pts[shape[s]]; };
    switch (q) {
      case Quantity::dir:
        return theta(P(0), P(1));
      case Quantity::len:
        return loglen(P(0), P(1));
      case Quantity::ang: {
        if (P(0) == P(1) || P(2) == P(3)) return std::nullopt;
        double v = wrap_pi(theta(P(0), P(1)) - theta(P(2), P(3)));
        if (v < 1e-6 || v > kPi - 1e-6) return std::nullopt;
        return v;
      }
      case Quantity::rat:
        if (P(0) == P(1) || P(2) == P(3)) return std::nullopt;
        return loglen(P(0), P(1)) - loglen(P(2), P(3));
    }
    return std::nullopt;
  }

  const std::vector<HalfEntry>& half_table(Quantity q, const std::vector<int>& shape) {
    auto key = std::make_pair(static_cast<int>(q), shape);
    auto it = halves_.find(key);
    if (it != halves_.end()) return it->second;
    int m = *std::max_element(shape.begin(), shape.end()) + 1;
    std::vector<HalfEntry> table;
    std::vector<int> pts(m, -1);
    std::function<void(int)> rec = [&](int depth) {
      if (depth == m) {
        if (auto v = half_value(q, shape, pts)) table.push_back({*v, pts});
        return;
      }
      for (int p = 0; p < n_; ++p) {
        if (std::find(pts.begin(), pts.begin() + depth, p) != pts.begin() + depth) continue;
        pts[depth] = p;
        rec(depth + 1);
      }
    };
    rec(0);
    std::sort(table.begin(), table.end(), [](const HalfEntry& x, const HalfEntry& y) {
      return x.value != y.value ? x.value < y.value : x.pts < y.pts;
    });
    return halves_.emplace(key, std::move(table)).first->second;
  }

  // ------------------------------------------------------------ join index

  void add_to_join(const Statement& s, FactId id) {
    auto& fam = join_[s.pred];
    std::vector<int> pts;
    for (const auto& a : s.args) pts.push_back(point(a));
    std::set<std::vector<int>> seen;
    for (const auto& perm : symmetry_group(s.pred)) {
      std::vector<int> t(pts.size());
      for (std::size_t i = 0; i < perm.size(); ++i) t[i] = pts[perm[i]];
      if (!seen.insert(t).second) continue;
      int at = static_cast<int>(fam.tuples.size());
      fam.by_front[{t[0], t[1]}].push_back(at);
      fam.tuples.push_back(std::move(t));
      fam.owner.push_back(id);
    }
  }

  struct JoinFamily {
    std::vector<std::vector<int>> tuples;
    std::vector<FactId> owner;
    std::map<std::pair<int, int>, std::vector<int>> by_front;
  };

  // ------------------------------------------------------------ candidate generation

  double estimate(const Ctx& c, const PremisePattern& p) {
    auto dv = distinct_vars(p.vars);
    int unbound = 0;
    for (int v : dv)
      if (c.bind[v] < 0) ++unbound;
    if (unbound == 0) return 0;
    double bound_frac = std::pow(static_cast<double>(std::max(n_, 2)), dv.size() - unbound);
    switch (p.gen) {
      case Generator::tuples:
        return 1 + tuple_table(p.pred, shape_of(p.vars)).size() / bound_frac;
      case Generator::halves: {
        std::size_t k = p.vars.size() / 2;
        auto count = [&](std::size_t from) {
          std::vector<int> h(p.vars.begin() + from, p.vars.begin() + from + k);
          int u = 0;
          for (int v : distinct_vars(h))
            if (c.bind[v] < 0) ++u;
          return u;
        };
        int u = std::min(count(0), count(k));
        return 2 + std::pow(static_cast<double>(n_), u);
      }
      case Generator::join: {
        auto it = join_.find(p.pred);
        double size = it == join_.end() ? 0 : static_cast<double>(it->second.tuples.size());
        return 1 + (front_perm(c, p) ? size / (n_ * n_) : size);
      }
      case Generator::guard:
        return 1e18;
    }
    return 1e18;
  }

  // A symmetry of the pattern that moves two bound slots to the front.
  std::optional<std::vector<int>> front_perm(const Ctx& c, const PremisePattern& p) const {
    for (const auto& perm : symmetry_group(p.pred)) {
      if (c.bind[p.vars[perm[0]]] >= 0 && c.bind[p.vars[perm[1]]] >= 0) {
        std::vector<int> out(p.vars.size());
        for (std::size_t i = 0; i < perm.size(); ++i) out[i] = p.vars[perm[i]];
        return out;
      }
    }
    return std::nullopt;
  }

  template <class F>
  void generate(Ctx& c, const PremisePattern& p, F&& cb) {
    if (bound(c, p)) {
      cb();
      return;
    }
    std::vector<int> fresh;
    switch (p.gen) {
      case Generator::tuples: {
        auto shape = shape_of(p.vars);
        auto vars = distinct_vars(p.vars);
        for (const auto& t : tuple_table(p.pred, shape)) {
          if (!try_bind(c, vars, t, fresh)) continue;
          cb();
          unbind(c, fresh);
        }
        return;
      }
      case Generator::join: {
        auto it = join_.find(p.pred);
        if (it == join_.end()) return;
        const JoinFamily& fam = it->second;
        auto visit = [&](const std::vector<int>& pattern, int t) {
          if (!try_bind(c, pattern, fam.tuples[t], fresh)) return;
          cb();
          unbind(c, fresh);
        };
        if (auto front = front_perm(c, p)) {
          auto bucket = fam.by_front.find({c.bind[(*front)[0]], c.bind[(*front)[1]]});
          if (bucket == fam.by_front.end()) return;
          std::vector<int> ids = bucket->second;
          for (int t : ids) visit(*front, t);
        } else {
          for (int t = 0; t < static_cast<int>(fam.tuples.size()); ++t) visit(p.vars, t);
        }
        return;
      }
      case Generator::halves:
        generate_halves(c, p, cb);
        return;
      case Generator::guard:
        return;
    }
  }

  template <class F>
  void generate_halves(Ctx& c, const PremisePattern& p, F&& cb) {
    std::size_t k = p.vars.size() / 2;
    std::vector<int> h0(p.vars.begin(), p.vars.begin() + k), h1(p.vars.begin() + k, p.vars.end());
    auto unbound_count = [&](const std::vector<int>& h) {
      int u = 0;
      for (int v : distinct_vars(h))
        if (c.bind[v] < 0) ++u;
      return u;
    };
    const std::vector<int>& left = unbound_count(h0) <= unbound_count(h1) ? h0 : h1;
    const std::vector<int>& right = &left == &h0 ? h1 : h0;
    Quantity q = quantity_for(p.pred);
    auto left_shape = shape_of(left), right_shape = shape_of(right);
    auto left_vars = distinct_vars(left), right_vars = distinct_vars(right);

    auto current = [&](const std::vector<int>& vars) {
      std::vector<int> pts;
      for (int v : vars) pts.push_back(c.bind[v]);
      return pts;
    };
    auto on_left = [&](double vl) {
      double target = p.pred == Predicate::perp ? wrap_pi(vl + kPi / 2) : vl;
      if (unbound_count(right) == 0) {
        auto vr = half_value(q, right_shape, current(right_vars));
        if (!vr) return;
        double gap = periodic(q) ? periodic_gap(*vr, target) : std::abs(*vr - target);
        if (gap <= kLookupTol) cb();
        return;
      }
      const auto& table = half_table(q, right_shape);
      std::vector<int> fresh;
      auto scan = [&](double lo, double hi) {
        auto first = std::lower_bound(table.begin(), table.end(), lo,
                                      [](const HalfEntry& e, double v) { return e.value < v; });
        for (auto e = first; e != table.end() && e->value <= hi; ++e) {
          if (!try_bind(c, right_vars, e->pts, fresh)) continue;
          cb();
          unbind(c, fresh);
        }
      };
      scan(target - kLookupTol, target + kLookupTol);
      if (periodic(q)) {
        if (target - kLookupTol < 0) scan(target - kLookupTol + kPi, kPi);
        if (target + kLookupTol >= kPi) scan(0, target + kLookupTol - kPi);
      }
    };

    if (unbound_count(left) == 0) {
      if (auto vl = half_value(q, left_shape, current(left_vars))) on_left(*vl);
      return;
    }
    std::vector<int> fresh;
    for (const auto& e : half_table(q, left_shape)) {
      if (!try_bind(c, left_vars, e.pts, fresh)) continue;
      on_left(e.value);
      unbind(c, fresh);
    }
  }

  // ------------------------------------------------------------ search

  void search(Ctx& c) {
    if (pending_.size() >= kMaxPendingPerPass) return;
    const auto& prem = c.rule->premises;
    std::vector<int> guard_done;
    bool ok = true;
    for (std::size_t i = 0; i < prem.size(); ++i) {
      if (c.done[i] || prem[i].gen != Generator::guard || !bound(c, prem[i])) continue;
      Statement s = inst(c, prem[i]);
      if (!numeric(s)) {
        ok = false;
        break;
      }
      c.done[i] = 1;
      c.guards.push_back(canonicalize(s));
      guard_done.push_back(static_cast<int>(i));
    }
    if (ok) {
      int best = -1;
      double best_score = 0;
      bool pending_guard = false;
      for (std::size_t i = 0; i < prem.size(); ++i) {
        if (c.done[i]) continue;
        if (prem[i].gen == Generator::guard) {
          pending_guard = true;
          continue;
        }
        double s = estimate(c, prem[i]);
        if (best < 0 || s < best_score) {
          best = static_cast<int>(i);
          best_score = s;
        }
      }
      if (best < 0) {
        if (!pending_guard) emit(c);
      } else {
        c.done[best] = 1;
        const PremisePattern& p = prem[best];
        generate(c, p, [&] {
          Statement s = inst(c, p);
          if (trivial_statement(s) || !numeric(s)) return;
          auto j = holds(s);
          if (!j) return;
          c.ants.push_back({storage_form(s), *j});
          search(c);
          c.ants.pop_back();
        });
        c.done[best] = 0;
      }
    }
    for (int i : guard_done) {
      c.done[i] = 0;
      c.guards.pop_back();
    }
  }

  void emit(const Ctx& c) {
    Statement concl = inst(c, c.rule->conclusion);
    if (trivial_statement(concl) || !numeric(concl)) return;
    Statement key = is_triangle_relation(concl.pred) ? canonicalize(concl) : storage_form(concl);
    if (auto id = lookup(key)) {
      const Fact& f = st_.facts_[*id];
      if (f.premise || static_cast<int>(f.derivations.size()) >= limits_.max_derivations_per_fact) return;
    }
    std::vector<Statement> ant_keys;
    for (const auto& a : c.ants) ant_keys.push_back(a.stmt);
    std::sort(ant_keys.begin(), ant_keys.end());
    auto guards = c.guards;
    std::sort(guards.begin(), guards.end());
    if (!seen_.insert({c.rule->rule->id, key, ant_keys, guards}).second) return;
    Instance in{c.rule, {}, c.ants, guards, concl};
    for (std::size_t v = 0; v < c.rule->var_names.size(); ++v) in.binding[c.rule->var_names[v]] = names_[c.bind[v]];
    pending_.push_back(std::move(in));
  }

  // ------------------------------------------------------------ passes

  void dd_pass() {
    memo_.clear();
    pending_.clear();
    seen_.clear();
    for (const auto& cr : compiled_) {
      Ctx c{&cr,
            std::vector<int>(cr.var_names.size(), -1),
            std::vector<int>(n_, -1),
            std::vector<char>(cr.premises.size(), 0),
            {},
            {}};
      search(c);
    }
    std::map<Statement, FactId> lemmas;
    for (const auto& in : pending_) {
      if (full()) {
        st_.complete = false;
        st_.incomplete_reason = "max_facts";
        return;
      }
      Derivation d;
      d.kind = Derivation::Kind::rule;
      d.rule_id = in.rule->rule->id;
      d.binding = in.binding;
      d.guards = in.guards;
      for (const auto& a : in.ants) {
        if (a.just.fact >= 0) {
          d.antecedents.push_back(a.just.fact);
        } else if (auto known = lookup(a.stmt)) {
          d.antecedents.push_back(*known);
        } else {
          d.antecedents.push_back(derive_fact(a.stmt, algebraic_derivation(a.stmt, a.just.proof)));
        }
      }
      std::vector<Statement> targets;
      if (is_triangle_relation(in.conclusion.pred)) {
        targets.push_back(canonicalize(in.conclusion));
        for (auto& s : expand_triangle_relation(in.conclusion, &st_.scene())) targets.push_back(s);
      } else {
        targets.push_back(storage_form(in.conclusion));
      }
      for (const auto& t : targets) derive_fact(t, d);
    }
  }

  std::vector<Line> compute_lines() const {
    // Union-find over point pairs, merged by stored collinearities.
    std::vector<int> parent(n_ * n_);
    for (int i = 0; i < n_ * n_; ++i) parent[i] = i;
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    auto pid = [&](int a, int b) { return a < b ? a * n_ + b : b * n_ + a; };
    auto unite = [&](int x, int y) {
      x = root(x), y = root(y);
      if (x != y) parent[std::max(x, y)] = std::min(x, y);
    };
    std::vector<char> mentioned(n_ * n_, 0);
    for (const auto& f : st_.facts_) {
      for (const auto& [a, b] : mentioned_pairs(f.stmt)) mentioned[pid(point(a), point(b))] = 1;
      if (f.stmt.pred == Predicate::coll) {
        int a = point(f.stmt.args[0]), b = point(f.stmt.args[1]), c = point(f.stmt.args[2]);
        unite(pid(a, b), pid(a, c));
        unite(pid(a, b), pid(b, c));
      }
    }
    std::map<int, Line> by_root;
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b) {
        int id = pid(a, b);
        if (!mentioned[id]) continue;
        int r = root(id);
        auto [it, inserted] = by_root.emplace(r, Line{r / n_, r % n_, {}, theta(r / n_, r % n_)});
        (void)inserted;
      }
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b) {
        auto it = by_root.find(root(pid(a, b)));
        if (it == by_root.end()) continue;
        auto& pts = it->second.pts;
        for (int p : {a, b})
          if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
      }
    std::vector<Line> lines;
    for (auto& [_, l] : by_root) {
      std::sort(l.pts.begin(), l.pts.end());
      lines.push_back(l);
    }
    std::sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
      return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return lines;
  }

  // Groups sorted (value, item) entries whose consecutive values are within
  // tolerance.
  template <class T>
  static std::vector<std::vector<T>> group_by_value(std::vector<std::pair<double, T>> entries, double tol) {
    std::sort(entries.begin(), entries.end());
    std::vector<std::vector<T>> groups;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i == 0 || entries[i].first - entries[i - 1].first > tol) groups.emplace_back();
      groups.back().push_back(entries[i].second);
    }
    return groups;
  }

  void ar_pass() {
    auto lines = compute_lines();
    const int L = static_cast<int>(lines.size());
    auto name = [&](int p) { return names_[p]; };

    // Direction classes of lines; values close to pi wrap onto 0.
    std::vector<std::pair<double, int>> dirs;
    for (int i = 0; i < L; ++i) {
      double t = lines[i].theta;
      if (kPi - t <= kLookupTol) t -= kPi;
      dirs.emplace_back(t, i);
    }
    auto dir_groups = group_by_value(dirs, kLookupTol);
    std::vector<int> cls(L);
    for (std::size_t g = 0; g < dir_groups.size(); ++g)
      for (int i : dir_groups[g]) cls[i] = static_cast<int>(g);

    std::vector<Statement> candidates;
    auto line_args = [&](int i) { return std::vector<std::string>{name(lines[i].a), name(lines[i].b)}; };
    auto cat = [](std::vector<std::string> x, const std::vector<std::string>& y) {
      x.insert(x.end(), y.begin(), y.end());
      return x;
    };

    for (const auto& g : dir_groups)
      for (std::size_t u = 0; u < g.size(); ++u)
        for (std::size_t w = u + 1; w < g.size(); ++w)
          candidates.push_back({Predicate::para, cat(line_args(g[u]), line_args(g[w]))});

    for (int i = 0; i < L; ++i)
      for (int j = i + 1; j < L; ++j)
        if (periodic_gap(lines[i].theta, wrap_pi(lines[j].theta + kPi / 2)) <= kLookupTol)
          candidates.push_back({Predicate::perp, cat(line_args(i), line_args(j))});

    std::vector<std::pair<double, std::pair<int, int>>> angles;
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) {
        if (i == j || cls[i] == cls[j]) continue;
        double v = wrap_pi(lines[i].theta - lines[j].theta);
        if (std::abs(v - kPi / 2) <= 1e-6) continue;
        angles.emplace_back(v, std::make_pair(i, j));
      }
    for (const auto& g : group_by_value(angles, kLookupTol))
      for (std::size_t u = 0; u < g.size(); ++u)
        for (std::size_t w = u + 1; w < g.size(); ++w) {
          auto [i, j] = g[u];
          auto [k, m] = g[w];
          if (cls[i] == cls[k]) continue;
          candidates.push_back({Predicate::eqangle, cat(cat(line_args(i), line_args(j)), cat(line_args(k), line_args(m)))});
        }

    std::vector<std::pair<double, std::pair<int, int>>> segs;
    std::set<std::pair<int, int>> seg_seen;
    for (const auto& f : st_.facts_)
      for (const auto& [a, b] : mentioned_pairs(f.stmt)) {
        std::pair<int, int> s{point(a), point(b)};
        if (s.first > s.second) std::swap(s.first, s.second);
        if (seg_seen.insert(s).second) segs.emplace_back(loglen(s.first, s.second), s);
      }
    auto seg_args = [&](std::pair<int, int> s) { return std::vector<std::string>{name(s.first), name(s.second)}; };
    auto len_groups = group_by_value(segs, kLookupTol);
    for (const auto& g : len_groups)
      for (std::size_t u = 0; u < g.size(); ++u)
        for (std::size_t w = u + 1; w < g.size(); ++w)
          candidates.push_back({Predicate::cong, cat(seg_args(g[u]), seg_args(g[w]))});

    std::vector<std::pair<double, std::pair<int, int>>> ratios;
    for (int i = 0; i < static_cast<int>(len_groups.size()); ++i)
      for (int j = 0; j < static_cast<int>(len_groups.size()); ++j) {
        if (i == j) continue;
        auto si = len_groups[i].front(), sj = len_groups[j].front();
        ratios.emplace_back(loglen(si.first, si.second) - loglen(sj.first, sj.second), std::make_pair(i, j));
      }
    for (const auto& g : group_by_value(ratios, kLookupTol))
      for (std::size_t u = 0; u < g.size(); ++u)
        for (std::size_t w = u + 1; w < g.size(); ++w) {
          auto [i, j] = g[u];
          auto [k, m] = g[w];
          if (i == k) continue;
          candidates.push_back({Predicate::eqratio,
                                cat(cat(seg_args(len_groups[i].front()), seg_args(len_groups[j].front())),
                                    cat(seg_args(len_groups[k].front()), seg_args(len_groups[m].front())))});
        }

    std::vector<std::pair<Statement, AlgebraicProof>> found;
    std::set<Statement> considered;
    for (const auto& cand : candidates) {
      if (trivial_statement(cand)) continue;
      Statement key = storage_form(cand);
      if (lookup(key) || !considered.insert(key).second) continue;
      if (!numeric(key)) continue;
      auto p = st_.algebra_->derive(key);
      if (!p || p->cert.sources.empty()) continue;
      found.emplace_back(key, *p);
    }
    for (const auto& [key, proof] : found) {
      if (full()) {
        st_.complete = false;
        st_.incomplete_reason = "max_facts";
        return;
      }
      if (lookup(key)) continue;
      derive_fact(key, algebraic_derivation(key, proof));
    }
  }

  ProofState& st_;
  EngineLimits limits_;
  int round_ = 0;

  std::vector<std::string> names_;
  std::map<std::string, int> idx_;
  int n_ = 0;
  std::vector<Coord> coords_;
  std::vector<double> theta_, loglen_;

  std::vector<CompiledRule> compiled_;
  std::vector<int> cost_;
  std::map<std::pair<Predicate, std::vector<int>>, std::vector<std::vector<int>>> tuples_;
  std::map<std::pair<int, std::vector<int>>, std::vector<HalfEntry>> halves_;
  std::map<Predicate, JoinFamily> join_;

  std::map<Statement, std::optional<Justification>> memo_;
  std::vector<Instance> pending_;
  std::set<std::tuple<std::string, Statement, std::vector<Statement>, std::vector<Statement>>> seen_;
};

ProofState saturate(const std::vector<Statement>& premises, const std::vector<KnowledgeRule>& rules,
                    const NumericScene& scene, const EngineLimits& limits) {
  ProofState st;
  Saturator sat(st, scene, rules, limits);
  sat.run(premises);
  return st;
}

}  // namespace geomgen
