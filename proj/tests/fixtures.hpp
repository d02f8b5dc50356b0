#pragma once

#include <cmath>
#include <map>
#include <string>

#include "geomgen/engine.hpp"
#include "geomgen/exdef.hpp"
#include "geomgen/repository.hpp"

namespace fixtures {

using geomgen::Coord;
using Points = std::map<std::string, Coord>;

inline Coord rot(const Coord& v, double t) {
  return {std::cos(t) * v.x() - std::sin(t) * v.y(), std::sin(t) * v.x() + std::cos(t) * v.y()};
}
inline Coord on_circle(double t, const Coord& o = {0, 0}, double r = 1.0) {
  return o + r * Coord(std::cos(t), std::sin(t));
}
inline Coord mirror(const Coord& v) { return {v.x(), -v.y()}; }

inline Points triangle_pair(bool mirrored, double scale) {
  Coord a(0.1, 0.2), b(1.3, -0.1), c(0.6, 1.1), off(3.0, 0.5);
  auto map = [&](const Coord& v) -> Coord { return off + scale * rot(mirrored ? mirror(v) : v, 0.7); };
  return {{"a", a}, {"b", b}, {"c", c}, {"p", map(a)}, {"q", map(b)}, {"r", map(c)}};
}

inline Points homothety() {
  Coord o(0.2, -0.3), a(1.1, 0.4), b(0.4, 1.3);
  return {{"o", o}, {"a", a}, {"b", b}, {"c", o + 2.5 * (a - o)}, {"d", o + 2.5 * (b - o)}};
}

inline Points tangent() {
  Coord o(0, 0), a = on_circle(0.3), b = on_circle(2.1), c = on_circle(4.0);
  return {{"o", o}, {"a", a}, {"b", b}, {"c", c}, {"x", a + 0.8 * rot(a - o, M_PI / 2)}};
}

inline Points transversals() {
  Coord a(0, 0), b(2.2, 0.1), d(0.4, 1.6), c = d + 0.6 * (b - a);
  double t = 0.35;
  return {{"a", a}, {"b", b}, {"c", c}, {"d", d}, {"m", a + t * (d - a)}, {"n", b + t * (c - b)}};
}

inline Points circumcircle_midpoint() {
  Coord b = on_circle(0.4), c = on_circle(2.5);
  return {{"o", {0, 0}}, {"a", on_circle(4.4)}, {"b", b}, {"c", c}, {"m", (b + c) / 2}};
}

/// Coordinates satisfying exactly the premises of each catalog rule, with the
/// rule's pattern variables as point names.
inline Points rule_fixture(const std::string& id) {
  if (id == "K_1") return triangle_pair(true, 1.0);
  if (id == "K_2" || id == "K_5" || id == "K_10") return triangle_pair(false, 1.7);
  if (id == "K_3" || id == "K_4" || id == "K_9" || id == "K_11") return triangle_pair(false, 1.0);
  if (id == "K_6") return triangle_pair(true, 1.7);
  if (id == "K_7" || id == "K_8") return {{"o", {0.3, 1.4}}, {"a", {-0.5, 0}}, {"b", {1.1, 0}}};
  if (id == "K_12") {
    Points p{{"a", {0, 0}}, {"b", {1.0, 0.3}}, {"c", {0.2, 1.0}}, {"d", {0.9, 1.9}}, {"e", {-1.0, 0.5}}, {"f", {-0.4, -0.8}}};
    const char* img[][2] = {{"a", "m"}, {"b", "n"}, {"c", "p"}, {"d", "q"}, {"e", "r"}, {"f", "u"}};
    for (auto& [src, dst] : img) p[dst] = Coord(4, 1) + rot(p[src], 0.9);
    return p;
  }
  if (id == "K_13") {
    Coord a(0, 0), b(1.0, 0.4), p(0.3, 1.5), q(1.7, 1.1);
    Coord off(3, -1);
    return {{"a", a}, {"b", b}, {"p", p}, {"q", q}, {"c", off + rot(a, M_PI / 2)}, {"d", off + rot(b, M_PI / 2)},
            {"u", off + rot(p, M_PI / 2)}, {"v", off + rot(q, M_PI / 2)}};
  }
  if (id == "K_14" || id == "K_19") return tangent();
  if (id == "K_15") {
    Coord a = on_circle(1.1);
    return {{"a", a}, {"b", mirror(a)}, {"p", {1, 0}}, {"q", {-1, 0}}};
  }
  if (id == "K_16") {
    Coord a = on_circle(0.2), b = on_circle(1.1);
    return {{"a", a}, {"b", b}, {"c", on_circle(2.4)}, {"p", rot(a, 3.0)}, {"q", rot(b, 3.0)}, {"r", on_circle(5.6)}};
  }
  if (id == "K_17") {
    Coord a(0, 0), b(1.0, 0.4), e(0.2, 2.0), f(1.4, 1.1);
    return {{"a", a}, {"b", b}, {"c", Coord(2, 0) + rot(b, M_PI / 2)}, {"d", Coord(2, 0) + rot(a, M_PI / 2)},
            {"e", e}, {"f", f}, {"g", Coord(-2, 1) + rot(e, M_PI / 2)}, {"h", Coord(-2, 1) + rot(f, M_PI / 2)}};
  }
  if (id == "K_18") return {{"a", {-1, 0.2}}, {"b", {1, -0.2}}, {"p", {0.2, 1.0}}, {"q", {-0.3, -1.5}}};
  if (id == "K_20" || id == "K_21")
    return {{"a", on_circle(0.3)}, {"b", on_circle(1.9)}, {"p", on_circle(3.1)}, {"q", on_circle(4.6)}};
  if (id == "K_22" || id == "K_24") return homothety();
  if (id == "K_23") return {{"a", {0, 0}}, {"b", {1, 0.5}}, {"c", {2.6, 1.3}}};
  if (id == "K_25") return {{"a", {0.2, 1.5}}, {"b", {-0.8, 0}}, {"c", {1.3, 0.1}}, {"m", {-0.3, 0.75}}, {"n", {0.75, 0.8}}};
  if (id == "K_26") {
    Points p{{"a", {0, 0}}, {"b", {1.0, 0.3}}, {"c", {0.2, 1.0}}, {"d", {1.3, 1.9}}, {"e", {-1.0, 0.5}}, {"f", {-0.4, -0.8}}};
    const char* img[][2] = {{"a", "m"}, {"b", "n"}, {"c", "p"}, {"d", "q"}, {"e", "r"}, {"f", "u"}};
    for (auto& [src, dst] : img) p[dst] = Coord(4, 1) + 1.6 * rot(p[src], 0.9);
    return p;
  }
  if (id == "K_27") return {{"a", {0, 0}}, {"b", {1, 0.4}}, {"c", {0.3, 1.2}}, {"d", {2.3, 2.0}}, {"p", {-1, 0.5}}, {"q", {0.4, -1.3}}};
  if (id == "K_28") {
    return {{"a", on_circle(0.4)}, {"b", on_circle(M_PI - 0.4)}, {"c", on_circle(M_PI + 0.9)}, {"d", on_circle(-0.9)}};
  }
  if (id == "K_29" || id == "K_30") {
    Coord a(0.3, 1.6), b(-1.0, 0), c(1.5, 0.1);
    double ab = (b - a).norm(), ac = (c - a).norm();
    return {{"a", a}, {"b", b}, {"c", c}, {"d", (b * ac + c * ab) / (ab + ac)}};
  }
  if (id == "K_31") return {{"o", {0, 0}}, {"a", on_circle(0.5)}, {"b", on_circle(2.0)}, {"c", on_circle(0.5 + M_PI)}};
  if (id == "K_32") {
    Coord a(0, 1.2), b(0, 0), c(1.7, 0);
    return {{"a", a}, {"b", b}, {"c", c}, {"m", (a + c) / 2}};
  }
  if (id == "K_33")
    return {{"a", {0, 0}}, {"b", {1, 0}}, {"c", {0.3, 1.0}}, {"d", {0.3, 2.0}}, {"m", {2, 2}}, {"n", {2.6, 2.8}}, {"p", {3, 0}}, {"q", {4, 0}}};
  if (id == "K_34" || id == "K_38") return transversals();
  if (id == "K_35") return {{"a", {0, 0}}, {"b", {1.4, 0.2}}, {"c", {0.3, 1.5}}, {"d", {2.1, 2.3}}, {"m", {0.7, 0.1}}, {"n", {1.2, 1.9}}};
  if (id == "K_36") return {{"a", {-1, 0}}, {"b", {1, 0}}, {"m", {0, 0}}, {"o", {0, 1.3}}};
  if (id == "K_37") return {{"a", {0, 0}}, {"b", {1.2, 0.5}}, {"c", {0.5, 1.5}}, {"d", {1.0, 0.3}}, {"e", {-0.4, 1.4}}, {"f", {0.8, 1.9}}};
  if (id == "K_39") return {{"o", {0, 0}}, {"a", on_circle(0.3)}, {"b", on_circle(1.7)}, {"c", on_circle(3.3)}, {"d", on_circle(5.0)}};
  if (id == "K_40" || id == "K_41") return circumcircle_midpoint();
  if (id == "K_42" || id == "K_43") {
    Coord m(0.4, 0.3), u(1.1, 0.2), v(0.3, 0.9);
    return {{"m", m}, {"a", m + u}, {"b", m - u}, {"c", m + v}, {"d", m - v}};
  }
  return {};
}

struct RuleRun {
  bool derived = false;
  int rounds = 0;
};

/// Saturates the rule's symbolic premises over its fixture scene for one
/// round and reports whether the rule itself produced the conclusion.
inline RuleRun run_rule_fixture(const geomgen::KnowledgeRule& rule) {
  using namespace geomgen;
  NumericScene scene;
  for (const auto& [name, c] : rule_fixture(rule.id)) scene.add(name, c);
  std::vector<Statement> premises;
  for (const auto& p : rule.premises)
    if (!is_numeric_guard(p.pred)) premises.push_back(p);
  std::vector<KnowledgeRule> only{rule};
  EngineLimits limits;
  limits.max_rounds = 1;
  auto state = saturate(premises, only, scene, limits);
  std::vector<Statement> targets{storage_form(rule.conclusion)};
  for (const auto& s : expand_triangle_relation(rule.conclusion, &scene)) targets.push_back(s);
  RuleRun run;
  run.rounds = state.rounds;
  for (const auto& t : targets) {
    auto id = state.find(t);
    if (!id) continue;
    for (const auto& d : state.fact(*id).derivations)
      if (d.kind == Derivation::Kind::rule && d.rule_id == rule.id) run.derived = true;
  }
  return run;
}

}  // namespace fixtures
