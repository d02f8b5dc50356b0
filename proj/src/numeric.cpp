#include "geomgen/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "geomgen/errors.hpp"

namespace geomgen {

namespace {

double cross(const Coord& u, const Coord& v) { return u.x() * v.y() - u.y() * v.x(); }
Coord rot90(const Coord& v) { return {-v.y(), v.x()}; }

double max_spread(std::span<const Coord> pts) {
  double m = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::max(m, (pts[i] - pts[j]).norm());
  return m;
}

bool relative_equal(double x, double y, double tol) {
  double s = std::max(std::abs(x), std::abs(y));
  return s > 0 && std::abs(x - y) <= tol * s;
}

bool parallel_dirs(const Coord& u, const Coord& v, double tol) {
  double nu = u.norm(), nv = v.norm();
  if (nu == 0 || nv == 0) return false;
  return std::abs(cross(u, v)) / (nu * nv) <= tol;
}

bool perp_dirs(const Coord& u, const Coord& v, double tol) {
  double nu = u.norm(), nv = v.norm();
  if (nu == 0 || nv == 0) return false;
  return std::abs(u.dot(v)) / (nu * nv) <= tol;
}

bool nonzero(const Coord& u) { return u.norm() > 0; }

// Signed angle from u to v, in (-pi, pi].
double turn(const Coord& u, const Coord& v) { return std::atan2(cross(u, v), u.dot(v)); }

bool triangle_similar(std::span<const Coord> p, double tol, double margin, int orient_rule, bool congruent) {
  const Coord &a = p[0], &b = p[1], &c = p[2], &x = p[3], &y = p[4], &z = p[5];
  int o1 = orientation(a, b, c, margin), o2 = orientation(x, y, z, margin);
  if (o1 == 0 || o2 == 0) return false;
  if (orient_rule > 0 && o1 != o2) return false;
  if (orient_rule < 0 && o1 == o2) return false;
  double r1 = (a - b).norm() / (x - y).norm();
  double r2 = (b - c).norm() / (y - z).norm();
  double r3 = (c - a).norm() / (z - x).norm();
  if (std::abs(std::log(r1) - std::log(r2)) > tol || std::abs(std::log(r1) - std::log(r3)) > tol) return false;
  return !congruent || std::abs(std::log(r1)) <= tol;
}

std::optional<Coord> circumcenter_of(const Coord& a, const Coord& b, const Coord& c) {
  double d = 2 * cross(b - a, c - a);
  double scale = max_spread(std::array<Coord, 3>{a, b, c});
  if (scale == 0 || std::abs(d) <= 1e-12 * scale * scale) return std::nullopt;
  Coord ab = b - a, ac = c - a;
  Coord off{(ac.y() * ab.squaredNorm() - ab.y() * ac.squaredNorm()) / d,
            (ab.x() * ac.squaredNorm() - ac.x() * ab.squaredNorm()) / d};
  return a + off;
}

}  // namespace

void NumericScene::add(const std::string& name, const Coord& c) {
  if (!positions_.count(name)) order_.push_back(name);
  positions_[name] = c;
}

const Coord& NumericScene::at(const std::string& name) const {
  auto it = positions_.find(name);
  if (it == positions_.end()) throw Error("point '" + name + "' missing from scene");
  return it->second;
}

int orientation(const Coord& a, const Coord& b, const Coord& c, double margin) {
  double s = max_spread(std::array<Coord, 3>{a, b, c});
  if (s == 0) return 0;
  double area = cross(b - a, c - a) / 2;
  if (std::abs(area) / (s * s) <= margin) return 0;
  return area > 0 ? 1 : -1;
}

double direction(const Coord& a, const Coord& b) {
  double t = std::atan2(b.y() - a.y(), b.x() - a.x());
  if (t < 0) t += std::numbers::pi;
  if (t >= std::numbers::pi) t -= std::numbers::pi;
  return t;
}

bool evaluate(Predicate p, std::span<const Coord> x, double tol, double margin) {
  switch (p) {
    case Predicate::coll: {
      double s = max_spread(x);
      if (s == 0) return false;
      return std::abs(cross(x[1] - x[0], x[2] - x[0])) / (s * s) <= tol;
    }
    case Predicate::ncoll:
      return orientation(x[0], x[1], x[2], margin) != 0;
    case Predicate::para:
      return parallel_dirs(x[1] - x[0], x[3] - x[2], tol);
    case Predicate::npara: {
      Coord u = x[1] - x[0], v = x[3] - x[2];
      if (!nonzero(u) || !nonzero(v)) return false;
      return std::abs(cross(u, v)) / (u.norm() * v.norm()) > margin;
    }
    case Predicate::perp:
      return perp_dirs(x[1] - x[0], x[3] - x[2], tol);
    case Predicate::cong:
      return relative_equal((x[1] - x[0]).norm(), (x[3] - x[2]).norm(), tol);
    case Predicate::midp: {
      double ab = (x[2] - x[1]).norm();
      if (ab == 0) return false;
      return (x[0] - (x[1] + x[2]) / 2).norm() / ab <= tol;
    }
    case Predicate::circle: {
      double r = (x[1] - x[0]).norm();
      if (r == 0 || (x[1] - x[2]).norm() == 0 || (x[1] - x[3]).norm() == 0 || (x[2] - x[3]).norm() == 0)
        return false;
      return relative_equal(r, (x[2] - x[0]).norm(), tol) && relative_equal(r, (x[3] - x[0]).norm(), tol);
    }
    case Predicate::cyclic: {
      auto o = circumcenter_of(x[0], x[1], x[2]);
      if (!o) return false;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          if ((x[i] - x[j]).norm() == 0) return false;
      return relative_equal((x[3] - *o).norm(), (x[0] - *o).norm(), tol);
    }
    case Predicate::eqangle:
    case Predicate::eqangle6: {
      Coord l1 = x[1] - x[0], l2 = x[3] - x[2], l3 = x[5] - x[4], l4 = x[7] - x[6];
      if (!nonzero(l1) || !nonzero(l2) || !nonzero(l3) || !nonzero(l4)) return false;
      double d = turn(l1, l2) - turn(l3, l4);
      return std::abs(std::sin(d)) <= tol;
    }
    case Predicate::eqratio:
    case Predicate::eqratio6: {
      double n[4];
      for (int i = 0; i < 4; ++i) {
        n[i] = (x[2 * i + 1] - x[2 * i]).norm();
        if (n[i] == 0) return false;
      }
      return std::abs(std::log(n[0]) - std::log(n[1]) - std::log(n[2]) + std::log(n[3])) <= tol;
    }
    case Predicate::simtri:
      return triangle_similar(x, tol, margin, +1, false);
    case Predicate::simtri2:
      return triangle_similar(x, tol, margin, -1, false);
    case Predicate::simtriStar:
      return triangle_similar(x, tol, margin, 0, false);
    case Predicate::contri:
      return triangle_similar(x, tol, margin, +1, true);
    case Predicate::contri2:
      return triangle_similar(x, tol, margin, -1, true);
    case Predicate::contriStar:
      return triangle_similar(x, tol, margin, 0, true);
    case Predicate::sameside: {
      auto side = [&](const Coord& a, const Coord& b, const Coord& c) {
        Coord u = b - a, v = c - a;
        if (!nonzero(u) || !nonzero(v)) return 0;
        double cosv = u.dot(v) / (u.norm() * v.norm());
        if (std::abs(cosv) <= margin) return 0;
        return cosv > 0 ? 1 : -1;
      };
      int s1 = side(x[0], x[1], x[2]), s2 = side(x[3], x[4], x[5]);
      return s1 != 0 && s1 == s2;
    }
  }
  return false;
}

bool check_numeric(const Statement& s, const NumericScene& scene) { return check_numeric(s, scene, scene.tolerance); }

bool check_numeric(const Statement& s, const NumericScene& scene, double tol) {
  std::vector<Coord> pts;
  pts.reserve(s.args.size());
  for (const auto& a : s.args) pts.push_back(scene.at(a));
  return evaluate(s.pred, pts, tol, scene.margin);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

namespace {

struct Line {
  Coord p;
  Coord d;  // reference length carried in |d|
  double t_lo, t_hi;
};

struct Circle {
  Coord c;
  double r;
};

struct Unsolvable {};

class Builder {
 public:
  Builder(NumericScene& scene, Rng& rng) : scene_(scene), rng_(rng) {}

  Coord build(const RecipeStep& step) {
    auto pt = [&](std::size_t i) { return scene_.at(std::get<std::string>(step.args[i])); };
    auto line = [&](std::size_t i) { return line_of(std::get<LineSpec>(step.args[i])); };
    auto circ = [&](std::size_t i) { return circle_of(std::get<CircleSpec>(step.args[i])); };
    auto branch = [&](std::size_t i) {
      return step.args.size() > i ? std::get<int>(step.args[i]) : 0;
    };
    switch (step.kind) {
      case RecipeKind::free:
        return {rng_.uniform(), rng_.uniform()};
      case RecipeKind::on_line: {
        Line l = line(0);
        return l.p + rng_.uniform(l.t_lo, l.t_hi) * l.d;
      }
      case RecipeKind::on_circle: {
        Circle c = circ(0);
        double t = rng_.uniform(0, 2 * std::numbers::pi);
        return c.c + c.r * Coord{std::cos(t), std::sin(t)};
      }
      case RecipeKind::midpoint:
        return (pt(0) + pt(1)) / 2;
      case RecipeKind::reflection:
        return 2 * pt(1) - pt(0);
      case RecipeKind::intersection_line_line:
        return intersect(line(0), line(1));
      case RecipeKind::intersection_line_circle:
        return choose(intersect(line(0), circ(1)), branch(2));
      case RecipeKind::intersection_circle_circle:
        return choose(intersect(circ(0), circ(1)), branch(2));
      case RecipeKind::foot_of_perpendicular: {
        Coord a = pt(1), u = pt(2) - a;
        if (u.squaredNorm() == 0) throw Unsolvable{};
        return a + u * ((pt(0) - a).dot(u) / u.squaredNorm());
      }
      case RecipeKind::circumcenter: {
        auto o = circumcenter_of(pt(0), pt(1), pt(2));
        if (!o) throw Unsolvable{};
        return *o;
      }
      case RecipeKind::equidistant_point: {
        Coord a = pt(0), b = pt(1);
        return (a + b) / 2 + rng_.uniform(-1.0, 1.0) * rot90(b - a);
      }
    }
    throw Unsolvable{};
  }

 private:
  Line line_of(const LineSpec& s) {
    auto P = [&](int i) { return scene_.at(s.points[i]); };
    switch (s.kind) {
      case LineSpec::Kind::through:
        return {P(0), P(1) - P(0), -0.5, 1.5};
      case LineSpec::Kind::perpendicular:
        return {P(0), rot90(P(2) - P(1)), -1.0, 1.0};
      case LineSpec::Kind::parallel:
        return {P(0), P(2) - P(1), -1.0, 1.0};
      case LineSpec::Kind::perp_bisector:
        return {(P(0) + P(1)) / 2, rot90(P(1) - P(0)), -1.0, 1.0};
      case LineSpec::Kind::angle_bisector: {
        Coord u = P(0) - P(1), v = P(2) - P(1);
        if (u.norm() == 0 || v.norm() == 0) throw Unsolvable{};
        Coord d = u.normalized() + v.normalized();
        if (d.norm() < 1e-9) d = rot90(u.normalized());
        return {P(1), d.normalized() * std::max(u.norm(), v.norm()), -1.0, 1.0};
      }
    }
    throw Unsolvable{};
  }

  Circle circle_of(const CircleSpec& s) {
    auto P = [&](int i) { return scene_.at(s.points[i]); };
    switch (s.kind) {
      case CircleSpec::Kind::center_through:
        return {P(0), (P(1) - P(0)).norm()};
      case CircleSpec::Kind::diameter:
        return {(P(0) + P(1)) / 2, (P(1) - P(0)).norm() / 2};
      case CircleSpec::Kind::circumscribed: {
        auto o = circumcenter_of(P(0), P(1), P(2));
        if (!o) throw Unsolvable{};
        return {*o, (P(0) - *o).norm()};
      }
    }
    throw Unsolvable{};
  }

  static Coord intersect(const Line& a, const Line& b) {
    double den = cross(a.d, b.d);
    if (std::abs(den) <= 1e-12 * a.d.norm() * b.d.norm()) throw Unsolvable{};
    double t = cross(b.p - a.p, b.d) / den;
    return a.p + t * a.d;
  }

  static std::vector<Coord> intersect(const Line& l, const Circle& c) {
    Coord d = l.d.normalized();
    Coord f = l.p - c.c;
    double b = f.dot(d), q = f.squaredNorm() - c.r * c.r;
    double disc = b * b - q;
    if (disc < 0) throw Unsolvable{};
    double s = std::sqrt(disc);
    return {l.p + (-b - s) * d, l.p + (-b + s) * d};
  }

  static std::vector<Coord> intersect(const Circle& a, const Circle& b) {
    Coord dv = b.c - a.c;
    double d = dv.norm();
    if (d == 0 || d > a.r + b.r || d < std::abs(a.r - b.r)) throw Unsolvable{};
    double x = (d * d + a.r * a.r - b.r * b.r) / (2 * d);
    double h2 = a.r * a.r - x * x;
    double h = h2 > 0 ? std::sqrt(h2) : 0.0;
    Coord m = a.c + dv * (x / d), off = rot90(dv / d) * h;
    return {m + off, m - off};
  }

  // Drops candidates sitting on an existing point; remaining branches are
  // ordered lexicographically by (x, y).
  Coord choose(std::vector<Coord> cands, int branch) {
    double scale = 1.0;
    std::vector<Coord> keep;
    for (const auto& c : cands) {
      bool clash = false;
      for (const auto& [_, p] : scene_.positions())
        if ((p - c).norm() <= 1e-6 * scale) clash = true;
      if (!clash) keep.push_back(c);
    }
    if (keep.empty()) throw Unsolvable{};
    std::sort(keep.begin(), keep.end(), [](const Coord& a, const Coord& b) {
      return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    return keep[std::min<std::size_t>(branch > 0 ? 1 : 0, keep.size() - 1)];
  }

  NumericScene& scene_;
  Rng& rng_;
};

}  // namespace

NumericScene construct_scene(const ExDefinitionSet& exd, const Repository& repo, std::uint64_t seed,
                             int max_attempts) {
  std::vector<BoundInstance> bound;
  for (const auto& inst : exd.entries) bound.emplace_back(repo, inst);

  int unsolvable = 0;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    NumericScene scene;
    scene.seed = seed;
    Builder builder(scene, rng);
    bool ok = true;
    try {
      for (const auto& b : bound)
        for (const auto& step : b.recipe()) {
          Coord c = builder.build(step);
          if (!std::isfinite(c.x()) || !std::isfinite(c.y())) throw Unsolvable{};
          scene.add(step.target, c);
        }
    } catch (const Unsolvable&) {
      ++unsolvable;
      continue;
    }

    std::vector<Coord> all;
    for (const auto& [_, c] : scene.positions()) all.push_back(c);
    double scale = max_spread(all);
    if (scale > 1e3) ok = false;
    for (std::size_t i = 0; ok && i < all.size(); ++i)
      for (std::size_t j = i + 1; ok && j < all.size(); ++j)
        if ((all[i] - all[j]).norm() <= 1e-3 * std::max(scale, 1e-12)) ok = false;
    for (const auto& b : bound) {
      if (!ok) break;
      for (const auto& s : b.emitted())
        if (!check_numeric(s, scene)) {
          ok = false;
          break;
        }
      for (const auto& g : b.guards())
        if (ok && !check_numeric(g, scene)) ok = false;
    }
    if (ok) return scene;
  }
  if (unsolvable == max_attempts)
    throw UnsatisfiableScene("no real solution for an intersection in " + std::to_string(max_attempts) + " attempts");
  throw DegenerateScene("no non-degenerate scene in " + std::to_string(max_attempts) + " attempts");
}

}  // namespace geomgen
