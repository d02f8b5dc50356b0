#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geomgen/exdef.hpp"
#include "geomgen/repository.hpp"
#include "geomgen/statement.hpp"

namespace geomgen {

using Coord = Eigen::Vector2d;

inline constexpr double kEqualityTolerance = 1e-9;
inline constexpr double kGuardMargin = 1e-6;

/// Random coordinate model of an exDefinition set.
class NumericScene {
 public:
  NumericScene() = default;

  void add(const std::string& name, const Coord& c);
  bool has(const std::string& name) const { return positions_.count(name) != 0; }
  /// Throws Error for a missing point.
  const Coord& at(const std::string& name) const;

  const std::vector<std::string>& order() const { return order_; }
  const std::map<std::string, Coord>& positions() const { return positions_; }

  std::uint64_t seed = 0;
  double tolerance = kEqualityTolerance;
  double margin = kGuardMargin;

 private:
  std::vector<std::string> order_;
  std::map<std::string, Coord> positions_;
};

/// Predicate truth on coordinates given in argument order. Equalities use
/// the relative tolerance `tol`; guards (ncoll, npara, sameside) require
/// `margin`.
bool evaluate(Predicate p, std::span<const Coord> pts, double tol = kEqualityTolerance,
              double margin = kGuardMargin);

bool check_numeric(const Statement& s, const NumericScene& scene);
bool check_numeric(const Statement& s, const NumericScene& scene, double tol);

/// Orientation of a triangle: +1 counter-clockwise, -1 clockwise, 0 degenerate.
int orientation(const Coord& a, const Coord& b, const Coord& c, double margin = kGuardMargin);

/// Direction of line ab in [0, pi).
double direction(const Coord& a, const Coord& b);

/// Builds the coordinates of `exd` entry by entry. Deterministic in
/// (exd, seed). Throws UnsatisfiableScene when every attempt failed on an
/// intersection without real solution, DegenerateScene otherwise.
NumericScene construct_scene(const ExDefinitionSet& exd, const Repository& repo, std::uint64_t seed,
                             int max_attempts = 64);

/// splitmix64 step; used wherever a derived seed is needed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Small deterministic generator with a library-independent uniform draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform(double lo = 0.0, double hi = 1.0);
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t state_;
};

}  // namespace geomgen
