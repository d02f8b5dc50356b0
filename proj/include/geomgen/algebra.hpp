#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geomgen/statement.hpp"

namespace geomgen {

using Rational = boost::rational<std::int64_t>;
using FactId = int;

/// Linear equation sum(coeff_i * x_i) = constant.
struct LinearEquation {
  std::map<int, Rational> coeffs;
  Rational constant{0};

  void add(int var, Rational c);
  bool is_zero() const { return coeffs.empty(); }
};

struct Certificate {
  std::vector<FactId> sources;  // sorted, unique
  /// False when the combination needed a non-integer multiplier; a
  /// half-turn constant is then only determined up to the modulus and the
  /// caller has to confirm the candidate numerically.
  bool exact = true;
};

/// Incremental reduced row-echelon store over the rationals. Each row keeps
/// the set of source facts whose equations were combined into it.
class LinearSystem {
 public:
  enum class Modulus { none, half_turn };

  explicit LinearSystem(Modulus m) : modulus_(m) {}

  /// Returns true when the equation increased the rank.
  bool insert(const LinearEquation& eq, FactId source);
  std::optional<Certificate> query(const LinearEquation& eq) const;
  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  struct Row {
    LinearEquation eq;
    std::vector<FactId> sources;
    bool exact = true;
  };

  Row reduce(Row r) const;
  static void axpy(Row& target, const Row& row, Rational factor);

  Modulus modulus_;
  std::map<int, Row> rows_;  // pivot variable -> row
};

/// Unordered point pair -> variable index.
class PairIndex {
 public:
  int var(const std::string& a, const std::string& b);
  std::optional<int> find(const std::string& a, const std::string& b) const;

 private:
  std::map<std::pair<std::string, std::string>, int> ids_;
};

/// Line directions in half-turn units: para d1-d2=0, perp d1-d2=1/2,
/// eqangle d1-d2-d3+d4=0, coll/midp equate the directions of their pairs.
class AngleSystem {
 public:
  AngleSystem() : sys_(LinearSystem::Modulus::half_turn) {}
  /// Inserts the equations a fact contributes; returns false if it has none.
  bool add(const Statement& s, FactId source);
  std::optional<Certificate> query(const Statement& s) const;
  int rank() const { return sys_.rank(); }

  static bool accepts(Predicate p);

 private:
  std::vector<LinearEquation> equations(const Statement& s, bool create);
  std::optional<LinearEquation> query_equation(const Statement& s) const;

  LinearSystem sys_;
  PairIndex vars_;
};

/// Log-lengths: cong l1=l2, eqratio l1-l2-l3+l4=0, midp halves (constant in
/// units of log 2), circle radii.
class RatioSystem {
 public:
  RatioSystem() : sys_(LinearSystem::Modulus::none) {}
  bool add(const Statement& s, FactId source);
  std::optional<Certificate> query(const Statement& s) const;
  int rank() const { return sys_.rank(); }

  static bool accepts(Predicate p);

 private:
  std::vector<LinearEquation> equations(const Statement& s, bool create);
  std::optional<LinearEquation> query_equation(const Statement& s) const;

  LinearSystem sys_;
  PairIndex vars_;
};

/// Union-find over segments for congruence transitivity; explanations are
/// shortest paths in the graph of recorded equalities.
class CongClosure {
 public:
  bool add(const Statement& s, FactId source);
  std::optional<Certificate> query(const Statement& s) const;
  bool same(const std::string& a, const std::string& b, const std::string& c, const std::string& d) const;

  static bool accepts(Predicate p);

 private:
  struct Edge {
    int to;
    FactId source;
  };
  int seg(const std::string& a, const std::string& b);
  std::optional<int> find_seg(const std::string& a, const std::string& b) const;
  int root(int x) const;
  void unite(int x, int y, FactId source);

  PairIndex segs_;
  mutable std::vector<int> parent_;
  std::vector<std::vector<Edge>> adj_;
};

struct AlgebraicProof {
  Certificate cert;
  std::string subsystem;  // "angle" | "ratio" | "cong"
};

/// The three subsystems fed from one fact stream.
struct AlgebraState {
  AngleSystem angle;
  RatioSystem ratio;
  CongClosure cong;

  void add(const Statement& s, FactId source);
  /// para/perp/eqangle(6) from angles, cong from the closure or ratios,
  /// eqratio(6) from ratios, circle as two radii congruences, midp as a
  /// collinearity plus congruence. Other predicates are never derived here.
  std::optional<AlgebraicProof> derive(const Statement& s) const;
};

}  // namespace geomgen
