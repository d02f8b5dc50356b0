#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geomgen {

/// Closed predicate vocabulary of the formal language.
enum class Predicate : std::uint8_t {
  coll,
  ncoll,
  para,
  npara,
  perp,
  cong,
  midp,
  circle,
  cyclic,
  eqangle,
  eqratio,
  eqangle6,
  eqratio6,
  simtri,
  simtri2,
  simtriStar,
  contri,
  contriStar,
  contri2,
  sameside,
};

inline constexpr int kPredicateCount = 20;

std::string_view predicate_name(Predicate p);
std::optional<Predicate> predicate_from_name(std::string_view name);
int predicate_arity(Predicate p);
std::span<const Predicate> all_predicates();

/// Predicates evaluated against the coordinate model only; never derived.
bool is_numeric_guard(Predicate p);

/// para/perp/cong/eqangle(6)/eqratio(6): the equalities the algebraic
/// subsystems can decide.
bool is_algebraic(Predicate p);

bool is_triangle_relation(Predicate p);  // simtri / contri families

/// Normalizes a point token: lowercases and validates `[a-z][0-9]*`.
/// Returns nullopt for an invalid token.
std::optional<std::string> normalize_point(std::string_view token);

struct Statement {
  Predicate pred{Predicate::coll};
  std::vector<std::string> args;

  auto operator<=>(const Statement&) const = default;
  bool operator==(const Statement&) const = default;
};

/// Parses `pred a b c ...`. Throws ParseError on unknown predicate, bad
/// point token or arity mismatch.
Statement parse_statement(std::string_view text);

std::string format_statement(const Statement& s);

/// Lexicographically minimal member of the predicate's symmetry orbit.
Statement canonicalize(const Statement& s);

/// Every member of the symmetry orbit (including `s` itself), deduplicated.
std::vector<Statement> symmetry_orbit(const Statement& s);

/// Argument permutations forming the predicate's symmetry group.
/// Element `perm` maps a statement to `args'[i] = args[perm[i]]`.
const std::vector<std::vector<int>>& symmetry_group(Predicate p);

/// Point pairs a statement refers to as lines or segments (unordered, sorted).
std::vector<std::pair<std::string, std::string>> mentioned_pairs(const Statement& s);

}  // namespace geomgen
