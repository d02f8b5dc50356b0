#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "geomgen/errors.hpp"
#include "geomgen/numeric.hpp"
#include "geomgen/repository.hpp"
#include "geomgen/statement.hpp"

using namespace geomgen;

namespace {

const Repository& shipped() {
  static const Repository repo =
      Repository::load(default_data_dir() / "defs.sdeg", default_data_dir() / "rules.sdeg");
  return repo;
}

Statement st(const char* text) { return parse_statement(text); }

}  // namespace

TEST_CASE("statements parse and format") {
  CHECK(format_statement(st("perp a b c d")) == "perp a b c d");
  CHECK(format_statement(canonicalize(st("para a b c d"))) == "para a b c d");
  CHECK(st("para A B C1 D").args == std::vector<std::string>{"a", "b", "c1", "d"});
  CHECK_THROWS_AS(st("para a b c"), ParseError);
  CHECK_THROWS_AS(st("parallel a b c d"), ParseError);
  CHECK_THROWS_AS(st("para a b c 1d"), ParseError);
}

TEST_CASE("arity table") {
  CHECK(predicate_arity(Predicate::perp) == 4);
  CHECK(predicate_arity(Predicate::coll) == 3);
  CHECK(predicate_arity(Predicate::midp) == 3);
  CHECK(predicate_arity(Predicate::circle) == 4);
  CHECK(predicate_arity(Predicate::eqangle) == 8);
  CHECK(predicate_arity(Predicate::simtri) == 6);
  CHECK(predicate_arity(Predicate::sameside) == 6);
  CHECK(all_predicates().size() == kPredicateCount);
}

TEST_CASE("canonical forms") {
  CHECK(canonicalize(st("para c d a b")) == st("para a b c d"));
  CHECK(canonicalize(st("cong x a x b")) == st("cong a x b x"));
  CHECK(canonicalize(st("eqangle e f g h a b c d")) == st("eqangle a b c d e f g h"));
}

TEST_CASE("eqangle symmetry group agrees with the numeric model") {
  // Four lines in general position with one true angle equality; every orbit
  // member must stay true numerically and canonicalize to the same form.
  NumericScene scene;
  Coord a(0, 0), b(1, 0.3), c(0.2, 1), d(0.5, 2.1);
  auto rot = [](const Coord& v) -> Coord { return {0.6 * v.x() - 0.8 * v.y(), 0.8 * v.x() + 0.6 * v.y()}; };
  scene.add("a", a);
  scene.add("b", b);
  scene.add("c", c);
  scene.add("d", d);
  scene.add("e", Coord(3, 1) + rot(a));
  scene.add("f", Coord(3, 1) + rot(b));
  scene.add("g", Coord(3, 1) + rot(c));
  scene.add("h", Coord(3, 1) + rot(d));
  auto s = st("eqangle a b c d e f g h");
  REQUIRE(check_numeric(s, scene));
  auto canon = canonicalize(s);
  for (const auto& perm : symmetry_group(Predicate::eqangle)) {
    Statement t{s.pred, {}};
    for (int i : perm) t.args.push_back(s.args[static_cast<std::size_t>(i)]);
    CHECK(check_numeric(t, scene));
    CHECK(canonicalize(t) == canon);
  }
}

TEST_CASE("canonicalization is idempotent and invariant under symmetry (property)") {
  std::mt19937 gen(1234);
  const char* pool[] = {"a", "b", "c", "d", "e", "f", "g", "h", "m", "o"};
  for (Predicate p : all_predicates()) {
    for (int trial = 0; trial < 40; ++trial) {
      Statement s{p, {}};
      for (int i = 0; i < predicate_arity(p); ++i) s.args.push_back(pool[gen() % 10]);
      auto c = canonicalize(s);
      CHECK(canonicalize(c) == c);
      const auto& group = symmetry_group(p);
      const auto& perm = group[gen() % group.size()];
      Statement t{p, {}};
      for (int i : perm) t.args.push_back(s.args[static_cast<std::size_t>(i)]);
      CHECK(canonicalize(t) == c);
      CHECK(parse_statement(format_statement(s)) == s);
      auto orbit = symmetry_orbit(s);
      CHECK(std::find(orbit.begin(), orbit.end(), c) != orbit.end());
    }
  }
}

TEST_CASE("rule parsing") {
  auto rules = parse_rules("perp a b c d, perp c d e f, ncoll a b e => para a b e f");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].premises.size() == 3);
  CHECK(rules[0].conclusion == st("para a b e f"));
  CHECK(parse_rules("").empty());
  auto midline = parse_rules("midp m a b, midp n a c => para m n b c");
  REQUIRE(midline.size() == 1);
  CHECK(midline[0].premises.size() == 2);
  CHECK_THROWS_AS(parse_rules("midp m a b => para m z b c"), ParseError);
  CHECK_THROWS_AS(parse_rules("=> para a b c d"), ParseError);
}

TEST_CASE("definition parsing") {
  auto defs = parse_defs("midpoint x a b\ndeps: a b\nrecipe: midpoint(a, b)\nemit: midp x a b; cong x a x b; coll x a b\n");
  REQUIRE(defs.size() == 1);
  CHECK(defs[0].introduced == std::vector<std::string>{"x"});
  CHECK(defs[0].dependencies == std::vector<std::string>{"a", "b"});
  CHECK(defs[0].emitted.size() == 3);
  auto free_point = parse_defs("free a\nrecipe: free()\n");
  REQUIRE(free_point.size() == 1);
  CHECK(free_point[0].dependencies.empty());
  CHECK(free_point[0].emitted.empty());
  try {
    parse_defs("broken x a\ndeps: a\nrecipe: midpoint(a, a)\nemit: cong x a z a\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("broken") != std::string::npos);
  }
}

TEST_CASE("shipped repositories") {
  const auto& repo = shipped();
  CHECK(repo.rules().size() == 43);
  CHECK(repo.definitions().size() >= 20);
  for (std::size_t i = 0; i < repo.rules().size(); ++i) CHECK(repo.rules()[i].id == "K_" + std::to_string(i + 1));
  for (const auto& r : repo.rules()) {
    auto again = parse_rules(format_rule(r));
    REQUIRE(again.size() == 1);
    CHECK(again[0].premises == r.premises);
    CHECK(again[0].conclusion == r.conclusion);
    for (const auto& p : r.premises) CHECK(parse_statement(format_statement(p)) == p);
  }
  std::set<RecipeKind> kinds;
  for (const auto& d : repo.definitions())
    for (const auto& step : d.recipe) kinds.insert(step.kind);
  CHECK(kinds.size() == 11);
}
