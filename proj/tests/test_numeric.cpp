#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "geomgen/errors.hpp"
#include "geomgen/exdef.hpp"
#include "geomgen/numeric.hpp"

using namespace geomgen;

namespace {

const Repository& shipped() {
  static const Repository repo =
      Repository::load(default_data_dir() / "defs.sdeg", default_data_dir() / "rules.sdeg");
  return repo;
}

ExDefinitionSet exdefs(std::initializer_list<const char*> lines) {
  ExDefinitionSet exd;
  for (const char* l : lines) exd.entries.push_back(parse_instance(l));
  validate(exd, shipped());
  return exd;
}

NumericScene scene_of(std::initializer_list<std::pair<const char*, Coord>> pts) {
  NumericScene s;
  for (const auto& [n, c] : pts) s.add(n, c);
  return s;
}

}  // namespace

TEST_CASE("midpoint construction") {
  auto scene = construct_scene(exdefs({"segment a b", "midpoint m a b"}), shipped(), 7);
  Coord a = scene.at("a"), b = scene.at("b"), m = scene.at("m");
  CHECK(std::abs((m - a).norm() - (m - b).norm()) / (a - b).norm() < 1e-9);
}

TEST_CASE("triangle guard holds with margin") {
  auto scene = construct_scene(exdefs({"triangle a b c"}), shipped(), 3);
  Coord u = scene.at("b") - scene.at("a"), v = scene.at("c") - scene.at("a");
  double scale = std::max({u.norm(), v.norm(), (scene.at("c") - scene.at("b")).norm()});
  CHECK(std::abs(u.x() * v.y() - u.y() * v.x()) / (scale * scale) > 1e-6);
  CHECK_FALSE(check_numeric(parse_statement("coll a b c"), scene));
  CHECK(check_numeric(parse_statement("ncoll a b c"), scene));
}

TEST_CASE("circumcenter of the midpoint triangle") {
  auto scene = construct_scene(
      exdefs({"triangle a b c", "midpoint d c b", "midpoint e a b", "midpoint f a c", "circle g d e f"}), shipped(), 11);
  // Oracle: intersect the perpendicular bisectors of DE and DF directly.
  Coord d = scene.at("d"), e = scene.at("e"), f = scene.at("f");
  Eigen::Matrix2d m;
  m << 2 * (e - d).x(), 2 * (e - d).y(), 2 * (f - d).x(), 2 * (f - d).y();
  Eigen::Vector2d rhs(e.squaredNorm() - d.squaredNorm(), f.squaredNorm() - d.squaredNorm());
  Coord g = m.colPivHouseholderQr().solve(rhs);
  CHECK((g - scene.at("g")).norm() / (e - d).norm() < 1e-9);
}

TEST_CASE("check_numeric basics") {
  auto axes = scene_of({{"a", {0, 0}}, {"b", {0, 1}}, {"c", {0, 0}}, {"d", {1, 0}}});
  CHECK(check_numeric(parse_statement("perp a b c d"), axes));
  CHECK_FALSE(check_numeric(parse_statement("para a b c d"), axes));

  // Two perpendiculars to the same line are parallel; the oracle is the raw
  // cross product of the direction vectors.
  auto k = scene_of({{"a", {0.1, 0.2}}, {"b", {1.3, 0.9}}, {"c", {0.5, -0.4}}, {"d", {-0.2, 0.8}},
                     {"e", {2.0, -1.0}}, {"f", {3.2, -0.3}}});
  Coord ab = k.at("b") - k.at("a"), ef = k.at("f") - k.at("e");
  REQUIRE(std::abs(ab.x() * ef.y() - ab.y() * ef.x()) < 1e-12);
  CHECK(check_numeric(parse_statement("para a b e f"), k));
  CHECK(check_numeric(parse_statement("perp a b c d"), k));
  CHECK(check_numeric(parse_statement("ncoll a b e"), k));
}

TEST_CASE("tolerance is monotone (property)") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    double eps = rng.uniform(-1e-7, 1e-7);
    auto s = scene_of({{"a", {0, 0}}, {"b", {1, 0}}, {"c", {0.3, 0.7}}, {"d", {1.3, 0.7 + eps}}});
    auto para = parse_statement("para a b c d");
    for (double t : {1e-12, 1e-10, 1e-9, 1e-8, 1e-6})
      if (check_numeric(para, s, t)) {
        CHECK(check_numeric(para, s, t * 10));
      }
  }
}

TEST_CASE("scene construction is deterministic") {
  auto exd = exdefs({"triangle a b c", "circle o a b c", "foot h a b c"});
  auto s1 = construct_scene(exd, shipped(), 42), s2 = construct_scene(exd, shipped(), 42);
  for (const auto& n : s1.order()) {
    CHECK(s1.at(n).x() == s2.at(n).x());
    CHECK(s1.at(n).y() == s2.at(n).y());
  }
}

TEST_CASE("every shipped definition is numerically sound") {
  const auto& repo = shipped();
  for (const auto& def : repo.definitions()) {
    ExDefinitionSet exd;
    for (const auto& dep : def.dependencies) exd.entries.push_back({"free", {dep}});
    exd.entries.push_back({def.name, def.params});
    int built = 0, sound = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      NumericScene scene;
      try {
        scene = construct_scene(exd, repo, seed);
      } catch (const Error&) {
        continue;
      }
      ++built;
      bool ok = true;
      for (const auto& s : all_statements(exd, repo)) ok = ok && check_numeric(s, scene);
      for (const auto& g : all_guards(exd, repo)) ok = ok && check_numeric(g, scene);
      sound += ok;
    }
    INFO(def.name);
    CHECK(built >= 90);
    CHECK(sound == built);
  }
}
