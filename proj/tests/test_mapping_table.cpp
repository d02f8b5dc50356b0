#include <doctest.h>

#include <cmath>
#include <fstream>

#include "geomgen/errors.hpp"
#include "geomgen/mapping_table.hpp"

using namespace geomgen;
namespace fs = std::filesystem;

namespace {

const Repository& shipped() {
  static const Repository repo =
      Repository::load(default_data_dir() / "defs.sdeg", default_data_dir() / "rules.sdeg");
  return repo;
}

ExDefinitionSet exdefs(std::initializer_list<const char*> lines) {
  ExDefinitionSet exd;
  for (const char* l : lines) exd.entries.push_back(parse_instance(l));
  return exd;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "geomgen_unit";
  fs::create_directories(dir);
  return dir / name;
}

MappingTable small_table() {
  MappingTable t;
  t.insert("K_25", exdefs({"triangle a b c", "midpoint d a b", "midpoint e a c"}));
  t.insert("K_8", exdefs({"iso_triangle a b c"}));
  t.insert("K_8", exdefs({"triangle a b c", "circle o a b c"}));
  return t;
}

const MappingTable& built(long long T, int threads) {
  static std::map<std::pair<long long, int>, MappingTable> cache;
  auto key = std::make_pair(T, threads);
  if (!cache.count(key)) {
    TableBuildConfig cfg;
    cfg.T = T;
    cfg.seed = 3;
    cfg.threads = threads;
    cache[key] = build_table(shipped(), cfg);
  }
  return cache[key];
}

}  // namespace

TEST_CASE("build config validation") {
  TableBuildConfig cfg;
  cfg.T = 0;
  CHECK_THROWS_AS(cfg.validate(shipped()), ConfigError);
  cfg.T = 10;
  cfg.n_max = 0;
  CHECK_THROWS_AS(cfg.validate(shipped()), ConfigError);
  cfg.n_max = 2;
  CHECK_NOTHROW(cfg.validate(shipped()));
}

TEST_CASE("sampling") {
  MappingTable t;
  auto only = exdefs({"triangle a b c", "midpoint d a b", "midpoint e a c"});
  t.insert("K_25", only);
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(sample_exdefs(t, "K_25", seed) == only);
  CHECK_THROWS_AS(sample_exdefs(t, "K_99", 0), UnknownKP);
  t.entries["K_7"];
  CHECK_THROWS_AS(sample_exdefs(t, "K_7", 0), EmptyEntry);
  CHECK(sample_exdefs(t, "K_25", 5) == sample_exdefs(t, "K_25", 5));
}

TEST_CASE("sampling is uniform (chi-square)") {
  MappingTable t;
  const char* figures[] = {"triangle a b c", "segment a b", "quadrangle a b c d", "iso_triangle a b c"};
  for (const char* f : figures) t.insert("K_1", exdefs({f}));
  REQUIRE(t.entries["K_1"].size() == 4);
  const int n = 10000;
  std::map<std::string, int> hits;
  for (int i = 0; i < n; ++i) ++hits[serialize(sample_exdefs(t, "K_1", static_cast<std::uint64_t>(i)))];
  REQUIRE(hits.size() == 4);
  double expected = n / 4.0, sigma = std::sqrt(n * 0.25 * 0.75), chi2 = 0;
  for (const auto& [k, c] : hits) {
    CHECK(std::abs(c - expected) <= 3 * sigma);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < 16.27);  // df 3, p = 0.001
}

TEST_CASE("persistence") {
  auto path = scratch("roundtrip.jsonl");
  auto t = small_table();
  t.build_config.T = 7;
  save_table(t, path);
  auto back = load_table(path);
  CHECK(back == t);
  CHECK(back.build_config.T == 7);

  save_table(MappingTable{}, path);
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1);
  CHECK(load_table(path).entries.empty());
}

TEST_CASE("corrupted records name their line") {
  auto path = scratch("corrupt.jsonl");
  auto t = small_table();
  t.insert("K_25", exdefs({"triangle a b c", "midpoint d b c", "midpoint e b a"}));
  save_table(t, path);
  std::vector<std::string> lines;
  {
    std::ifstream in(path);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  REQUIRE(lines.size() >= 5);
  lines[4] = "{\"kp\": \"K_8\", \"exdef\": [";
  {
    std::ofstream out(path);
    for (const auto& l : lines) out << l << "\n";
  }
  try {
    load_table(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  {
    std::ofstream out(path);
    out << "{\"format\":\"k2exd\",\"version\":99,\"build_config\":{}}\n";
  }
  CHECK_THROWS_AS(load_table(path), Error);
}

TEST_CASE("build is deterministic across thread counts") {
  const auto& a = built(40, 1);
  const auto& b = built(40, 4);
  CHECK(a == b);
  auto pa = scratch("a.jsonl"), pb = scratch("b.jsonl");
  save_table(a, pa);
  save_table(b, pb);
  CHECK(read_file(pa) == read_file(pb));
  CHECK(!a.entries.empty());
}

TEST_CASE("doubling T never lowers a count") {
  auto small = built(40, 0).counts();
  auto large = built(80, 0).counts();
  for (const auto& [kp, n] : small) CHECK(large[kp] >= n);
}

TEST_CASE("stored sets re-verify") {
  const auto& t = built(40, 0);
  int checked = 0;
  for (const auto& [kp, sets] : t.entries)
    for (std::size_t i = 0; i < sets.size() && i < 2; ++i) {
      auto scene = construct_scene(sets[i], shipped(), 21);
      auto state = saturate(all_statements(sets[i], shipped()), shipped().rules(), scene);
      if (!state.complete) continue;
      INFO(kp << " " << serialize(sets[i]));
      CHECK(rules_used(state).count(kp));
      ++checked;
    }
  CHECK(checked > 0);
}
