#include <doctest.h>

#include <cmath>
#include <sstream>

#include "geomgen/errors.hpp"
#include "geomgen/rendering.hpp"
#include "svg_check.hpp"

using namespace geomgen;

namespace {

const Repository& shipped() {
  static const Repository repo =
      Repository::load(default_data_dir() / "defs.sdeg", default_data_dir() / "rules.sdeg");
  return repo;
}

const TemplateSet& english() {
  static const TemplateSet t = load_templates(default_data_dir() / "templates.en.txt");
  return t;
}

std::string shipped_text() { return read_file(default_data_dir() / "templates.en.txt"); }

std::string without_keys(const std::string& text, std::initializer_list<const char*> keys) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    bool drop = false;
    for (const char* k : keys) drop = drop || line.rfind(std::string(k) + " ", 0) == 0;
    if (!drop) out += line + "\n";
  }
  return out;
}

ExDefinitionSet exdefs(std::initializer_list<const char*> lines) {
  ExDefinitionSet exd;
  for (const char* l : lines) exd.entries.push_back(parse_instance(l));
  return exd;
}

QualifiedProblem midpoint_triangle_problem() {
  QualifiedProblem p;
  p.exd = exdefs({"triangle a b c", "midpoint d c b", "midpoint e a b", "midpoint f a c", "circle g d e f"});
  p.seed = 7;
  p.scene = construct_scene(p.exd, shipped(), p.seed);
  auto state = saturate(all_statements(p.exd, shipped()), shipped().rules(), p.scene);
  p.conclusion = parse_statement("eqangle d g a b a b f g");
  p.proof = prune(traceback(state, p.conclusion));
  p.used_rules = p.proof.used_rules();
  return p;
}

std::map<std::string, std::pair<double, double>> labels(const std::vector<svg_check::Element>& els) {
  std::map<std::string, std::pair<double, double>> out;
  for (const auto& e : els)
    if (e.name == "text") out[e.text] = {std::stod(e.attrs.at("x")), std::stod(e.attrs.at("y"))};
  return out;
}

}  // namespace

TEST_CASE("clause and question sentences") {
  CHECK(render_clause(parse_instance("midpoint f a c"), english()) == "Let point F be the midpoint of segment AC.");
  CHECK(render_question(parse_statement("para f d a b"), english()) == "Prove that FD ∥ AB.");
  CHECK(render_statement(parse_statement("perp a b c d"), english()).find("⊥") != std::string::npos);
}

TEST_CASE("text rendering of a problem") {
  auto p = midpoint_triangle_problem();
  auto text = render_text(p, english());
  REQUIRE(text.clauses.size() == p.exd.entries.size());
  for (std::size_t i = 0; i < text.clauses.size(); ++i) CHECK(text.clauses[i] == render_clause(p.exd.entries[i], english()));
  CHECK(text.answer.size() == static_cast<std::size_t>(p.proof.step_count()));
  CHECK(text.question == render_question(p.conclusion, english()));

  // Faithfulness: re-parsing a formal statement and rendering again is stable.
  for (const auto& s : all_statements(p.exd, shipped()))
    CHECK(render_statement(parse_statement(format_statement(s)), english()) == render_statement(s, english()));

  auto one = p;
  one.proof.steps.resize(1);
  CHECK(render_text(one, english()).answer.size() == 1);
}

TEST_CASE("template validation") {
  CHECK_NOTHROW(validate_templates(english(), shipped()));
  try {
    parse_templates(without_keys(shipped_text(), {"pred.para", "question.para"}));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("para") != std::string::npos);
  }
  auto no_midpoint = parse_templates(without_keys(shipped_text(), {"def.midpoint"}));
  CHECK_THROWS_AS(validate_templates(no_midpoint, shipped()), ConfigError);
  CHECK_THROWS_AS(render_clause(parse_instance("midpoint f a c"), no_midpoint), MissingTemplate);
  CHECK_THROWS_AS(parse_templates(shipped_text() + "pred.perp = again\n"), ParseError);
  CHECK_THROWS_AS(parse_templates(shipped_text() + "pred.bogus_dup ${9}\n"), ParseError);
  CHECK_THROWS_AS(parse_templates(without_keys(shipped_text(), {"pred.perp"}) + "pred.perp = ${0}${7}\n"), ParseError);
}

TEST_CASE("template round trip") {
  auto text = without_keys(shipped_text(), {"pred.perp"}) + "pred.perp = ${0}${1} is perpendicular to ${2}${3}\n";
  auto t = parse_templates(text);
  CHECK(t.by_predicate.at("perp") == "${0}${1} is perpendicular to ${2}${3}");
  CHECK(parse_templates(format_templates(t)) == t);
  auto path = std::filesystem::temp_directory_path() / "geomgen_unit" / "templates.txt";
  std::filesystem::create_directories(path.parent_path());
  save_templates(t, path);
  CHECK(load_templates(path) == t);
  CHECK(render_statement(parse_statement("perp a b c d"), t) == "AB is perpendicular to CD");
}

TEST_CASE("single free point is centered") {
  NumericScene scene;
  scene.add("a", Coord(0.5, 0.5));
  auto els = svg_check::parse(render_diagram(exdefs({"free a"}), scene, shipped()));
  bool marker = false;
  for (const auto& e : els)
    if (e.name == "circle" && e.attrs.at("class") == "point") {
      CHECK(std::stod(e.attrs.at("cx")) == doctest::Approx(200));
      CHECK(std::stod(e.attrs.at("cy")) == doctest::Approx(200));
      marker = true;
    }
  CHECK(marker);
  CHECK(labels(els).count("A"));
}

TEST_CASE("midpoint ticks are equidistant from the midpoint") {
  auto exd = exdefs({"segment a b", "midpoint m a b"});
  auto scene = construct_scene(exd, shipped(), 5);
  auto els = svg_check::parse(render_diagram(exd, scene, shipped()));
  std::vector<std::pair<double, double>> ticks;
  for (const auto& e : els)
    if (e.name == "line" && e.attrs.at("class") == "tick")
      ticks.push_back({(std::stod(e.attrs.at("x1")) + std::stod(e.attrs.at("x2"))) / 2,
                       (std::stod(e.attrs.at("y1")) + std::stod(e.attrs.at("y2"))) / 2});
  REQUIRE(ticks.size() == 2);
  double mx = 0, my = 0;
  for (const auto& e : els)
    if (e.name == "circle" && e.attrs.at("class") == "point") {
      mx = std::stod(e.attrs.at("cx"));  // the midpoint is drawn last
      my = std::stod(e.attrs.at("cy"));
    }
  double d0 = std::hypot(ticks[0].first - mx, ticks[0].second - my);
  double d1 = std::hypot(ticks[1].first - mx, ticks[1].second - my);
  CHECK(d0 > 1);
  CHECK(std::abs(d0 - d1) < 0.02);  // two-decimal output
}

TEST_CASE("diagram of the midpoint triangle") {
  auto p = midpoint_triangle_problem();
  auto svg = render_diagram(p, shipped());
  auto els = svg_check::parse(svg);
  CHECK(svg_check::on_canvas(els, 400, 400));
  auto lab = labels(els);
  for (const char* name : {"A", "B", "C", "D", "E", "F", "G"}) CHECK(lab.count(name));
  for (auto i = lab.begin(); i != lab.end(); ++i)
    for (auto j = std::next(i); j != lab.end(); ++j)
      CHECK(std::hypot(i->second.first - j->second.first, i->second.second - j->second.second) >= 8);
  // Points precede the segments that use them.
  std::set<std::string> drawn;
  std::vector<std::pair<double, double>> positions;
  for (const auto& e : els) {
    if (e.name == "circle" && e.attrs.at("class") == "point")
      positions.push_back({std::stod(e.attrs.at("cx")), std::stod(e.attrs.at("cy"))});
    if (e.name == "line" && e.attrs.at("class") == "segment") {
      for (const char* end : {"1", "2"}) {
        double x = std::stod(e.attrs.at(std::string("x") + end)), y = std::stod(e.attrs.at(std::string("y") + end));
        bool known = false;
        for (auto [px, py] : positions) known = known || (std::abs(px - x) < 1e-6 && std::abs(py - y) < 1e-6);
        CHECK(known);
      }
    }
  }
  CHECK(render_diagram(p, shipped()) == svg);
}

TEST_CASE("svg checker rejects malformed documents") {
  CHECK_THROWS(svg_check::parse("<svg><line x1=\"1\"></svg>"));
  CHECK_THROWS(svg_check::parse("<svg><text x=1>A</text></svg>"));
  CHECK_NOTHROW(svg_check::parse("<?xml version=\"1.0\"?>\n<svg><text x=\"1\">A</text></svg>"));
}
