#include "geomgen/rendering.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>

#include "geomgen/errors.hpp"
#include "geomgen/mapping_table.hpp"

namespace geomgen {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Largest placeholder index used in `tpl`, -1 when none. Throws ParseError
/// on an unterminated or non-numeric placeholder.
int max_placeholder(const std::string& tpl, int line) {
  int best = -1;
  for (std::size_t i = tpl.find("${"); i != std::string::npos; i = tpl.find("${", i + 2)) {
    auto close = tpl.find('}', i);
    std::string idx = close == std::string::npos ? "" : tpl.substr(i + 2, close - i - 2);
    if (idx.empty() || !std::all_of(idx.begin(), idx.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw ParseError("malformed placeholder in '" + tpl + "'", line);
    best = std::max(best, std::stoi(idx));
  }
  return best;
}

std::string upper(const std::string& p) {
  std::string out = p;
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string fill(const std::string& tpl, const std::vector<std::string>& args) {
  std::string out;
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl.compare(i, 2, "${") == 0) {
      auto close = tpl.find('}', i);
      auto idx = static_cast<std::size_t>(std::stoi(tpl.substr(i + 2, close - i - 2)));
      if (idx >= args.size()) throw Error("placeholder ${" + std::to_string(idx) + "} out of range in '" + tpl + "'");
      out += upper(args[idx]);
      i = close + 1;
    } else {
      out += tpl[i++];
    }
  }
  return out;
}

}  // namespace

TemplateSet parse_templates(std::string_view text) {
  TemplateSet t;
  std::set<std::string> keys;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'kind.name = template'", lineno);
    std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = trim(std::string_view(s).substr(eq + 1));
    auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
      throw ParseError("malformed key '" + key + "'", lineno);
    if (!keys.insert(key).second) throw ParseError("duplicate key '" + key + "'", lineno);
    std::string kind = key.substr(0, dot), name = key.substr(dot + 1);
    int top = max_placeholder(value, lineno);
    if (kind == "meta") {
      if (name != "locale") throw ParseError("unknown meta key '" + key + "'", lineno);
      t.locale = value;
    } else if (kind == "pred" || kind == "question") {
      auto p = predicate_from_name(name);
      if (!p) throw ParseError("unknown predicate '" + name + "'", lineno);
      if (top >= predicate_arity(*p))
        throw ParseError("placeholder ${" + std::to_string(top) + "} exceeds the arity of " + name, lineno);
      (kind == "pred" ? t.by_predicate : t.question_templates)[name] = value;
    } else if (kind == "def") {
      t.by_definition[name] = value;
    } else {
      throw ParseError("unknown template kind '" + kind + "'", lineno);
    }
  }
  std::vector<std::string> missing;
  for (Predicate p : all_predicates()) {
    std::string name(predicate_name(p));
    if (!t.by_predicate.count(name)) missing.push_back("pred." + name);
    if (!t.question_templates.count(name)) missing.push_back("question." + name);
  }
  if (!missing.empty()) {
    std::string msg = "uncovered predicates:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }
  return t;
}

TemplateSet load_templates(const std::filesystem::path& path) { return parse_templates(read_file(path)); }

std::string format_templates(const TemplateSet& t) {
  std::string out = "meta.locale = " + t.locale + "\n";
  for (const auto& [k, v] : t.by_predicate) out += "pred." + k + " = " + v + "\n";
  for (const auto& [k, v] : t.question_templates) out += "question." + k + " = " + v + "\n";
  for (const auto& [k, v] : t.by_definition) out += "def." + k + " = " + v + "\n";
  return out;
}

void save_templates(const TemplateSet& t, const std::filesystem::path& path) { write_atomic(path, format_templates(t)); }

void validate_templates(const TemplateSet& t, const Repository& repo) {
  std::vector<std::string> problems;
  for (const auto& d : repo.definitions()) {
    auto it = t.by_definition.find(d.name);
    if (it == t.by_definition.end())
      problems.push_back("def." + d.name + " missing");
    else if (max_placeholder(it->second, 0) >= static_cast<int>(d.params.size()))
      problems.push_back("def." + d.name + " uses a placeholder beyond its " + std::to_string(d.params.size()) +
                         " points");
  }
  if (!problems.empty()) {
    std::string msg = "template set does not cover the repository:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ConfigError(msg);
  }
}

std::string render_statement(const Statement& s, const TemplateSet& t) {
  std::string name(predicate_name(s.pred));
  auto it = t.by_predicate.find(name);
  if (it == t.by_predicate.end()) throw MissingTemplate("pred." + name);
  return fill(it->second, s.args);
}

std::string render_question(const Statement& s, const TemplateSet& t) {
  std::string name(predicate_name(s.pred));
  auto it = t.question_templates.find(name);
  if (it == t.question_templates.end()) throw MissingTemplate("question." + name);
  return fill(it->second, s.args);
}

std::string render_clause(const DefinitionInstance& d, const TemplateSet& t) {
  auto it = t.by_definition.find(d.definition);
  if (it == t.by_definition.end()) throw MissingTemplate("def." + d.definition);
  return fill(it->second, d.args);
}

std::string TextualProblem::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) out += (i ? " " : "") + clauses[i];
  out += "\n" + question + "\n\nProof:\n";
  for (std::size_t i = 0; i < answer.size(); ++i) out += "(" + std::to_string(i + 1) + ") " + answer[i] + "\n";
  return out;
}

TextualProblem render_text(const QualifiedProblem& problem, const TemplateSet& t) {
  TextualProblem out;
  for (const auto& e : problem.exd.entries) out.clauses.push_back(render_clause(e, t));
  out.question = render_question(problem.conclusion, t);
  for (const auto& step : problem.proof.steps) {
    std::string s;
    for (std::size_t i = 0; i < step.antecedents.size(); ++i)
      s += (i ? ", " : "") + render_statement(step.antecedents[i], t);
    s += (s.empty() ? "" : " ⟹ ") + render_statement(step.derived, t) + ".";
    out.answer.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diagram

namespace {

struct Segment {
  std::string a, b;
};
struct CircleEl {
  Coord c;
  double r;
};
struct Mark {
  enum class Kind { tick, right_angle } kind;
  std::vector<Coord> pts;  // scene coordinates
};

struct Element {
  enum class Kind { point, segment, circle, mark } kind;
  std::string name;  // point
  Segment seg;
  CircleEl circle{};
  Mark mark{};
};

std::optional<Coord> circumcenter(const Coord& a, const Coord& b, const Coord& c) {
  double d = 2 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
  if (std::abs(d) < 1e-12) return std::nullopt;
  double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
  return Coord{(a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d,
               (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d};
}

class DiagramBuilder {
 public:
  DiagramBuilder(const NumericScene& scene) : scene_(scene) {}

  void point(const std::string& p) {
    if (drawn_points_.insert(p).second) elements_.push_back({Element::Kind::point, p, {}, {}, {}});
  }
  void segment(const std::string& a, const std::string& b) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    if (!drawn_segments_.insert({key.first, key.second}).second) return;
    elements_.push_back({Element::Kind::segment, {}, {a, b}, {}, {}});
  }
  /// Segment through the two extreme points of `pts` along their common line.
  void span(std::vector<std::string> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) return;
    Coord o = scene_.at(pts[0]), d = Coord::Zero();
    for (const auto& p : pts)
      if ((scene_.at(p) - o).norm() > d.norm()) d = scene_.at(p) - o;
    if (d.norm() == 0) return;
    auto t = [&](const std::string& p) { return (scene_.at(p) - o).dot(d); };
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [&](auto& x, auto& y) { return t(x) < t(y); });
    segment(*lo, *hi);
  }
  void circle(const Coord& c, double r) {
    for (const auto& e : elements_)
      if (e.kind == Element::Kind::circle && (e.circle.c - c).norm() < 1e-9 && std::abs(e.circle.r - r) < 1e-9) return;
    elements_.push_back({Element::Kind::circle, {}, {}, {c, r}, {}});
  }
  void tick(const std::string& a, const std::string& b) {
    elements_.push_back({Element::Kind::mark, {}, {}, {}, {Mark::Kind::tick, {scene_.at(a), scene_.at(b)}}});
  }
  /// Right-angle mark at `at` between the directions towards `u` and `v`.
  void right_angle(const std::string& at, const Coord& u, const Coord& v) {
    elements_.push_back({Element::Kind::mark, {}, {}, {}, {Mark::Kind::right_angle, {scene_.at(at), u, v}}});
  }

  const std::vector<Element>& elements() const { return elements_; }
  const NumericScene& scene() const { return scene_; }

 private:
  const NumericScene& scene_;
  std::vector<Element> elements_;
  std::set<std::string> drawn_points_;
  std::set<std::pair<std::string, std::string>> drawn_segments_;
};

void draw_line_spec(DiagramBuilder& b, const LineSpec& l, const std::string& target) {
  const auto& p = l.points;
  switch (l.kind) {
    case LineSpec::Kind::through: b.span({p[0], p[1], target}); break;
    case LineSpec::Kind::perpendicular:
    case LineSpec::Kind::parallel: b.segment(p[0], target); break;
    case LineSpec::Kind::perp_bisector:
      b.segment(p[0], target);
      b.segment(p[1], target);
      break;
    case LineSpec::Kind::angle_bisector: b.segment(p[1], target); break;
  }
}

void draw_circle_spec(DiagramBuilder& b, const CircleSpec& c) {
  const auto& s = b.scene();
  const auto& p = c.points;
  switch (c.kind) {
    case CircleSpec::Kind::center_through: b.circle(s.at(p[0]), (s.at(p[1]) - s.at(p[0])).norm()); break;
    case CircleSpec::Kind::diameter: b.circle((s.at(p[0]) + s.at(p[1])) / 2, (s.at(p[1]) - s.at(p[0])).norm() / 2); break;
    case CircleSpec::Kind::circumscribed:
      if (auto o = circumcenter(s.at(p[0]), s.at(p[1]), s.at(p[2]))) b.circle(*o, (s.at(p[0]) - *o).norm());
      break;
  }
}

void draw_entry(DiagramBuilder& b, const BoundInstance& inst) {
  auto intro = inst.introduced();
  for (const auto& p : intro) b.point(p);
  if (inst.dependencies().empty()) {
    if (intro.size() == 2) b.segment(intro[0], intro[1]);
    if (intro.size() >= 3)
      for (std::size_t i = 0; i < intro.size(); ++i) b.segment(intro[i], intro[(i + 1) % intro.size()]);
    return;
  }
  const auto& s = b.scene();
  for (const auto& step : inst.recipe()) {
    auto pt = [&](std::size_t i) { return std::get<std::string>(step.args[i]); };
    const std::string& x = step.target;
    switch (step.kind) {
      case RecipeKind::midpoint:
        b.segment(pt(0), x);
        b.segment(x, pt(1));
        b.tick(pt(0), x);
        b.tick(x, pt(1));
        break;
      case RecipeKind::reflection:
        b.segment(pt(0), pt(1));
        b.segment(pt(1), x);
        b.tick(pt(0), pt(1));
        b.tick(pt(1), x);
        break;
      case RecipeKind::foot_of_perpendicular:
        b.segment(pt(0), x);
        b.span({pt(1), pt(2), x});
        if ((s.at(pt(0)) - s.at(x)).norm() > 1e-9) {
          Coord along = s.at(pt(1)) - s.at(x);
          if (along.norm() < 1e-9) along = s.at(pt(2)) - s.at(x);
          b.right_angle(x, s.at(pt(0)), s.at(x) + along);
        }
        break;
      case RecipeKind::circumcenter:
        b.circle(s.at(x), (s.at(pt(0)) - s.at(x)).norm());
        break;
      case RecipeKind::equidistant_point:
        b.segment(x, pt(0));
        b.segment(x, pt(1));
        b.tick(x, pt(0));
        b.tick(x, pt(1));
        break;
      default:
        for (const auto& a : step.args) {
          if (auto l = std::get_if<LineSpec>(&a)) draw_line_spec(b, *l, x);
          if (auto c = std::get_if<CircleSpec>(&a)) draw_circle_spec(b, *c);
        }
        break;
    }
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

}  // namespace

std::string render_diagram(const ExDefinitionSet& exd, const NumericScene& scene, const Repository& repo,
                           const Canvas& canvas) {
  DiagramBuilder b(scene);
  for (const auto& e : exd.entries) draw_entry(b, BoundInstance(repo, e));

  // Bounding box over points and circles, mapped with a uniform scale.
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  auto extend = [&](const Coord& c, double r) {
    x0 = std::min(x0, c.x() - r);
    x1 = std::max(x1, c.x() + r);
    y0 = std::min(y0, c.y() - r);
    y1 = std::max(y1, c.y() + r);
  };
  for (const auto& e : b.elements()) {
    if (e.kind == Element::Kind::point) extend(scene.at(e.name), 0);
    if (e.kind == Element::Kind::circle) extend(e.circle.c, e.circle.r);
  }
  if (x0 > x1) x0 = y0 = 0, x1 = y1 = 1;
  double mx = canvas.width * canvas.margin, my = canvas.height * canvas.margin;
  double avail_w = canvas.width - 2 * mx, avail_h = canvas.height - 2 * my;
  double extent = std::max(x1 - x0, y1 - y0);
  double scale = extent > 0 ? std::min(avail_w, avail_h) / extent : 1.0;
  double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  auto map = [&](const Coord& c) {
    return Coord{canvas.width / 2 + (c.x() - cx) * scale, canvas.height / 2 - (c.y() - cy) * scale};
  };

  // Labels: radial offset from the centroid, then one nudge pass.
  std::vector<std::string> names;
  for (const auto& e : b.elements())
    if (e.kind == Element::Kind::point) names.push_back(e.name);
  Coord centroid = Coord::Zero();
  for (const auto& n : names) centroid += map(scene.at(n));
  if (!names.empty()) centroid /= static_cast<double>(names.size());
  const double offset = 12, min_gap = 8;
  std::map<std::string, Coord> label;
  for (const auto& n : names) {
    Coord p = map(scene.at(n)), d = p - centroid;
    d = d.norm() < 1e-9 ? Coord{0, -1} : d.normalized();
    label[n] = p + offset * d;
  }
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      Coord d = label[names[j]] - label[names[i]];
      double dist = d.norm();
      if (dist >= min_gap) continue;
      Coord dir = dist < 1e-9 ? Coord{1, 0} : d / dist;
      label[names[j]] += (min_gap - dist + 1) * dir;
    }
  auto clamp = [&](Coord c) {
    return Coord{std::clamp(c.x(), 6.0, canvas.width - 6.0), std::clamp(c.y(), 6.0, canvas.height - 6.0)};
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(canvas.width) << "\" height=\""
      << num(canvas.height) << "\" viewBox=\"0 0 " << num(canvas.width) << " " << num(canvas.height) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(canvas.width) << "\" height=\"" << num(canvas.height)
      << "\" fill=\"white\"/>\n";
  for (const auto& e : b.elements()) {
    switch (e.kind) {
      case Element::Kind::point: {
        Coord p = map(scene.at(e.name)), l = clamp(label[e.name]);
        out << "<circle class=\"point\" cx=\"" << num(p.x()) << "\" cy=\"" << num(p.y())
            << "\" r=\"3\" fill=\"black\"/>\n";
        out << "<text class=\"label\" x=\"" << num(l.x()) << "\" y=\"" << num(l.y())
            << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"central\">"
            << upper(e.name) << "</text>\n";
        break;
      }
      case Element::Kind::segment: {
        Coord a = map(scene.at(e.seg.a)), c = map(scene.at(e.seg.b));
        out << "<line class=\"segment\" x1=\"" << num(a.x()) << "\" y1=\"" << num(a.y()) << "\" x2=\"" << num(c.x())
            << "\" y2=\"" << num(c.y()) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
        break;
      }
      case Element::Kind::circle: {
        Coord c = map(e.circle.c);
        out << "<circle class=\"circle\" cx=\"" << num(c.x()) << "\" cy=\"" << num(c.y()) << "\" r=\""
            << num(e.circle.r * scale) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
        break;
      }
      case Element::Kind::mark: {
        if (e.mark.kind == Mark::Kind::tick) {
          Coord a = map(e.mark.pts[0]), c = map(e.mark.pts[1]), m = (a + c) / 2, d = c - a;
          if (d.norm() < 1e-9) break;
          Coord n = Coord{-d.y(), d.x()}.normalized() * 5;
          Coord p = m + n, q = m - n;
          out << "<line class=\"tick\" x1=\"" << num(p.x()) << "\" y1=\"" << num(p.y()) << "\" x2=\"" << num(q.x())
              << "\" y2=\"" << num(q.y()) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
        } else {
          Coord at = map(e.mark.pts[0]), u = map(e.mark.pts[1]) - at, v = map(e.mark.pts[2]) - at;
          if (u.norm() < 1e-9 || v.norm() < 1e-9) break;
          u = u.normalized() * 8;
          v = v.normalized() * 8;
          Coord p = at + u, q = at + u + v, r = at + v;
          out << "<polyline class=\"right-angle\" points=\"" << num(p.x()) << "," << num(p.y()) << " " << num(q.x())
              << "," << num(q.y()) << " " << num(r.x()) << "," << num(r.y())
              << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
        }
        break;
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_diagram(const QualifiedProblem& problem, const Repository& repo, const Canvas& canvas) {
  return render_diagram(problem.exd, problem.scene, repo, canvas);
}

}  // namespace geomgen
