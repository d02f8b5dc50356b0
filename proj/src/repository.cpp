#include "geomgen/repository.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "geomgen/errors.hpp"

#ifndef GEOMGEN_DEFAULT_DATA_DIR
#define GEOMGEN_DEFAULT_DATA_DIR "data"
#endif

namespace geomgen {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_top_level(std::string_view s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<Statement> parse_statement_list(std::string_view text, int line) {
  std::vector<Statement> out;
  for (const auto& part : split_top_level(text, ';')) {
    if (part.empty()) continue;
    try {
      out.push_back(parse_statement(part));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line);
    }
  }
  return out;
}

struct KindSig {
  RecipeKind kind;
  std::string_view name;
  std::string_view sig;  // P point, L line, C circle, ? optional int
};

constexpr KindSig kKinds[] = {
    {RecipeKind::free, "free", ""},
    {RecipeKind::on_line, "on_line", "L"},
    {RecipeKind::on_circle, "on_circle", "C"},
    {RecipeKind::midpoint, "midpoint", "PP"},
    {RecipeKind::reflection, "reflection", "PP"},
    {RecipeKind::intersection_line_line, "intersection_line_line", "LL"},
    {RecipeKind::intersection_line_circle, "intersection_line_circle", "LC?"},
    {RecipeKind::intersection_circle_circle, "intersection_circle_circle", "CC?"},
    {RecipeKind::foot_of_perpendicular, "foot_of_perpendicular", "PPP"},
    {RecipeKind::circumcenter, "circumcenter", "PPP"},
    {RecipeKind::equidistant_point, "equidistant_point", "PP"},
};

const KindSig* find_kind(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return &k;
  return nullptr;
}

std::pair<std::string, std::vector<std::string>> split_call(const std::string& text, int line) {
  auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')')
    throw ParseError("expected call syntax, got '" + text + "'", line);
  std::string head = trim(text.substr(0, open));
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::vector<std::string> args;
  if (!trim(inner).empty()) args = split_top_level(inner, ',');
  return {head, args};
}

std::string point_token(const std::string& tok, int line) {
  auto p = normalize_point(tok);
  if (!p) throw ParseError("invalid point '" + tok + "'", line);
  return *p;
}

RecipeArg parse_recipe_arg(const std::string& text, int line) {
  if (text.find('(') == std::string::npos) {
    if (!text.empty() && (std::isdigit(static_cast<unsigned char>(text[0])) || text[0] == '-'))
      return std::stoi(text);
    return point_token(text, line);
  }
  auto [head, raw] = split_call(text, line);
  std::vector<std::string> pts;
  for (const auto& r : raw) pts.push_back(point_token(r, line));
  auto need = [&](std::size_t n) {
    if (pts.size() != n) throw ParseError("'" + head + "' expects " + std::to_string(n) + " points", line);
  };
  if (head == "line") return need(2), RecipeArg{LineSpec{LineSpec::Kind::through, pts}};
  if (head == "tline") return need(3), RecipeArg{LineSpec{LineSpec::Kind::perpendicular, pts}};
  if (head == "pline") return need(3), RecipeArg{LineSpec{LineSpec::Kind::parallel, pts}};
  if (head == "bline") return need(2), RecipeArg{LineSpec{LineSpec::Kind::perp_bisector, pts}};
  if (head == "bisector") return need(3), RecipeArg{LineSpec{LineSpec::Kind::angle_bisector, pts}};
  if (head == "circle") return need(2), RecipeArg{CircleSpec{CircleSpec::Kind::center_through, pts}};
  if (head == "dcircle") return need(2), RecipeArg{CircleSpec{CircleSpec::Kind::diameter, pts}};
  if (head == "circum") return need(3), RecipeArg{CircleSpec{CircleSpec::Kind::circumscribed, pts}};
  throw ParseError("unknown line/circle spec '" + head + "'", line);
}

RecipeStep parse_recipe_step(const std::string& text, const std::vector<std::string>& introduced, int line) {
  RecipeStep step;
  std::string call = text;
  auto eq = text.find('=');
  if (eq != std::string::npos) {
    step.target = point_token(trim(text.substr(0, eq)), line);
    call = trim(text.substr(eq + 1));
  } else if (introduced.size() == 1) {
    step.target = introduced.front();
  } else {
    throw ParseError("recipe step needs an explicit target: '" + text + "'", line);
  }
  auto [head, raw] = split_call(call, line);
  const KindSig* k = find_kind(head);
  if (!k) throw ParseError("unknown recipe kind '" + head + "'", line);
  step.kind = k->kind;
  for (const auto& r : raw) step.args.push_back(parse_recipe_arg(r, line));

  std::string_view sig = k->sig;
  std::size_t required = std::count_if(sig.begin(), sig.end(), [](char c) { return c != '?'; });
  bool optional_int = !sig.empty() && sig.back() == '?';
  if (step.args.size() < required || step.args.size() > required + (optional_int ? 1 : 0))
    throw ParseError("recipe '" + head + "' expects " + std::to_string(required) + " arguments", line);
  for (std::size_t i = 0; i < step.args.size(); ++i) {
    char want = i < required ? sig[i] : '?';
    const auto& a = step.args[i];
    bool ok = (want == 'P' && std::holds_alternative<std::string>(a)) ||
              (want == 'L' && std::holds_alternative<LineSpec>(a)) ||
              (want == 'C' && std::holds_alternative<CircleSpec>(a)) ||
              (want == '?' && std::holds_alternative<int>(a));
    if (!ok) throw ParseError("recipe '" + head + "' argument " + std::to_string(i + 1) + " has wrong type", line);
  }
  return step;
}

void check_points(const std::vector<Statement>& stmts, const std::set<std::string>& declared,
                  const std::string& block, int line) {
  for (const auto& s : stmts)
    for (const auto& a : s.args)
      if (!declared.count(a))
        throw ParseError("definition '" + block + "': point '" + a + "' used before declared", line);
}

}  // namespace

std::vector<std::string> KnowledgeRule::variables() const {
  std::vector<std::string> out;
  auto add = [&](const Statement& s) {
    for (const auto& a : s.args)
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  };
  for (const auto& p : premises) add(p);
  add(conclusion);
  return out;
}

std::string_view recipe_kind_name(RecipeKind k) {
  for (const auto& s : kKinds)
    if (s.kind == k) return s.name;
  return "?";
}

std::vector<std::string> recipe_points(const RecipeStep& step) {
  std::vector<std::string> out;
  for (const auto& a : step.args) {
    if (auto p = std::get_if<std::string>(&a)) out.push_back(*p);
    if (auto l = std::get_if<LineSpec>(&a)) out.insert(out.end(), l->points.begin(), l->points.end());
    if (auto c = std::get_if<CircleSpec>(&a)) out.insert(out.end(), c->points.begin(), c->points.end());
  }
  return out;
}

std::vector<KnowledgeRule> parse_rules(std::string_view text) {
  std::vector<KnowledgeRule> rules;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    std::string description;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      description = trim(line.substr(hash + 1));
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    KnowledgeRule rule;
    rule.description = description;
    auto arrow = line.find("=>");
    if (arrow == std::string::npos) throw ParseError("missing '=>'", line_no);
    std::string lhs = line.substr(0, arrow);
    if (auto colon = lhs.find(':'); colon != std::string::npos) {
      auto tag = split_ws(lhs.substr(0, colon));
      if (tag.empty()) throw ParseError("empty rule tag", line_no);
      rule.id = tag[0];
      if (tag.size() > 1) rule.code = tag[1];
      lhs = lhs.substr(colon + 1);
    } else {
      rule.id = "K_" + std::to_string(rules.size() + 1);
    }
    for (const auto& part : split_top_level(lhs, ',')) {
      if (part.empty()) continue;
      try {
        rule.premises.push_back(parse_statement(part));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
    }
    if (rule.premises.empty()) throw ParseError("rule without premises", line_no);
    try {
      rule.conclusion = parse_statement(trim(line.substr(arrow + 2)));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    std::set<std::string> vars;
    for (const auto& p : rule.premises) vars.insert(p.args.begin(), p.args.end());
    for (const auto& a : rule.conclusion.args)
      if (!vars.count(a))
        throw ParseError("conclusion variable '" + a + "' does not appear in any premise", line_no);
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::string format_rule(const KnowledgeRule& r) {
  std::string out = r.id;
  if (!r.code.empty()) out += " " + r.code;
  out += ": ";
  for (std::size_t i = 0; i < r.premises.size(); ++i) {
    if (i) out += ", ";
    out += format_statement(r.premises[i]);
  }
  out += " => " + format_statement(r.conclusion);
  return out;
}

std::vector<DefinitionEntry> parse_defs(std::string_view text) {
  std::vector<DefinitionEntry> defs;
  std::set<std::string> names;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;

  std::vector<std::pair<int, std::string>> block;
  auto flush = [&] {
    if (block.empty()) return;
    DefinitionEntry d;
    const int header_line = block.front().first;
    auto head = split_ws(block.front().second);
    d.name = head[0];
    for (std::size_t i = 1; i < head.size(); ++i) d.params.push_back(point_token(head[i], header_line));
    if (!names.insert(d.name).second) throw ParseError("duplicate definition '" + d.name + "'", header_line);
    std::set<std::string> declared(d.params.begin(), d.params.end());
    if (declared.size() != d.params.size())
      throw ParseError("definition '" + d.name + "': repeated parameter", header_line);

    std::vector<std::pair<int, std::string>> recipe_lines;
    for (std::size_t i = 1; i < block.size(); ++i) {
      const auto& [ln, body] = block[i];
      auto colon = body.find(':');
      if (colon == std::string::npos) throw ParseError("definition '" + d.name + "': expected 'key: value'", ln);
      std::string key = trim(body.substr(0, colon));
      std::string value = trim(body.substr(colon + 1));
      if (key == "deps") {
        for (const auto& t : split_ws(value)) {
          auto p = point_token(t, ln);
          if (!declared.count(p))
            throw ParseError("definition '" + d.name + "': point '" + p + "' used before declared", ln);
          d.dependencies.push_back(p);
        }
      } else if (key == "emit") {
        d.emitted = parse_statement_list(value, ln);
        check_points(d.emitted, declared, d.name, ln);
      } else if (key == "guard") {
        d.guards = parse_statement_list(value, ln);
        check_points(d.guards, declared, d.name, ln);
      } else if (key == "recipe") {
        recipe_lines.emplace_back(ln, value);
      } else {
        throw ParseError("definition '" + d.name + "': unknown key '" + key + "'", ln);
      }
    }
    for (const auto& p : d.params)
      if (std::find(d.dependencies.begin(), d.dependencies.end(), p) == d.dependencies.end())
        d.introduced.push_back(p);

    std::set<std::string> available(d.dependencies.begin(), d.dependencies.end());
    for (const auto& [ln, value] : recipe_lines) {
      for (const auto& part : split_top_level(value, ';')) {
        if (part.empty()) continue;
        RecipeStep step = parse_recipe_step(part, d.introduced, ln);
        if (std::find(d.introduced.begin(), d.introduced.end(), step.target) == d.introduced.end())
          throw ParseError("definition '" + d.name + "': recipe target '" + step.target + "' is not introduced", ln);
        for (const auto& p : recipe_points(step))
          if (!available.count(p))
            throw ParseError("definition '" + d.name + "': point '" + p + "' used before declared", ln);
        if (!available.insert(step.target).second)
          throw ParseError("definition '" + d.name + "': point '" + step.target + "' constructed twice", ln);
        d.recipe.push_back(std::move(step));
      }
    }
    for (const auto& p : d.introduced)
      if (!available.count(p))
        throw ParseError("definition '" + d.name + "': no recipe for point '" + p + "'", header_line);
    defs.push_back(std::move(d));
    block.clear();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) {
      // Comment-only lines do not terminate a block.
      if (trim(raw).empty()) flush();
      continue;
    }
    block.emplace_back(line_no, trim(line));
  }
  flush();
  return defs;
}

Repository::Repository(std::vector<DefinitionEntry> defs, std::vector<KnowledgeRule> rules)
    : defs_(std::move(defs)), rules_(std::move(rules)) {
  for (std::size_t i = 0; i < defs_.size(); ++i)
    if (!def_index_.emplace(defs_[i].name, i).second) throw ParseError("duplicate definition '" + defs_[i].name + "'");
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (!rule_index_.emplace(rules_[i].id, i).second) throw ParseError("duplicate rule id '" + rules_[i].id + "'");
}

Repository Repository::load(const std::filesystem::path& defs_file, const std::filesystem::path& rules_file) {
  return Repository(parse_defs(read_file(defs_file)), parse_rules(read_file(rules_file)));
}

const DefinitionEntry& Repository::definition(const std::string& name) const {
  auto it = def_index_.find(name);
  if (it == def_index_.end()) throw Error("unknown definition '" + name + "'");
  return defs_[it->second];
}

const KnowledgeRule& Repository::rule(const std::string& id) const {
  auto it = rule_index_.find(id);
  if (it == rule_index_.end()) throw UnknownKP(id);
  return rules_[it->second];
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("GEOMGEN_DATA_DIR"); env && *env) return env;
  return GEOMGEN_DEFAULT_DATA_DIR;
}

}  // namespace geomgen
