#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geomgen/statement.hpp"

namespace geomgen {

/// premises => conclusion over pattern variables (point tokens).
struct KnowledgeRule {
  std::string id;    // "K_1" .. "K_43"
  std::string code;  // e.g. "perp_perp_ncoll_para"
  std::vector<Statement> premises;
  Statement conclusion;
  std::string description;

  std::vector<std::string> variables() const;  // first-occurrence order
};

enum class RecipeKind {
  free,
  on_line,
  on_circle,
  midpoint,
  reflection,
  intersection_line_line,
  intersection_line_circle,
  intersection_circle_circle,
  foot_of_perpendicular,
  circumcenter,
  equidistant_point,
};

std::string_view recipe_kind_name(RecipeKind k);

struct LineSpec {
  enum class Kind { through, perpendicular, parallel, perp_bisector, angle_bisector };
  Kind kind{Kind::through};
  // through(a,b) | perpendicular(p,a,b): through p, ⊥ ab | parallel(p,a,b)
  // perp_bisector(a,b) | angle_bisector(b,a,c): internal bisector at a
  std::vector<std::string> points;
};

struct CircleSpec {
  enum class Kind { center_through, diameter, circumscribed };
  Kind kind{Kind::center_through};
  std::vector<std::string> points;  // (o,p) | (a,b) | (a,b,c)
};

using RecipeArg = std::variant<std::string, LineSpec, CircleSpec, int>;

struct RecipeStep {
  std::string target;
  RecipeKind kind{RecipeKind::free};
  std::vector<RecipeArg> args;
};

/// Points referenced by a recipe step (excluding its target).
std::vector<std::string> recipe_points(const RecipeStep& step);

struct DefinitionEntry {
  std::string name;
  std::vector<std::string> params;  // header argument list
  std::vector<std::string> introduced;
  std::vector<std::string> dependencies;
  std::vector<Statement> emitted;
  std::vector<RecipeStep> recipe;
  std::vector<Statement> guards;
};

std::vector<KnowledgeRule> parse_rules(std::string_view text);
std::vector<DefinitionEntry> parse_defs(std::string_view text);

std::string format_rule(const KnowledgeRule& r);

/// Immutable after load.
class Repository {
 public:
  Repository() = default;
  Repository(std::vector<DefinitionEntry> defs, std::vector<KnowledgeRule> rules);

  static Repository load(const std::filesystem::path& defs_file, const std::filesystem::path& rules_file);

  const DefinitionEntry& definition(const std::string& name) const;
  const KnowledgeRule& rule(const std::string& id) const;
  bool has_definition(const std::string& name) const { return def_index_.count(name) != 0; }
  bool has_rule(const std::string& id) const { return rule_index_.count(id) != 0; }

  const std::vector<DefinitionEntry>& definitions() const { return defs_; }
  const std::vector<KnowledgeRule>& rules() const { return rules_; }

 private:
  std::vector<DefinitionEntry> defs_;
  std::vector<KnowledgeRule> rules_;
  std::map<std::string, std::size_t> def_index_;
  std::map<std::string, std::size_t> rule_index_;
};

std::string read_file(const std::filesystem::path& p);

/// Resource directory: $GEOMGEN_DATA_DIR, else the compiled-in data dir.
std::filesystem::path default_data_dir();

}  // namespace geomgen
