#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geomgen/generator.hpp"
#include "geomgen/repository.hpp"

namespace geomgen {

/// Sentence templates keyed by predicate or definition name; `${i}` stands
/// for the i-th argument, rendered as an uppercase point name.
struct TemplateSet {
  std::string locale = "en";
  std::map<std::string, std::string> by_predicate;
  std::map<std::string, std::string> by_definition;
  std::map<std::string, std::string> question_templates;

  bool operator==(const TemplateSet&) const = default;
};

/// Parses `kind.name = template` lines (kinds meta, pred, question, def).
/// Throws ParseError on malformed lines, duplicate keys and placeholders
/// beyond a predicate's arity; ConfigError listing every predicate without a
/// pred/question template.
TemplateSet parse_templates(std::string_view text);
TemplateSet load_templates(const std::filesystem::path& path);
std::string format_templates(const TemplateSet& t);
void save_templates(const TemplateSet& t, const std::filesystem::path& path);

/// Throws ConfigError listing the repository definitions without a template
/// or whose template uses a placeholder beyond the definition's parameters.
void validate_templates(const TemplateSet& t, const Repository& repo);

std::string render_statement(const Statement& s, const TemplateSet& t);
std::string render_question(const Statement& s, const TemplateSet& t);
std::string render_clause(const DefinitionInstance& d, const TemplateSet& t);

struct TextualProblem {
  std::vector<std::string> clauses;
  std::string question;
  std::vector<std::string> answer;

  std::string to_text() const;
};

TextualProblem render_text(const QualifiedProblem& problem, const TemplateSet& t);

struct Canvas {
  double width = 400;
  double height = 400;
  double margin = 0.1;  // fraction of each side
};

/// SVG 1.1 drawing of the construction, entry by entry, one element per line.
std::string render_diagram(const ExDefinitionSet& exd, const NumericScene& scene, const Repository& repo,
                           const Canvas& canvas = {});
std::string render_diagram(const QualifiedProblem& problem, const Repository& repo, const Canvas& canvas = {});

}  // namespace geomgen
