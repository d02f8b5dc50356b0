#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geomgen/repository.hpp"
#include "geomgen/statement.hpp"

namespace geomgen {

/// A definition applied to concrete points; `args` is parallel to the
/// definition's `params`.
struct DefinitionInstance {
  std::string definition;
  std::vector<std::string> args;

  auto operator<=>(const DefinitionInstance&) const = default;
  bool operator==(const DefinitionInstance&) const = default;
};

std::string format_instance(const DefinitionInstance& d);
DefinitionInstance parse_instance(std::string_view text);

/// Topologically ordered list of instantiated definitions.
struct ExDefinitionSet {
  std::vector<DefinitionInstance> entries;

  bool operator==(const ExDefinitionSet&) const = default;
};

/// Resolves one instance against its definition.
class BoundInstance {
 public:
  BoundInstance(const Repository& repo, const DefinitionInstance& inst);

  const DefinitionEntry& entry() const { return *entry_; }
  const DefinitionInstance& instance() const { return inst_; }
  std::vector<std::string> introduced() const;
  std::vector<std::string> dependencies() const;
  std::vector<Statement> emitted() const;
  std::vector<Statement> guards() const;
  std::vector<RecipeStep> recipe() const;
  const std::string& point(const std::string& param) const { return binding_.at(param); }

 private:
  Statement bind(const Statement& s) const;

  const DefinitionEntry* entry_;
  DefinitionInstance inst_;
  std::map<std::string, std::string> binding_;
};

/// Throws Error when the set violates its invariants: unknown definition,
/// arity mismatch, dependency not yet constructed, point introduced twice.
void validate(const ExDefinitionSet& exd, const Repository& repo);

std::vector<std::string> points_of(const ExDefinitionSet& exd, const Repository& repo);

/// All emitted statements, canonicalized, deduplicated, in construction order.
std::vector<Statement> all_statements(const ExDefinitionSet& exd, const Repository& repo);
std::vector<Statement> all_guards(const ExDefinitionSet& exd, const Repository& repo);

/// One line per entry, `; `-joined; stable key for duplicate detection.
std::string serialize(const ExDefinitionSet& exd);

}  // namespace geomgen
