#include "geomgen/exdef.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "geomgen/errors.hpp"

namespace geomgen {

std::string format_instance(const DefinitionInstance& d) {
  std::string out = d.definition;
  for (const auto& a : d.args) out += " " + a;
  return out;
}

DefinitionInstance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  DefinitionInstance d;
  if (!(in >> d.definition)) throw ParseError("empty definition instance");
  std::string w;
  while (in >> w) {
    auto p = normalize_point(w);
    if (!p) throw ParseError("invalid point '" + w + "'");
    d.args.push_back(*p);
  }
  return d;
}

BoundInstance::BoundInstance(const Repository& repo, const DefinitionInstance& inst)
    : entry_(&repo.definition(inst.definition)), inst_(inst) {
  if (inst.args.size() != entry_->params.size())
    throw Error("definition '" + inst.definition + "' expects " + std::to_string(entry_->params.size()) +
                " points, got " + std::to_string(inst.args.size()));
  for (std::size_t i = 0; i < inst.args.size(); ++i) binding_[entry_->params[i]] = inst.args[i];
}

Statement BoundInstance::bind(const Statement& s) const {
  Statement out{s.pred, {}};
  for (const auto& a : s.args) out.args.push_back(binding_.at(a));
  return out;
}

std::vector<std::string> BoundInstance::introduced() const {
  std::vector<std::string> out;
  for (const auto& p : entry_->introduced) out.push_back(binding_.at(p));
  return out;
}

std::vector<std::string> BoundInstance::dependencies() const {
  std::vector<std::string> out;
  for (const auto& p : entry_->dependencies) out.push_back(binding_.at(p));
  return out;
}

std::vector<Statement> BoundInstance::emitted() const {
  std::vector<Statement> out;
  for (const auto& s : entry_->emitted) out.push_back(bind(s));
  return out;
}

std::vector<Statement> BoundInstance::guards() const {
  std::vector<Statement> out;
  for (const auto& s : entry_->guards) out.push_back(bind(s));
  return out;
}

std::vector<RecipeStep> BoundInstance::recipe() const {
  auto rename = [&](std::vector<std::string>& pts) {
    for (auto& p : pts) p = binding_.at(p);
  };
  std::vector<RecipeStep> out = entry_->recipe;
  for (auto& step : out) {
    step.target = binding_.at(step.target);
    for (auto& a : step.args) {
      if (auto p = std::get_if<std::string>(&a)) *p = binding_.at(*p);
      if (auto l = std::get_if<LineSpec>(&a)) rename(l->points);
      if (auto c = std::get_if<CircleSpec>(&a)) rename(c->points);
    }
  }
  return out;
}

void validate(const ExDefinitionSet& exd, const Repository& repo) {
  std::set<std::string> built;
  for (const auto& inst : exd.entries) {
    BoundInstance b(repo, inst);
    for (const auto& p : b.introduced())
      if (std::count(inst.args.begin(), inst.args.end(), p) != 1)
        throw Error("'" + format_instance(inst) + "' repeats a point");
    for (const auto& d : b.dependencies())
      if (!built.count(d)) throw Error("'" + format_instance(inst) + "' depends on unconstructed point '" + d + "'");
    for (const auto& p : b.introduced())
      if (!built.insert(p).second) throw Error("point '" + p + "' introduced twice");
  }
}

std::vector<std::string> points_of(const ExDefinitionSet& exd, const Repository& repo) {
  std::vector<std::string> out;
  for (const auto& inst : exd.entries)
    for (const auto& p : BoundInstance(repo, inst).introduced()) out.push_back(p);
  return out;
}

namespace {
std::vector<Statement> collect(const ExDefinitionSet& exd, const Repository& repo, bool guards) {
  std::vector<Statement> out;
  std::set<Statement> seen;
  for (const auto& inst : exd.entries) {
    BoundInstance b(repo, inst);
    for (const auto& s : guards ? b.guards() : b.emitted()) {
      auto c = canonicalize(s);
      if (seen.insert(c).second) out.push_back(c);
    }
  }
  return out;
}
}  // namespace

std::vector<Statement> all_statements(const ExDefinitionSet& exd, const Repository& repo) {
  return collect(exd, repo, false);
}

std::vector<Statement> all_guards(const ExDefinitionSet& exd, const Repository& repo) {
  return collect(exd, repo, true);
}

std::string serialize(const ExDefinitionSet& exd) {
  std::string out;
  for (std::size_t i = 0; i < exd.entries.size(); ++i) {
    if (i) out += "; ";
    out += format_instance(exd.entries[i]);
  }
  return out;
}

}  // namespace geomgen
