#include "geomgen/compose.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "geomgen/errors.hpp"

namespace geomgen {

std::string point_name(std::size_t i) {
  std::string out(1, static_cast<char>('a' + i % 26));
  if (i >= 26) out += std::to_string(i / 26);
  return out;
}

namespace {

std::vector<std::string> dependencies_of(const DefinitionInstance& inst, const Repository& repo) {
  return BoundInstance(repo, inst).dependencies();
}

std::vector<std::string> introduced_of(const DefinitionInstance& inst, const Repository& repo) {
  return BoundInstance(repo, inst).introduced();
}

DefinitionInstance rename(const DefinitionInstance& inst, const std::map<std::string, std::string>& names) {
  DefinitionInstance out{inst.definition, {}};
  for (const auto& a : inst.args) out.args.push_back(names.at(a));
  return out;
}

ExDefinitionSet prune(ExDefinitionSet exd, const Repository& repo) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<std::string> used;
    for (const auto& e : exd.entries)
      for (const auto& d : dependencies_of(e, repo)) used.insert(d);
    for (std::size_t i = 0; i < exd.entries.size(); ++i) {
      BoundInstance b(repo, exd.entries[i]);
      if (!b.emitted().empty()) continue;
      auto pts = b.introduced();
      if (std::any_of(pts.begin(), pts.end(), [&](const std::string& p) { return used.count(p); })) continue;
      exd.entries.erase(exd.entries.begin() + static_cast<long>(i));
      changed = true;
      break;
    }
  }
  return exd;
}

}  // namespace

ExDefinitionSet minimal_set(const std::vector<ExDefinitionSet>& sets, const Repository& repo) {
  ExDefinitionSet out;
  std::set<std::string> taken;
  std::size_t next_name = 0;
  auto fresh = [&] {
    while (taken.count(point_name(next_name))) ++next_name;
    return point_name(next_name++);
  };
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto& set = sets[k];
    std::map<std::string, std::string> names;
    std::vector<bool> matched(out.entries.size(), false);
    for (const auto& inst : set.entries) {
      auto deps = dependencies_of(inst, repo);
      auto intro = introduced_of(inst, repo);
      std::vector<std::string> mapped_deps;
      for (const auto& d : deps) {
        auto it = names.find(d);
        if (it == names.end()) throw MergeConflict("'" + format_instance(inst) + "' uses unconstructed point " + d);
        mapped_deps.push_back(it->second);
      }
      bool merged = false;
      for (std::size_t j = 0; j < matched.size() && !merged; ++j) {
        const auto& cand = out.entries[j];
        if (matched[j] || cand.definition != inst.definition) continue;
        if (dependencies_of(cand, repo) != mapped_deps) continue;
        auto cand_intro = introduced_of(cand, repo);
        for (std::size_t i = 0; i < intro.size(); ++i) names[intro[i]] = cand_intro[i];
        matched[j] = merged = true;
      }
      if (merged) continue;
      for (const auto& p : intro) {
        if (names.count(p)) throw MergeConflict("point " + p + " introduced twice");
        names[p] = k == 0 && !taken.count(p) ? p : fresh();
        taken.insert(names[p]);
      }
      out.entries.push_back(rename(inst, names));
    }
  }
  out = prune(std::move(out), repo);
  try {
    validate(out, repo);
  } catch (const Error& e) {
    throw MergeConflict(e.what());
  }
  return out;
}

ExDefinitionSet canonical_names(const ExDefinitionSet& exd, const Repository& repo) {
  std::map<std::string, std::string> names;
  for (const auto& inst : exd.entries)
    for (const auto& p : introduced_of(inst, repo)) names.emplace(p, point_name(names.size()));
  ExDefinitionSet out;
  for (const auto& inst : exd.entries) out.entries.push_back(rename(inst, names));
  return out;
}

ExDefinitionSet sample_definitions(const Repository& repo, int n, Rng& rng) {
  std::vector<const DefinitionEntry*> figures;
  for (const auto& d : repo.definitions())
    if (d.dependencies.empty()) figures.push_back(&d);
  const auto& defs = repo.definitions();
  ExDefinitionSet out;
  std::vector<std::string> pool;
  auto add = [&](const DefinitionEntry& def, const std::vector<std::string>& deps) {
    std::map<std::string, std::string> bind;
    for (std::size_t i = 0; i < def.dependencies.size(); ++i) bind[def.dependencies[i]] = deps[i];
    DefinitionInstance inst{def.name, {}};
    for (const auto& p : def.params) {
      if (!bind.count(p)) {
        bind[p] = point_name(pool.size());
        pool.push_back(bind[p]);
      }
      inst.args.push_back(bind[p]);
    }
    out.entries.push_back(std::move(inst));
  };
  for (int i = 0; i < n; ++i) {
    const DefinitionEntry& def = defs[rng.index(defs.size())];
    std::size_t need = def.dependencies.size();
    while (pool.size() < need) add(*figures[rng.index(figures.size())], {});
    std::vector<std::string> choice = pool;
    for (std::size_t j = 0; j < need; ++j) std::swap(choice[j], choice[j + rng.index(choice.size() - j)]);
    choice.resize(need);
    add(def, choice);
  }
  return out;
}

}  // namespace geomgen
