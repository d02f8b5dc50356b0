#include "geomgen/generator.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <optional>

#include "geomgen/compose.hpp"
#include "geomgen/errors.hpp"

namespace geomgen {

using nlohmann::ordered_json;

std::string difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Moderate: return "Moderate";
    case Difficulty::Difficult: return "Difficult";
  }
  return "Easy";
}

Difficulty parse_difficulty(const std::string& s) {
  std::string t;
  for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "easy") return Difficulty::Easy;
  if (t == "moderate") return Difficulty::Moderate;
  if (t == "difficult") return Difficulty::Difficult;
  throw ConfigError("unknown difficulty '" + s + "'");
}

Difficulty classify_difficulty(int step_count) {
  if (step_count < 10) return Difficulty::Easy;
  if (step_count <= 20) return Difficulty::Moderate;
  return Difficulty::Difficult;
}

namespace {

/// Marks every entry that introduces a dependency of a marked entry, so an
/// entry counts as used when a used construction needs its points.
void close_over_dependencies(const ExDefinitionSet& exd, const Repository& repo, std::vector<bool>& used) {
  std::map<std::string, std::size_t> introducer;
  std::vector<std::vector<std::string>> deps;
  for (std::size_t i = 0; i < exd.entries.size(); ++i) {
    BoundInstance b(repo, exd.entries[i]);
    for (const auto& p : b.introduced()) introducer[p] = i;
    deps.push_back(b.dependencies());
  }
  for (std::size_t i = exd.entries.size(); i-- > 0;)
    if (used[i])
      for (const auto& p : deps[i]) used[introducer.at(p)] = true;
}

}  // namespace

std::vector<std::size_t> unused_entries(const ExDefinitionSet& exd, const ProofPath& proof, const Repository& repo) {
  std::set<std::string> points;
  std::set<Statement> premises;
  auto note = [&](const Statement& s) { points.insert(s.args.begin(), s.args.end()); };
  for (const auto& p : proof.premises) {
    note(p);
    premises.insert(storage_form(p));
  }
  for (const auto& step : proof.steps) {
    for (const auto& a : step.antecedents) note(a);
    for (const auto& g : step.guards) note(g);
  }
  std::vector<bool> used(exd.entries.size(), false);
  for (std::size_t i = 0; i < exd.entries.size(); ++i) {
    BoundInstance b(repo, exd.entries[i]);
    auto intro = b.introduced();
    auto emitted = b.emitted();
    used[i] = std::any_of(intro.begin(), intro.end(), [&](const std::string& p) { return points.count(p); }) ||
              std::any_of(emitted.begin(), emitted.end(),
                          [&](const Statement& s) { return premises.count(storage_form(s)); });
  }
  close_over_dependencies(exd, repo, used);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) out.push_back(i);
  return out;
}

namespace {

constexpr int kConnectDraws = 16;
constexpr std::uint64_t kConnectStride = 0x100;

CheckVerdict check_without_shortest(const ExDefinitionSet& exd, const ProofPath& proof, const GenerationRequest& req,
                                    const Repository& repo) {
  CheckVerdict v;
  auto used = proof.used_rules();
  v.kp_complete = std::all_of(req.knowledge_points.begin(), req.knowledge_points.end(),
                              [&](const std::string& kp) { return used.count(kp); });
  v.clause_complete = unused_entries(exd, proof, repo).empty();
  v.difficulty = proof.step_count() >= 1 && classify_difficulty(proof.step_count()) == req.difficulty;
  return v;
}

struct Ancestry {
  std::set<std::string> rules;
  std::set<std::string> points;
};

/// Rules and points over every recorded derivation among the ancestors of
/// `c`; any proof of `c` draws its rules and points from these.
Ancestry ancestry(const ProofState& state, FactId id) {
  Ancestry out;
  std::vector<bool> seen(state.facts().size(), false);
  std::vector<FactId> stack{id};
  seen[id] = true;
  while (!stack.empty()) {
    FactId f = stack.back();
    stack.pop_back();
    const auto& fact = state.fact(f);
    out.points.insert(fact.stmt.args.begin(), fact.stmt.args.end());
    for (const auto& d : fact.derivations) {
      if (d.kind == Derivation::Kind::rule) out.rules.insert(d.rule_id);
      for (const auto& g : d.guards) out.points.insert(g.args.begin(), g.args.end());
      for (FactId a : d.antecedents)
        if (!seen[a]) {
          seen[a] = true;
          stack.push_back(a);
        }
    }
  }
  return out;
}

bool may_use_all(const Ancestry& a, const std::vector<std::string>& kps) {
  return std::all_of(kps.begin(), kps.end(), [&](const std::string& kp) { return a.rules.count(kp); });
}

bool may_use_every_entry(const Ancestry& a, const ExDefinitionSet& exd, const Repository& repo) {
  std::vector<bool> used(exd.entries.size(), false);
  for (std::size_t i = 0; i < exd.entries.size(); ++i) {
    BoundInstance b(repo, exd.entries[i]);
    auto intro = b.introduced();
    auto emitted = b.emitted();
    auto seen = [&](const std::string& p) { return a.points.count(p) != 0; };
    used[i] = std::any_of(intro.begin(), intro.end(), seen) ||
              std::any_of(emitted.begin(), emitted.end(),
                          [&](const Statement& s) { return std::all_of(s.args.begin(), s.args.end(), seen); });
  }
  close_over_dependencies(exd, repo, used);
  return std::all_of(used.begin(), used.end(), [](bool b) { return b; });
}

/// Whether the entries form one figure, i.e. are linked through shared points.
bool connected(const ExDefinitionSet& exd) {
  if (exd.entries.empty()) return true;
  std::set<std::string> reached(exd.entries[0].args.begin(), exd.entries[0].args.end());
  std::vector<bool> joined(exd.entries.size(), false);
  joined[0] = true;
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < exd.entries.size(); ++i) {
      if (joined[i]) continue;
      const auto& args = exd.entries[i].args;
      if (std::none_of(args.begin(), args.end(), [&](const std::string& p) { return reached.count(p); })) continue;
      reached.insert(args.begin(), args.end());
      joined[i] = grew = true;
    }
  }
  return std::all_of(joined.begin(), joined.end(), [](bool b) { return b; });
}

}  // namespace

CheckVerdict check(const ExDefinitionSet& exd, const ProofPath& proof, const GenerationRequest& req,
                   const ProofState& state, const Repository& repo) {
  CheckVerdict v = check_without_shortest(exd, proof, req, repo);
  try {
    auto best = prune(traceback(state, proof.conclusion));
    auto id = state.find(proof.conclusion);
    int dp = derivation_costs(state)[*id];
    v.shortest = proof.step_count() == best.step_count() && proof.step_count() <= dp;
  } catch (const Error&) {
    v.shortest = false;
  }
  return v;
}

std::vector<QualifiedProblem> generate(const GenerationRequest& req, const MappingTable& table, const Repository& repo,
                                       GenerationDiagnostics* diagnostics) {
  GenerationDiagnostics local;
  GenerationDiagnostics& diag = diagnostics ? *diagnostics : local;
  if (req.knowledge_points.empty()) throw ConfigError("no knowledge point requested");
  for (const auto& kp : req.knowledge_points) {
    if (!repo.has_rule(kp)) throw UnknownKP(kp);
    if (!table.entries.count(kp)) throw UnknownKP(kp);
  }
  std::vector<QualifiedProblem> out;
  std::set<std::string> tried;
  for (int attempt = 0; attempt < req.retry_budget && static_cast<int>(out.size()) < req.max_candidates; ++attempt) {
    ++diag.attempts;
    std::uint64_t seed = mix_seed(req.seed, static_cast<std::uint64_t>(attempt));
    ExDefinitionSet exd;
    bool merged = false;
    for (int draw = 0; draw < kConnectDraws && !merged; ++draw) {
      std::vector<ExDefinitionSet> sampled;
      for (std::size_t k = 0; k < req.knowledge_points.size(); ++k)
        sampled.push_back(sample_exdefs(table, req.knowledge_points[k], mix_seed(seed, k + kConnectStride * draw)));
      try {
        exd = minimal_set(sampled, repo);
      } catch (const MergeConflict&) {
        ++diag.merge_conflicts;
        continue;
      }
      if (connected(exd))
        merged = true;
      else
        ++diag.disconnected;
    }
    if (!merged) continue;
    std::string key = serialize(exd);
    if (!tried.insert(key).second) continue;
    std::uint64_t scene_seed = mix_seed(seed, 0x5ce7e);
    std::optional<NumericScene> scene;
    try {
      scene = construct_scene(exd, repo, scene_seed);
    } catch (const Error&) {
      ++diag.degenerate;
      continue;
    }
    auto state = saturate(all_statements(exd, repo), repo.rules(), *scene, req.limits);
    if (!state.complete) {
      ++diag.incomplete;
      continue;
    }
    for (const auto& c : enumerate_conclusions(state)) {
      if (static_cast<int>(out.size()) >= req.max_candidates) break;
      auto a = ancestry(state, *state.find(c));
      if (!may_use_all(a, req.knowledge_points)) {
        ++diag.failures["knowledge_points"];
        continue;
      }
      if (!may_use_every_entry(a, exd, repo)) {
        ++diag.failures["clauses"];
        continue;
      }
      ++diag.candidates;
      ProofPath path;
      try {
        path = prune(traceback(state, c));
      } catch (const Error&) {
        ++diag.broken;
        continue;
      }
      auto cheap = check_without_shortest(exd, path, req, repo);
      bool full = cheap.kp_complete && cheap.clause_complete && cheap.difficulty;
      auto v = full ? check(exd, path, req, state, repo) : cheap;
      if (full && !v.shortest) ++diag.failures["shortest"];
      if (!v.kp_complete) ++diag.failures["knowledge_points"];
      if (!v.clause_complete) ++diag.failures["clauses"];
      if (!v.difficulty) ++diag.failures["difficulty"];
      if (!v.passed()) continue;
      QualifiedProblem p;
      p.exd = exd;
      p.conclusion = c;
      p.used_rules = path.used_rules();
      p.proof = std::move(path);
      p.scene = *scene;
      p.seed = scene_seed;
      out.push_back(std::move(p));
    }
  }
  return out;
}

ordered_json request_json(const GenerationRequest& req) {
  return {{"knowledge_points", req.knowledge_points},
          {"difficulty", difficulty_name(req.difficulty)},
          {"seed", req.seed},
          {"max_candidates", req.max_candidates}};
}

ordered_json problem_json(const QualifiedProblem& p, const GenerationRequest& req, const Repository& repo) {
  ordered_json exdefs = ordered_json::array();
  for (const auto& e : p.exd.entries) exdefs.push_back(format_instance(e));
  ordered_json clauses = ordered_json::array();
  for (const auto& s : all_statements(p.exd, repo)) clauses.push_back(format_statement(s));
  return {{"request", request_json(req)},
          {"exdefs", exdefs},
          {"clauses_formal", clauses},
          {"question_formal", format_statement(p.conclusion)},
          {"proof_steps", to_json(p.proof)["steps"]},
          {"used_rules", p.used_rules},
          {"step_count", p.proof.step_count()},
          {"difficulty", difficulty_name(classify_difficulty(p.proof.step_count()))},
          {"seed", p.seed}};
}

}  // namespace geomgen
