#include "geomgen/harness.hpp"

#include <chrono>
#include <sstream>

#include "geomgen/errors.hpp"

namespace geomgen {

using nlohmann::ordered_json;

std::vector<DatasetRecord> parse_records(std::string_view text) {
  std::vector<DatasetRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      DatasetRecord r;
      r.id = j.at("id").get<std::string>();
      r.knowledge_points = j.at("knowledge_points").get<std::vector<std::string>>();
      r.source = j.value("source", "custom");
      if (j.contains("difficulty") && !j["difficulty"].is_null())
        r.difficulty = parse_difficulty(j["difficulty"].get<std::string>());
      if (r.knowledge_points.empty()) throw Error("empty knowledge_points");
      if (r.source != "jgex231" && r.source != "geoqa" && r.source != "custom")
        throw Error("unknown source '" + r.source + "'");
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), lineno);
    } catch (const Error& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), lineno);
    }
  }
  return out;
}

std::vector<DatasetRecord> load_records(const std::filesystem::path& path) { return parse_records(read_file(path)); }

Reverification reverify(const QualifiedProblem& p, const GenerationRequest& req, const Repository& repo) {
  Reverification r;
  auto scene = construct_scene(p.exd, repo, p.seed);
  auto state = saturate(all_statements(p.exd, repo), repo.rules(), scene, req.limits);
  r.replays = replay(p.proof, repo.rules(), scene).empty() && state.contains(p.conclusion);
  r.verdict = check(p.exd, p.proof, req, state, repo);
  return r;
}

namespace {

ordered_json rate(long long hits, long long total) {
  if (total == 0) return nullptr;
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

ordered_json evaluate(const std::vector<DatasetRecord>& records, const MappingTable& table, const Repository& repo,
                      const EvalOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  ordered_json per_record = ordered_json::array();
  long long accepted = 0, ns = 0, cc = 0, ckp = 0, cd = 0, with_problem = 0, disagreements = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    GenerationRequest req;
    req.knowledge_points = rec.knowledge_points;
    req.difficulty = rec.difficulty.value_or(Difficulty::Easy);
    req.seed = mix_seed(options.seed, i);
    req.max_candidates = options.max_candidates;
    req.retry_budget = options.retry_budget;
    ordered_json outcome{{"id", rec.id}, {"source", rec.source}, {"knowledge_points", rec.knowledge_points}};
    try {
      GenerationDiagnostics diag;
      auto problems = generate(req, table, repo, &diag);
      outcome["qualified_count"] = problems.size();
      if (!problems.empty()) ++with_problem;
      for (const auto& p : problems) {
        auto r = reverify(p, req, repo);
        ++accepted;
        ns += r.replays;
        cc += r.verdict.clause_complete;
        ckp += r.verdict.kp_complete;
        cd += r.verdict.difficulty;
        disagreements += !(r.replays && r.verdict.passed());
      }
      ordered_json failures = ordered_json::object();
      for (const auto& [k, v] : diag.failures) failures[k] = v;
      outcome["failure_diagnostics"] = {{"attempts", diag.attempts},
                                        {"merge_conflicts", diag.merge_conflicts},
                                        {"disconnected", diag.disconnected},
                                        {"degenerate", diag.degenerate},
                                        {"incomplete", diag.incomplete},
                                        {"candidates", diag.candidates},
                                        {"broken", diag.broken},
                                        {"constraints", failures}};
    } catch (const Error& e) {
      outcome["qualified_count"] = 0;
      outcome["failure_diagnostics"] = {{"error", e.what()}};
    }
    per_record.push_back(std::move(outcome));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const char* human = "requires human evaluation";
  return {{"records", records.size()},
          {"per_record", per_record},
          {"accepted_problems", accepted},
          {"record_yield", rate(with_problem, static_cast<long long>(records.size()))},
          {"metrics",
           {{"NS", rate(ns, accepted)},
            {"CC", rate(cc, accepted)},
            {"CKP", rate(ckp, accepted)},
            {"CD", rate(cd, accepted)},
            {"GF", human},
            {"LC", human},
            {"DC", human},
            {"CS", human}}},
          {"reverification_disagreements", disagreements},
          {"runtime_seconds", secs}};
}

QualifiedProblem problem_from_json(const nlohmann::json& j, const Repository& repo) {
  QualifiedProblem p;
  for (const auto& e : j.at("exdefs")) p.exd.entries.push_back(parse_instance(e.get<std::string>()));
  validate(p.exd, repo);
  p.conclusion = parse_statement(j.at("question_formal").get<std::string>());
  p.seed = j.at("seed").get<std::uint64_t>();
  p.scene = construct_scene(p.exd, repo, p.seed);
  p.proof.conclusion = p.conclusion;
  for (const auto& s : j.at("proof_steps")) {
    ProofStep step;
    step.rule_id = s.at("rule_id").get<std::string>();
    step.derived = parse_statement(s.at("derived").get<std::string>());
    for (const auto& a : s.at("antecedents")) step.antecedents.push_back(parse_statement(a.get<std::string>()));
    p.proof.steps.push_back(std::move(step));
  }
  p.used_rules = p.proof.used_rules();
  return p;
}

ordered_json scene_json(const NumericScene& scene) {
  ordered_json pts = ordered_json::object();
  for (const auto& name : scene.order()) {
    const auto& c = scene.at(name);
    pts[name] = {c.x(), c.y()};
  }
  return {{"seed", scene.seed}, {"tolerance", scene.tolerance}, {"points", pts}};
}

void write_problem(const QualifiedProblem& p, const GenerationRequest& req, const Repository& repo,
                   const TemplateSet& templates, const std::filesystem::path& dir, bool dump_scene) {
  write_atomic(dir / "problem.json", problem_json(p, req, repo).dump(2) + "\n");
  write_atomic(dir / "problem.txt", render_text(p, templates).to_text());
  write_atomic(dir / "problem.svg", render_diagram(p, repo));
  if (dump_scene) write_atomic(dir / "scene.json", scene_json(p.scene).dump(2) + "\n");
}

}  // namespace geomgen
