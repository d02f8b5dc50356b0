#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "geomgen/errors.hpp"
#include "geomgen/harness.hpp"

using namespace geomgen;
namespace fs = std::filesystem;

namespace {

struct Resources {
  std::string defs, rules, templates;

  void add_options(CLI::App* app) {
    app->add_option("--defs", defs, "definitions file")->check(CLI::ExistingFile);
    app->add_option("--rules", rules, "rules file")->check(CLI::ExistingFile);
  }
  void add_template_option(CLI::App* app) {
    app->add_option("--templates", templates, "text templates file")->check(CLI::ExistingFile);
  }
  Repository repository() {
    auto dir = default_data_dir();
    return Repository::load(defs.empty() ? dir / "defs.sdeg" : fs::path(defs),
                            rules.empty() ? dir / "rules.sdeg" : fs::path(rules));
  }
  TemplateSet template_set(const Repository& repo) {
    auto t = load_templates(templates.empty() ? default_data_dir() / "templates.en.txt" : fs::path(templates));
    validate_templates(t, repo);
    return t;
  }
};

std::vector<std::string> split_kps(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string problem_dir_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "problem-%03zu", i + 1);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry problem generation with a symbolic deduction engine"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;

  Resources res;

  auto* build = app.add_subcommand("build-table", "build the knowledge point to exDefinition mapping table");
  std::string table_out = "k2exd.jsonl";
  long long iterations = 1000;
  int nmax = 2, threads = 0;
  res.add_options(build);
  build->add_option("--out", table_out, "output table (JSONL)");
  build->add_option("--iterations", iterations, "number of sampling iterations (T)");
  build->add_option("--nmax", nmax, "maximum definitions sampled per iteration");
  build->add_option("--threads", threads, "worker threads (0: all cores)");
  build->add_option("--seed", seed, "random seed");

  auto* gen = app.add_subcommand("generate", "generate qualified problems for knowledge points");
  std::string table_in, kps, difficulty = "easy", out_dir = "out";
  int max_candidates = 4, retry_budget = 32;
  bool dump_scene = false;
  res.add_options(gen);
  res.add_template_option(gen);
  gen->add_option("--table", table_in, "mapping table (JSONL)")->required()->check(CLI::ExistingFile);
  gen->add_option("--kps", kps, "comma-separated knowledge point ids, e.g. K_7,K_25")->required();
  gen->add_option("--difficulty", difficulty, "easy | moderate | difficult");
  gen->add_option("--out-dir", out_dir, "output directory");
  gen->add_option("--max-candidates", max_candidates, "maximum number of problems");
  gen->add_option("--retries", retry_budget, "resampling budget");
  gen->add_option("--seed", seed, "random seed");
  gen->add_flag("--dump-scene", dump_scene, "also write scene.json with the coordinates");

  auto* eval = app.add_subcommand("eval", "evaluate generation over a dataset of knowledge point records");
  std::string dataset, report = "report.json";
  res.add_options(eval);
  eval->add_option("--dataset", dataset, "records (JSONL)")->required()->check(CLI::ExistingFile);
  eval->add_option("--table", table_in, "mapping table (JSONL)")->required()->check(CLI::ExistingFile);
  eval->add_option("--report", report, "report output (JSON)");
  eval->add_option("--max-candidates", max_candidates, "maximum number of problems per record");
  eval->add_option("--seed", seed, "random seed");

  auto* render = app.add_subcommand("render", "render a problem.json to text and SVG");
  std::string problem_file;
  res.add_options(render);
  res.add_template_option(render);
  render->add_option("--problem", problem_file, "problem JSON")->required()->check(CLI::ExistingFile);
  render->add_option("--out-dir", out_dir, "output directory");
  render->add_option("--seed", seed, "unused; scenes are rebuilt from the seed stored in the problem");
  render->add_flag("--dump-scene", dump_scene, "also write scene.json with the coordinates");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      auto repo = res.repository();
      TableBuildConfig cfg;
      cfg.T = iterations;
      cfg.n_max = nmax;
      cfg.seed = seed;
      cfg.threads = threads;
      try {
        cfg.validate(repo);
      } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
      }
      auto table = build_table(repo, cfg);
      save_table(table, table_out);
      const auto& st = table.stats;
      std::cout << "iterations " << st.iterations << ", degenerate " << st.degenerate << ", incomplete "
                << st.incomplete << ", without conclusions " << st.no_conclusion << "\n";
      std::cout << "knowledge points with entries: " << table.entries.size() << "\n";
      for (const auto& [kp, n] : table.counts()) std::cout << kp << " " << n << "\n";
      return 0;
    }

    if (*gen) {
      auto repo = res.repository();
      auto templates = res.template_set(repo);
      auto table = load_table(table_in);
      GenerationRequest req;
      req.knowledge_points = split_kps(kps);
      req.difficulty = parse_difficulty(difficulty);
      req.seed = seed;
      req.max_candidates = max_candidates;
      req.retry_budget = retry_budget;
      for (const auto& kp : req.knowledge_points)
        if (!repo.has_rule(kp) || !table.entries.count(kp)) {
          std::cerr << "error: unknown knowledge point " << kp << "\n";
          return 1;
        }
      GenerationDiagnostics diag;
      auto problems = generate(req, table, repo, &diag);
      for (std::size_t i = 0; i < problems.size(); ++i)
        write_problem(problems[i], req, repo, templates, fs::path(out_dir) / problem_dir_name(i), dump_scene);
      std::cout << "qualified " << problems.size() << "\n";
      if (problems.empty()) {
        std::cout << "attempts " << diag.attempts << ", candidates " << diag.candidates << "\n";
        for (const auto& [k, v] : diag.failures) std::cout << "failed " << k << " " << v << "\n";
      }
      return 0;
    }

    if (*eval) {
      auto repo = res.repository();
      auto table = load_table(table_in);
      auto records = load_records(dataset);
      EvalOptions opt;
      opt.seed = seed;
      opt.max_candidates = max_candidates;
      auto rep = evaluate(records, table, repo, opt);
      write_atomic(report, rep.dump(2) + "\n");
      std::cout << "records " << rep["records"] << ", accepted " << rep["accepted_problems"] << "\n";
      for (const char* m : {"NS", "CC", "CKP", "CD"}) std::cout << m << " " << rep["metrics"][m].dump() << "\n";
      return 0;
    }

    if (*render) {
      auto repo = res.repository();
      auto templates = res.template_set(repo);
      auto j = nlohmann::json::parse(read_file(problem_file));
      auto p = problem_from_json(j, repo);
      fs::path dir(out_dir);
      write_atomic(dir / "problem.txt", render_text(p, templates).to_text());
      write_atomic(dir / "problem.svg", render_diagram(p, repo));
      if (dump_scene) write_atomic(dir / "scene.json", scene_json(p.scene).dump(2) + "\n");
      std::cout << "rendered " << (dir / "problem.txt").string() << " and " << (dir / "problem.svg").string() << "\n";
      return 0;
    }
  } catch (const UnknownKP& e) {
    std::cerr << "error: unknown knowledge point " << e.kp() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
