#include "geomgen/mapping_table.hpp"

#include <atomic>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "geomgen/compose.hpp"
#include "geomgen/errors.hpp"
#include "geomgen/numeric.hpp"
#include "geomgen/proof.hpp"

namespace geomgen {

using nlohmann::ordered_json;

void TableBuildConfig::validate(const Repository& repo) const {
  if (T < 1) throw ConfigError("T must be at least 1, got " + std::to_string(T));
  if (n_max < 1 || n_max > static_cast<int>(repo.definitions().size()))
    throw ConfigError("n_max must lie in [1, " + std::to_string(repo.definitions().size()) + "], got " +
                      std::to_string(n_max));
  if (threads < 0) throw ConfigError("threads must be non-negative");
}

std::map<std::string, long long> MappingTable::counts() const {
  std::map<std::string, long long> out;
  for (const auto& [kp, sets] : entries) out[kp] = static_cast<long long>(sets.size());
  return out;
}

bool MappingTable::insert(const std::string& kp, const ExDefinitionSet& exd) {
  auto& list = entries[kp];
  std::string key = serialize(exd);
  for (const auto& s : list)
    if (serialize(s) == key) return false;
  list.push_back(exd);
  return true;
}

std::set<std::string> rules_used(const ProofState& state) {
  std::set<std::string> out;
  for (const auto& c : enumerate_conclusions(state)) {
    try {
      auto dag = traceback(state, c);
      for (const auto& s : dag.steps)
        if (!s.algebraic()) out.insert(s.rule_id);
    } catch (const NotDerived&) {
    }
  }
  return out;
}

namespace {

enum class Outcome { ok, degenerate, merge_conflict, incomplete, no_conclusion };

struct IterationResult {
  Outcome outcome = Outcome::ok;
  ExDefinitionSet exd;
  std::set<std::string> rules;
};

IterationResult run_iteration(const Repository& repo, const TableBuildConfig& cfg, long long i) {
  IterationResult r;
  std::uint64_t seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
  Rng rng(seed);
  int n = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(cfg.n_max)));
  try {
    r.exd = canonical_names(minimal_set({sample_definitions(repo, n, rng)}, repo), repo);
  } catch (const MergeConflict&) {
    r.outcome = Outcome::merge_conflict;
    return r;
  }
  std::optional<NumericScene> scene;
  try {
    scene = construct_scene(r.exd, repo, mix_seed(seed, 1));
  } catch (const Error&) {
    r.outcome = Outcome::degenerate;
    return r;
  }
  auto state = saturate(all_statements(r.exd, repo), repo.rules(), *scene, cfg.limits);
  if (!state.complete) {
    r.outcome = Outcome::incomplete;
    return r;
  }
  r.rules = rules_used(state);
  if (r.rules.empty()) r.outcome = Outcome::no_conclusion;
  return r;
}

}  // namespace

MappingTable build_table(const Repository& repo, const TableBuildConfig& config) {
  config.validate(repo);
  std::vector<IterationResult> results(static_cast<std::size_t>(config.T));
  std::atomic<long long> next{0};
  auto worker = [&] {
    for (long long i; (i = next++) < config.T;) results[static_cast<std::size_t>(i)] = run_iteration(repo, config, i);
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(config.T)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  MappingTable table;
  table.build_config = config;
  auto& st = table.stats;
  st.iterations = config.T;
  for (const auto& r : results) {
    switch (r.outcome) {
      case Outcome::degenerate: ++st.degenerate; continue;
      case Outcome::merge_conflict: ++st.merge_conflicts; continue;
      case Outcome::incomplete: ++st.incomplete; continue;
      case Outcome::no_conclusion: ++st.no_conclusion; continue;
      case Outcome::ok: break;
    }
    for (const auto& kp : r.rules) (table.insert(kp, r.exd) ? st.inserted : st.duplicates)++;
  }
  return table;
}

ExDefinitionSet sample_exdefs(const MappingTable& table, const std::string& kp, std::uint64_t rng_seed) {
  auto it = table.entries.find(kp);
  if (it == table.entries.end()) throw UnknownKP(kp);
  if (it->second.empty()) throw EmptyEntry("no exDefinition set stored for " + kp);
  Rng rng(mix_seed(rng_seed, 0x6b32));
  return it->second[rng.index(it->second.size())];
}

namespace {

ordered_json config_json(const TableBuildConfig& c) {
  return {{"T", c.T},
          {"n_max", c.n_max},
          {"seed", c.seed},
          {"max_facts", c.limits.max_facts},
          {"max_rounds", c.limits.max_rounds},
          {"max_derivations_per_fact", c.limits.max_derivations_per_fact}};
}

TableBuildConfig config_from_json(const nlohmann::json& j) {
  TableBuildConfig c;
  c.T = j.value("T", c.T);
  c.n_max = j.value("n_max", c.n_max);
  c.seed = j.value("seed", c.seed);
  c.limits.max_facts = j.value("max_facts", c.limits.max_facts);
  c.limits.max_rounds = j.value("max_rounds", c.limits.max_rounds);
  c.limits.max_derivations_per_fact = j.value("max_derivations_per_fact", c.limits.max_derivations_per_fact);
  return c;
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_table(const MappingTable& table, const std::filesystem::path& path) {
  std::string out;
  ordered_json header{{"format", "k2exd"}, {"version", kTableFormatVersion}, {"build_config", config_json(table.build_config)}};
  out += header.dump() + "\n";
  for (const auto& [kp, sets] : table.entries)
    for (const auto& exd : sets) {
      ordered_json entries = ordered_json::array();
      for (const auto& e : exd.entries) entries.push_back(format_instance(e));
      out += ordered_json{{"kp", kp}, {"exdef", entries}}.dump() + "\n";
    }
  write_atomic(path, out);
}

MappingTable load_table(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  MappingTable table;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": malformed record: " + e.what(), lineno);
    }
    if (!header) {
      if (!j.is_object() || j.value("format", "") != "k2exd") throw ParseError("missing k2exd header", lineno);
      if (j.value("version", -1) != kTableFormatVersion)
        throw Error("unsupported table version " + j.value("version", nlohmann::json(nullptr)).dump() + " (expected " +
                    std::to_string(kTableFormatVersion) + ")");
      if (j.contains("build_config")) table.build_config = config_from_json(j["build_config"]);
      header = true;
      continue;
    }
    try {
      if (!j.is_object() || !j.contains("kp") || !j.contains("exdef") || !j["exdef"].is_array())
        throw Error("expected {kp, exdef}");
      ExDefinitionSet exd;
      for (const auto& e : j["exdef"]) exd.entries.push_back(parse_instance(e.get<std::string>()));
      table.insert(j["kp"].get<std::string>(), exd);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), lineno);
    } catch (const Error& e) {
      throw ParseError(path.string() + ": " + e.what(), lineno);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), lineno);
    }
  }
  if (!header) throw ParseError(path.string() + ": empty table file", 0);
  return table;
}

}  // namespace geomgen
