#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomgen/generator.hpp"
#include "geomgen/mapping_table.hpp"
#include "geomgen/rendering.hpp"

namespace geomgen {

struct DatasetRecord {
  std::string id;
  std::vector<std::string> knowledge_points;
  std::string source;  // "jgex231" | "geoqa" | "custom"
  std::optional<Difficulty> difficulty;
};

/// One JSON object per line: {"id", "knowledge_points", "source", "difficulty"?}.
/// Throws ParseError naming the line of a malformed record.
std::vector<DatasetRecord> parse_records(std::string_view text);
std::vector<DatasetRecord> load_records(const std::filesystem::path& path);

struct EvalOptions {
  std::uint64_t seed = 0;
  int max_candidates = 4;
  int retry_budget = 32;
};

/// Generates for every record, re-verifies each accepted problem from
/// scratch (new scene, new saturation, replay and check), and aggregates the
/// automatic proxies NS (proof replays), CC (every clause used), CKP (every
/// requested knowledge point used) and CD (difficulty band matches). Rates
/// are null when nothing was accepted.
nlohmann::ordered_json evaluate(const std::vector<DatasetRecord>& records, const MappingTable& table,
                                const Repository& repo, const EvalOptions& options);

struct Reverification {
  bool replays = false;
  CheckVerdict verdict;
};

/// Rebuilds the scene from the problem's seed, saturates again and checks
/// the stored proof against the fresh state.
Reverification reverify(const QualifiedProblem& p, const GenerationRequest& req, const Repository& repo);

/// Rebuilds a problem from its JSON (scene recomputed from exdefs + seed).
QualifiedProblem problem_from_json(const nlohmann::json& j, const Repository& repo);

nlohmann::ordered_json scene_json(const NumericScene& scene);

/// Writes problem.json, problem.txt and problem.svg (and scene.json when
/// `dump_scene`) into `dir`.
void write_problem(const QualifiedProblem& p, const GenerationRequest& req, const Repository& repo,
                   const TemplateSet& templates, const std::filesystem::path& dir, bool dump_scene);

}  // namespace geomgen
