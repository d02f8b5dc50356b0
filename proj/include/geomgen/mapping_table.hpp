#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "geomgen/engine.hpp"
#include "geomgen/exdef.hpp"
#include "geomgen/repository.hpp"

namespace geomgen {

struct TableBuildConfig {
  long long T = 1000;
  int n_max = 2;
  std::uint64_t seed = 0;
  EngineLimits limits{};
  int threads = 0;  // 0: hardware concurrency

  /// Throws ConfigError unless T >= 1 and 1 <= n_max <= repository size.
  void validate(const Repository& repo) const;
};

struct TableBuildStats {
  long long iterations = 0;
  long long degenerate = 0;    // scene construction failed
  long long merge_conflicts = 0;
  long long incomplete = 0;    // saturation hit a limit
  long long no_conclusion = 0;
  long long inserted = 0;      // (kp, set) pairs added
  long long duplicates = 0;    // pairs already present
};

/// Knowledge point id -> exDefinition sets whose proofs use it.
struct MappingTable {
  std::map<std::string, std::vector<ExDefinitionSet>> entries;
  TableBuildConfig build_config;
  TableBuildStats stats;

  std::map<std::string, long long> counts() const;
  /// Inserts unless an equal set (by serialization) is already stored.
  bool insert(const std::string& kp, const ExDefinitionSet& exd);

  bool operator==(const MappingTable& o) const { return entries == o.entries; }
};

/// Rule ids used on the pruned proof of any conclusion of a saturated state.
std::set<std::string> rules_used(const ProofState& state);

/// Offline construction: T independent iterations, each seeded with
/// mix_seed(config.seed, i), inserting the minimal set under every rule its
/// proofs use. The result does not depend on the thread count.
MappingTable build_table(const Repository& repo, const TableBuildConfig& config);

/// Uniform choice among the sets of `kp`, deterministic in `rng_seed`.
/// Throws UnknownKP for an id absent from the table, EmptyEntry when its
/// list is empty.
ExDefinitionSet sample_exdefs(const MappingTable& table, const std::string& kp, std::uint64_t rng_seed);

inline constexpr int kTableFormatVersion = 1;

/// JSONL: a header record {"format":"k2exd","version":1,"build_config":{...}}
/// then one {"kp":..., "exdef":[...]} record per stored set. Written atomically.
void save_table(const MappingTable& table, const std::filesystem::path& path);
/// Throws ParseError naming the line for malformed records and Error on a
/// format or version mismatch.
MappingTable load_table(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace geomgen
