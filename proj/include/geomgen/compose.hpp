#pragma once

#include <vector>

#include "geomgen/exdef.hpp"
#include "geomgen/numeric.hpp"
#include "geomgen/repository.hpp"

namespace geomgen {

/// Union of several exDefinition sets followed by pruning. Points of the
/// first set keep their names; later sets are renamed apart, and an entry
/// with the same definition over the same (already mapped) dependencies as
/// an unused entry of the union is merged into it. Entries that emit nothing
/// and whose points no other entry uses are then dropped. Throws
/// MergeConflict when the union is not a valid set.
ExDefinitionSet minimal_set(const std::vector<ExDefinitionSet>& sets, const Repository& repo);

/// Renames points to a, b, ..., z, a1, ... in order of introduction.
ExDefinitionSet canonical_names(const ExDefinitionSet& exd, const Repository& repo);

/// The i-th name of the sequence a, ..., z, a1, ..., z1, a2, ...
std::string point_name(std::size_t i);

/// Random set of `n` sampled definitions with fresh point names. Dependencies
/// are drawn from points already present; when too few exist, dependency-free
/// figure definitions are added first.
ExDefinitionSet sample_definitions(const Repository& repo, int n, Rng& rng);

}  // namespace geomgen
