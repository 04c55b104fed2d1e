#pragma once

// Tabulated counts, degeneracies and roots compiled into the library.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xxz/bethe.hpp"
#include "xxz/census.hpp"

namespace xxz {

/// {"counts"|"degeneracies": {regime: {N: {values, brackets}}}}
const nlohmann::json& reference_tables();
/// {"solutions": [{regime, N, M, index, roots}]}
const nlohmann::json& reference_roots();

/// Tabulated admissible solutions, canonically sorted; empty when none are tabulated.
std::vector<SolutionVector> reference_solutions(const AnisotropyRegime& regime, int N, int M);
bool has_reference_solutions(const AnisotropyRegime& regime, int N, int M);

enum class TableKind { Counts, Degeneracies };
std::optional<TableRow> reference_row(TableKind kind, const AnisotropyRegime& regime, int N);

struct GoldenComparison {
  int expected = 0;
  int matched = 0;
  std::vector<SolutionVector> missing, extra;
  bool ok() const { return missing.empty() && extra.empty(); }
};

/// Matches root sets coordinate-wise within `tol` after canonicalization.
GoldenComparison compare_solutions(const std::vector<SolutionVector>& measured,
                                   const std::vector<SolutionVector>& expected, double tol = 1e-8);

}  // namespace xxz
