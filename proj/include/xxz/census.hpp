#pragma once

// Table-level drivers shared by the CLI, the Python module and the
// acceptance suite: per-M counts routed to homotopy or T-Q by a path budget,
// degeneracy rows, and the bracket rendering of deviations.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xxz/homotopy.hpp"
#include "xxz/tq.hpp"

namespace xxz {

enum class Route { Trivial, Homotopy, TQ };
std::string to_string(Route r);

struct CensusOptions {
  TrackerConfig tracker;
  long long budget = 20000;  // largest total-degree path count sent to homotopy
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(int N, int M, long long paths);
  int N, M;
  long long paths;
};

long long total_degree_paths(int N, int M, const AnisotropyRegime& regime);

struct MeasuredCount {
  int M = 0;
  Route route = Route::Trivial;
  long long paths = 0;  // total-degree paths when routed to homotopy
  std::vector<SolutionVector> admissible;
  std::vector<int> degeneracies;  // T-Q route only
};

/// Counts for M = 0..N/2 (or just `only_M`). M beyond the budget goes to the
/// T-Q route, which needs N <= 10; otherwise BudgetExceeded.
std::vector<MeasuredCount> measure_counts(int N, const AnisotropyRegime& regime, const CensusOptions& opt,
                                          int only_M = -1);

/// Predicted N(N,M); corrections measured on the chain for p >= 3 (N <= 10),
/// -1 when no prediction is available.
long long predicted_count(int N, int M, const AnisotropyRegime& regime);
/// Same for M = 0..N/2, measuring the corrections once.
std::vector<long long> predicted_counts(int N, const AnisotropyRegime& regime);
/// Predicted D(N,M), -1 when unavailable.
std::vector<long long> predicted_degeneracies(int N, const AnisotropyRegime& regime);

struct TableRow {
  int N = 0;
  std::vector<long long> values;  // indexed by M
  std::vector<std::optional<long long>> brackets;

  /// "1 8 24 [27] 32 [48] 16 [42]"
  std::string render() const;
  nlohmann::json to_json() const;
};

/// d⁰ (d_j for generic q) and dim T_j (2j+1) at j = N/2 - M.
long long count_reference(int N, int M, const AnisotropyRegime& regime);
long long degeneracy_reference(int N, int M, const AnisotropyRegime& regime);

/// Count row with d⁰ (d_j for generic q) in brackets where they differ.
TableRow count_row(int N, const AnisotropyRegime& regime, const std::vector<long long>& counts);
/// D(N,M) row with dim T_j in brackets where D > 0 differs from it.
TableRow degeneracy_row(int N, const AnisotropyRegime& regime, const std::vector<long long>& degeneracies);

/// D(N,M) from the T-Q census; 0 where no admissible solution exists,
/// -1 where the admissible solutions disagree.
std::vector<long long> measured_degeneracies(const TQCensus& census);

}  // namespace xxz
