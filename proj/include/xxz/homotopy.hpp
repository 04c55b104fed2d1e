#pragma once

// Total-degree homotopy continuation for the Bethe polynomial systems.
// Paths are tracked in projective coordinates on a random affine patch, so
// solutions at infinity stay bounded and are recognised by Z0 -> 0.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "xxz/bethe.hpp"
#include "xxz/poly.hpp"

namespace xxz {

struct TrackerConfig {
  std::uint64_t seed = 1;
  double step_min = 1e-7;
  double step_max = 0.1;
  double refine_tol = 1e-12;
  double divergence_bound = 1e8;
  int max_newton = 3;
  int threads = 0;  // 0: XXZ_THREADS or hardware concurrency
  bool polish = true;
};

enum class PathStatus { Converged, Diverged, Singular, Truncated };
std::string to_string(PathStatus s);

struct TrackedPath {
  std::vector<cplx> start;
  std::vector<cplx> end;  // affine coordinates; empty when Diverged
  PathStatus status = PathStatus::Truncated;
  int steps = 0;
  double final_residual = 0.0;
  double condition_estimate = 0.0;
};

struct SolveResult {
  std::vector<TrackedPath> paths;  // ordered by start index
  long long converged = 0, diverged = 0, singular = 0, truncated = 0;
  long long recovered = 0;  // singular endpoints kept after polishing
  bool accounting_ok() const {
    return converged + diverged + singular + truncated == static_cast<long long>(paths.size());
  }
};

/// Tracks every start point of x_k^{d_k} = 1 to the target system.
SolveResult solve_all(const PolySystem& system, const TrackerConfig& cfg);
SolveResult solve_all(const HomogeneousSystem& system, const TrackerConfig& cfg);

struct RefineResult {
  std::vector<cplx> point;
  double residual = 0.0;  // max |F_k| / scale_k
  double condition = 0.0;
  bool singular = false;
  int iterations = 0;
};

/// Affine Newton refinement; flags Singular when cond(J) > 1e12 or the
/// iteration does not settle.
RefineResult refine(const std::vector<cplx>& point, const HomogeneousSystem& system, double tol,
                    int max_iter);

/// Newton polish of Bethe roots in ~50-digit arithmetic.
std::vector<cplx> polish_extended(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime,
                                  int max_iter = 8);

struct DedupedSolution {
  SolutionVector solution;
  int endpoint_count = 0;  // number of converged paths landing on it
};

/// Canonicalizes, merges duplicates and classifies.
std::vector<DedupedSolution> dedupe(const std::vector<std::vector<cplx>>& endpoints, int N,
                                    const AnisotropyRegime& regime, double tol = 1e-8);

/// Same root multiset up to tol (relative, per root).
bool same_roots(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol);

struct HomotopyCensus {
  AnisotropyRegime regime;
  int N = 0, M = 0;
  long long paths = 0;
  long long converged = 0, diverged = 0, singular = 0, truncated = 0;
  long long recovered = 0;  // singular endpoints kept after polishing
  std::vector<DedupedSolution> solutions;  // all verdicts
  std::vector<SolutionVector> admissible;
  int expected_redundancy = 0;  // 2^M M! images of each solution
  int redundancy_mismatches = 0;
};

/// Builds, tracks, dedupes and polishes; admissible roots carry the
/// extended-precision polish when cfg.polish is set.
HomotopyCensus run_homotopy(int N, int M, const AnisotropyRegime& regime, const TrackerConfig& cfg);

nlohmann::json to_json(const HomotopyCensus& c);

}  // namespace xxz
