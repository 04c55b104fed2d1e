#pragma once

// Transfer-matrix eigenvalue curves Λ(u) and the T-Q equation. Q is solved
// as a polynomial in w = cosh(2u+η) (XXZ) or w = u(u+i) (XXX), which turns
// the functional equation into a linear nullspace problem.

#include <string>
#include <vector>

#include "json.hpp"
#include "xxz/bethe.hpp"
#include "xxz/chain.hpp"
#include "xxz/homotopy.hpp"

namespace xxz {

struct EigenCurve {
  std::vector<std::pair<cplx, cplx>> samples;  // (u, Λ(u))
  int source_vector = 0;  // index of the cluster in the t(u0) spectral report
  int top_two_sz = 0;     // highest 2S^z in the cluster
  int multiplicity = 0;   // algebraic multiplicity of the cluster
  double consistency = 0.0;  // worst componentwise eigen-residual
  bool rejected = false;
  std::string diagnostics;

  /// Magnon number of the highest-weight state, M = N/2 - j.
  int magnons(int N) const { return (N - top_two_sz) / 2; }
};

/// Points on |u - 0.3| = 0.15, the first `count` of a fixed sequence.
std::vector<cplx> tq_sample_points(int count);

/// One curve per distinct eigenvalue of t(u0), read off from an eigenvector
/// in the top S^z sector of the cluster.
std::vector<EigenCurve> eigen_curves(int N, const AnisotropyRegime& regime, const std::vector<cplx>& u_samples,
                                     cplx u0 = kGenericU0);

struct QPolynomial {
  int M = 0;
  std::vector<cplx> coefficients;  // monic in w, ascending powers
  double sigma_min = 0.0;          // relative to the largest singular value
  double sigma_next = 0.0;
  double residual = 0.0;           // worst held-out T-Q residual, relative
  bool ambiguous = false;          // nullspace dimension >= 2
  bool found = false;              // nullspace dimension >= 1
  bool degree_drop = false;        // null vector has a vanishing leading coefficient

  cplx eval_w(cplx w) const;
};

/// w(u) for the regime.
cplx tq_w(cplx u, const AnisotropyRegime& regime);

/// Fits Q of degree M on the first 2M+4 samples and checks the rest.
QPolynomial solve_tq(const EigenCurve& curve, int M, int N, const AnisotropyRegime& regime);

/// Roots of Q in w mapped back to Bethe roots, polished, canonicalized and
/// classified. Throws std::invalid_argument unless Q is found and monic of degree M.
SolutionVector roots_to_bethe(const QPolynomial& Q, int N, const AnisotropyRegime& regime);

struct TQSolution {
  SolutionVector solution;
  int curve = 0;
  int multiplicity = 0;  // algebraic multiplicity of the eigenvalue
  QPolynomial Q;
};

struct TQCensus {
  AnisotropyRegime regime;
  int N = 0;
  std::vector<TQSolution> solutions;  // every curve, all verdicts
  std::vector<std::string> problems;  // rejected curves, missing or ambiguous Q

  /// Admissible solutions with M magnons, canonically sorted.
  std::vector<SolutionVector> admissible(int M) const;
  /// Multiplicities of the eigenvalues carrying admissible solutions at M.
  std::vector<int> degeneracies(int M) const;
};

/// Curves of t(u0) solved for Q at the magnon number fixed by S^z.
TQCensus run_tq(int N, const AnisotropyRegime& regime, cplx u0 = kGenericU0);

struct CrossValidation {
  int N = 0, M = 0;
  std::vector<SolutionVector> homotopy, tq;
  std::vector<SolutionVector> only_homotopy, only_tq;
  long long predicted = -1;  // from repcount where a prediction exists
  bool matched() const { return only_homotopy.empty() && only_tq.empty(); }
};

CrossValidation cross_validate(int N, int M, const AnisotropyRegime& regime, const TrackerConfig& cfg = {},
                               double tol = 1e-8);
/// Same, reusing a T-Q census of the chain.
CrossValidation cross_validate(const TQCensus& tq, int M, const TrackerConfig& cfg = {}, double tol = 1e-8);

nlohmann::json to_json(const TQCensus& c);

}  // namespace xxz
