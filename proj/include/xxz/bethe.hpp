#pragma once

// Bethe equations of the open U_q(sl2)-invariant chain: residuals,
// energies, admissibility and canonical ordering of root sets.
// XXX roots are rapidities λ; XXZ roots are x = e^{2λ}.

#include <string>
#include <vector>

#include "json.hpp"
#include "xxz/regime.hpp"

namespace xxz {

enum class Verdict {
  Admissible,
  SingularExcluded,
  ZeroOrHalfPiExcluded,
  Coincident,
  PStringExcluded,
  NonCanonical
};

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct SolutionVector {
  AnisotropyRegime regime;
  int N = 0;
  std::vector<cplx> roots;
  double residual = 0.0;
  Verdict verdict = Verdict::NonCanonical;

  int M() const { return static_cast<int>(roots.size()); }
};

struct AdmissibilityTolerances {
  double boundary = 1e-9;  // |x| = 1 and Re λ = 0
  double distinct = 1e-8;  // relative
  double singular = 1e-6;
  double pstring = 1e-6;
};

double residual_xxx(const std::vector<cplx>& lambdas, int N);
double residual_x(const std::vector<cplx>& xs, int N, const AnisotropyRegime& regime);
double residual(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime);

/// Throws std::domain_error at a pole (λ = ±i/2, x = q^{±1}).
cplx energy(const SolutionVector& sol);
cplx energy(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime);

cplx x_from_lambda(cplx lambda);
cplx lambda_from_x(cplx x);

/// Reflects each root into the fundamental domain and sorts by (Re, Im).
/// Fills in residual and verdict.
SolutionVector canonicalize(const SolutionVector& sol,
                            const AdmissibilityTolerances& tol = {});
std::vector<cplx> canonical_roots(const std::vector<cplx>& roots, const AnisotropyRegime& regime);

Verdict is_admissible(const SolutionVector& sol, const AdmissibilityTolerances& tol = {});

/// True if some p of the roots form {x0 q^{2m}}, m = 0..p-1, each root
/// matched up to x -> 1/x.
bool contains_p_string(const std::vector<cplx>& xs, int p, double tol = 1e-6);

/// The p-string {x0 q^{2m}} in x variables.
std::vector<cplx> p_string(cplx x0, int p);

SolutionVector make_solution(const AnisotropyRegime& regime, int N, std::vector<cplx> roots,
                             const AdmissibilityTolerances& tol = {});

nlohmann::json to_json(const SolutionVector& sol);
SolutionVector solution_from_json(const nlohmann::json& j);

}  // namespace xxz
