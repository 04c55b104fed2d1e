#include "xxz/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace xxz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const cplx I(0.0, 1.0);

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool all_finite(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](cplx z) { return finite(z); });
}

double rel_gap(cplx lhs, cplx rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return std::abs(lhs - rhs) / scale;
}

bool in_domain(cplx z, const AnisotropyRegime& regime, double b) {
  if (regime.is_xxx()) return z.real() > b || (std::abs(z.real()) <= b && z.imag() > 0.0);
  const double r = std::abs(z);
  if (r > 1.0 + b) return true;
  if (std::abs(r - 1.0) > b) return false;
  const double a = std::arg(z);
  return a > 0.0 && a < std::numbers::pi;
}

cplx reflect(cplx z, const AnisotropyRegime& regime, double b) {
  if (regime.is_xxx()) {
    if (z.real() < -b || (std::abs(z.real()) <= b && z.imag() < 0.0)) return -z;
    return z;
  }
  const double r = std::abs(z);
  if (r < 1.0 - b || (std::abs(r - 1.0) <= b && std::arg(z) < 0.0)) return 1.0 / z;
  return z;
}

bool near(cplx a, cplx b, double tol) {
  return std::abs(a - b) < tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Admissible: return "Admissible";
    case Verdict::SingularExcluded: return "SingularExcluded";
    case Verdict::ZeroOrHalfPiExcluded: return "ZeroOrHalfPiExcluded";
    case Verdict::Coincident: return "Coincident";
    case Verdict::PStringExcluded: return "PStringExcluded";
    case Verdict::NonCanonical: return "NonCanonical";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::Admissible, Verdict::SingularExcluded, Verdict::ZeroOrHalfPiExcluded,
                    Verdict::Coincident, Verdict::PStringExcluded, Verdict::NonCanonical})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

double residual_xxx(const std::vector<cplx>& lambdas, int N) {
  if (!all_finite(lambdas)) return kInf;
  double worst = 0.0;
  const std::size_t M = lambdas.size();
  for (std::size_t k = 0; k < M; ++k) {
    const cplx l = lambdas[k];
    cplx lhs = std::pow(l + 0.5 * I, 2 * N);
    cplx rhs = std::pow(l - 0.5 * I, 2 * N);
    for (std::size_t j = 0; j < M; ++j) {
      if (j == k) continue;
      const cplx m = lambdas[j];
      lhs *= (l - m - I) * (l + m - I);
      rhs *= (l - m + I) * (l + m + I);
    }
    worst = std::max(worst, rel_gap(lhs, rhs));
  }
  return std::isfinite(worst) ? worst : kInf;
}

double residual_x(const std::vector<cplx>& xs, int N, const AnisotropyRegime& regime) {
  if (!regime.is_xxz()) throw std::invalid_argument("residual_x needs an XXZ regime");
  if (!all_finite(xs)) return kInf;
  for (cplx x : xs)
    if (x == 0.0) return kInf;
  const cplx q = regime.q();
  const cplx q2 = q * q;
  double worst = 0.0;
  const std::size_t M = xs.size();
  for (std::size_t k = 0; k < M; ++k) {
    const cplx x = xs[k];
    cplx lhs = std::pow(q * x - 1.0, 2 * N);
    cplx rhs = std::pow(x - q, 2 * N);
    for (std::size_t j = 0; j < M; ++j) {
      if (j == k) continue;
      const cplx y = xs[j];
      lhs *= (x - q2 * y) * (x * y - q2);
      rhs *= (q2 * x - y) * (q2 * x * y - 1.0);
    }
    worst = std::max(worst, rel_gap(lhs, rhs));
  }
  return std::isfinite(worst) ? worst : kInf;
}

double residual(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime) {
  return regime.is_xxx() ? residual_xxx(roots, N) : residual_x(roots, N, regime);
}

cplx energy(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime) {
  if (regime.is_xxx()) {
    cplx e = static_cast<double>(N - 1);
    for (cplx l : roots) {
      const cplx den = l * l + 0.25;
      if (std::abs(den) < 1e-12) throw std::domain_error("energy pole at lambda = +-i/2");
      e -= 2.0 / den;
    }
    return e;
  }
  const cplx ch = std::cosh(regime.eta);
  const cplx sh = std::sinh(regime.eta);
  cplx e = static_cast<double>(N - 1) * ch;
  for (cplx x : roots) {
    if (x == 0.0) throw std::domain_error("energy undefined at x = 0");
    const cplx den = x + 1.0 / x - 2.0 * ch;
    if (std::abs(den) < 1e-12 * std::max(1.0, std::abs(x))) throw std::domain_error("energy pole at x = q^{+-1}");
    e += 8.0 * sh * sh / den;
  }
  return e;
}

cplx energy(const SolutionVector& sol) { return energy(sol.roots, sol.N, sol.regime); }

cplx x_from_lambda(cplx lambda) { return std::exp(2.0 * lambda); }
cplx lambda_from_x(cplx x) { return 0.5 * std::log(x); }

std::vector<cplx> canonical_roots(const std::vector<cplx>& roots, const AnisotropyRegime& regime) {
  constexpr double b = 1e-9;
  std::vector<cplx> out;
  out.reserve(roots.size());
  for (cplx z : roots) out.push_back(finite(z) && z != 0.0 ? reflect(z, regime, b) : z);
  // Real parts are compared on a 1e-9 grid so that conjugate pairs sort by
  // imaginary part regardless of rounding noise.
  auto key = [](cplx z) { return std::round(z.real() * 1e9) * 1e-9; };
  std::sort(out.begin(), out.end(), [&](cplx a, cplx c) {
    const double ka = key(a), kc = key(c);
    if (ka != kc) return ka < kc;
    return a.imag() < c.imag();
  });
  return out;
}

std::vector<cplx> p_string(cplx x0, int p) {
  const cplx q2 = std::exp(cplx(0.0, 2.0 * std::numbers::pi / p));
  std::vector<cplx> s;
  cplx x = x0;
  for (int m = 0; m < p; ++m, x *= q2) s.push_back(x);
  return s;
}

bool contains_p_string(const std::vector<cplx>& xs, int p, double tol) {
  if (p < 2 || static_cast<int>(xs.size()) < p) return false;
  const std::size_t M = xs.size();
  for (std::size_t a = 0; a < M; ++a) {
    if (!finite(xs[a]) || xs[a] == 0.0) continue;
    for (cplx seed : {xs[a], 1.0 / xs[a]}) {
      std::vector<bool> used(M, false);
      used[a] = true;
      const auto targets = p_string(seed, p);
      bool ok = true;
      for (int m = 1; m < p && ok; ++m) {
        ok = false;
        for (std::size_t b = 0; b < M; ++b) {
          if (used[b] || xs[b] == 0.0) continue;
          if (near(xs[b], targets[m], tol) || near(1.0 / xs[b], targets[m], tol)) {
            used[b] = true;
            ok = true;
            break;
          }
        }
      }
      if (ok) return true;
    }
  }
  return false;
}

Verdict is_admissible(const SolutionVector& sol, const AdmissibilityTolerances& tol) {
  const auto& rg = sol.regime;
  const auto& r = sol.roots;
  if (!all_finite(r)) return Verdict::NonCanonical;
  for (cplx z : r) {
    if (rg.is_xxx()) {
      if (std::abs(z) < tol.singular) return Verdict::ZeroOrHalfPiExcluded;
    } else {
      if (z == 0.0) return Verdict::NonCanonical;
      if (std::abs(z - 1.0) < tol.singular || std::abs(z + 1.0) < tol.singular)
        return Verdict::ZeroOrHalfPiExcluded;
    }
  }
  for (cplx z : r) {
    if (rg.is_xxx()) {
      if (std::abs(z - 0.5 * I) < tol.singular || std::abs(z + 0.5 * I) < tol.singular)
        return Verdict::SingularExcluded;
    } else {
      const cplx q = rg.q();
      if (near(z, q, tol.singular) || near(z, 1.0 / q, tol.singular)) return Verdict::SingularExcluded;
    }
  }
  for (cplx z : r)
    if (!in_domain(z, rg, tol.boundary)) return Verdict::NonCanonical;
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = a + 1; b < r.size(); ++b)
      if (near(r[a], r[b], tol.distinct)) return Verdict::Coincident;
  if (rg.kind == RegimeKind::RootOfUnity && contains_p_string(r, rg.p, tol.pstring))
    return Verdict::PStringExcluded;
  return Verdict::Admissible;
}

SolutionVector canonicalize(const SolutionVector& sol, const AdmissibilityTolerances& tol) {
  SolutionVector out = sol;
  out.roots = canonical_roots(sol.roots, sol.regime);
  out.residual = residual(out.roots, out.N, out.regime);
  out.verdict = is_admissible(out, tol);
  return out;
}

SolutionVector make_solution(const AnisotropyRegime& regime, int N, std::vector<cplx> roots,
                             const AdmissibilityTolerances& tol) {
  SolutionVector s{regime, N, std::move(roots), 0.0, Verdict::NonCanonical};
  return canonicalize(s, tol);
}

nlohmann::json to_json(const SolutionVector& sol) {
  nlohmann::json roots = nlohmann::json::array();
  for (cplx z : sol.roots) roots.push_back({z.real(), z.imag()});
  return {{"regime", sol.regime.to_string()},
          {"N", sol.N},
          {"M", sol.M()},
          {"roots", roots},
          {"residual", sol.residual},
          {"verdict", to_string(sol.verdict)}};
}

SolutionVector solution_from_json(const nlohmann::json& j) {
  SolutionVector s;
  s.regime = AnisotropyRegime::parse(j.at("regime").get<std::string>());
  s.N = j.at("N").get<int>();
  for (const auto& z : j.at("roots")) s.roots.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  if (j.contains("M") && j.at("M").get<int>() != s.M())
    throw std::invalid_argument("solution record: M does not match the number of roots");
  s.residual = j.value("residual", residual(s.roots, s.N, s.regime));
  s.verdict = j.contains("verdict") ? verdict_from_string(j.at("verdict").get<std::string>())
                                    : is_admissible(s);
  return s;
}

}  // namespace xxz
