#include "xxz/homotopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include <boost/multiprecision/cpp_complex.hpp>

#include "bethe_kernel.hpp"

namespace xxz {

namespace {

using LU = Eigen::PartialPivLU<HMat>;

int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("XXZ_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

class PathTracker {
 public:
  PathTracker(const HomogeneousSystem& sys, const TrackerConfig& cfg, cplx gamma, const HVec& patch)
      : sys_(sys), cfg_(cfg), M_(sys.num_vars()), n_(M_ + 1), gamma_(gamma), patch_(patch) {}

  struct Outcome {
    HVec Z;
    double t = 0.0;
    int steps = 0;
  };

  Outcome track(const HVec& Z0, double step_min) const {
    HVec Z = Z0;
    double t = 0.0;
    double h = std::min(0.01, cfg_.step_max);
    int streak = 0, steps = 0;
    HVec Zp, k1, k2, k3, k4;
    while (t < 1.0) {
      h = std::min(h, 1.0 - t);
      bool ok = velocity(Z, t, k1) && velocity(Z + 0.5 * h * k1, t + 0.5 * h, k2) &&
                velocity(Z + 0.5 * h * k2, t + 0.5 * h, k3) && velocity(Z + h * k3, t + h, k4);
      if (ok) {
        Zp = Z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ok = correct(Zp, t + h);
      }
      ++steps;
      if (ok) {
        Z = Zp;
        t = (1.0 - t <= h) ? 1.0 : t + h;
        if (++streak >= 3) {
          h = std::min(2.0 * h, cfg_.step_max);
          streak = 0;
        }
      } else {
        h *= 0.5;
        streak = 0;
        if (h < step_min) break;
      }
      if (steps > 200000) break;
    }
    return {Z, t, steps};
  }

 private:
  void assemble(const HVec& Z, double t, HVec& H, HMat& HZ, HVec* Ht) const {
    HVec F;
    HMat J;
    sys_.evaluate(Z, F, J);
    const auto& d = sys_.degrees();
    H.resize(n_);
    HZ.setZero(n_, n_);
    const cplx s = (1.0 - t) * gamma_;
    if (Ht) Ht->resize(n_);
    for (int k = 0; k < M_; ++k) {
      const int dk = d[k];
      const cplx zk1 = std::pow(Z(k + 1), dk - 1), z01 = std::pow(Z(0), dk - 1);
      const cplx G = zk1 * Z(k + 1) - z01 * Z(0);
      H(k) = s * G + t * F(k);
      for (int a = 0; a < n_; ++a) HZ(k, a) = t * J(k, a);
      HZ(k, k + 1) += s * static_cast<double>(dk) * zk1;
      HZ(k, 0) -= s * static_cast<double>(dk) * z01;
      if (Ht) (*Ht)(k) = F(k) - gamma_ * G;
    }
    H(M_) = patch_.dot(Z) - 1.0;  // dot() conjugates; patch_ is stored conjugated
    for (int a = 0; a < n_; ++a) HZ(M_, a) = std::conj(patch_(a));
    if (Ht) (*Ht)(M_) = 0.0;
  }

  bool velocity(const HVec& Z, double t, HVec& v) const {
    HVec H, Ht;
    HMat HZ;
    assemble(Z, t, H, HZ, &Ht);
    LU lu(HZ);
    v = lu.solve(-Ht);
    return v.allFinite();
  }

  bool correct(HVec& Z, double t) const {
    HVec H;
    HMat HZ;
    for (int it = 0; it < cfg_.max_newton; ++it) {
      assemble(Z, t, H, HZ, nullptr);
      LU lu(HZ);
      HVec dz = lu.solve(-H);
      if (!dz.allFinite()) return false;
      Z += dz;
      const double rel = dz.norm() / std::max(Z.norm(), 1e-300);
      if (it == 0 && rel > 1e-4) return false;
      if (rel < 1e-10) return true;
    }
    return false;
  }

  const HomogeneousSystem& sys_;
  const TrackerConfig& cfg_;
  int M_, n_;
  cplx gamma_;
  HVec patch_;
};

// Relative row-equilibrated condition number of the affine Jacobian.
double affine_condition(const HMat& J, int M, const std::vector<cplx>& x) {
  HMat A(M, M);
  for (int k = 0; k < M; ++k) {
    double rn = 0.0;
    for (int a = 0; a < M; ++a) {
      A(k, a) = J(k, a + 1) * std::max(1.0, std::abs(x[a]));
      rn = std::max(rn, std::abs(A(k, a)));
    }
    if (rn > 0) A.row(k) /= rn;
  }
  Eigen::JacobiSVD<HMat> svd(A);
  const auto& s = svd.singularValues();
  if (s(M - 1) == 0.0 || !s.allFinite()) return std::numeric_limits<double>::infinity();
  return s(0) / s(M - 1);
}

using Big = boost::multiprecision::cpp_complex_50;

Big to_big(cplx z) { return Big(z.real(), z.imag()); }

}  // namespace

std::string to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Converged: return "Converged";
    case PathStatus::Diverged: return "Diverged";
    case PathStatus::Singular: return "Singular";
    case PathStatus::Truncated: return "Truncated";
  }
  return "?";
}

RefineResult refine(const std::vector<cplx>& point, const HomogeneousSystem& system, double tol,
                    int max_iter) {
  const int M = system.num_vars();
  RefineResult r;
  r.point = point;
  HVec Z(M + 1), F;
  HMat J;
  double last = std::numeric_limits<double>::infinity();
  bool settled = false;
  for (int it = 0; it < max_iter; ++it) {
    Z(0) = 1.0;
    for (int k = 0; k < M; ++k) Z(k + 1) = r.point[k];
    system.evaluate(Z, F, J);
    HMat A = J.rightCols(M);
    LU lu(A);
    HVec dx = lu.solve(-F);
    if (!dx.allFinite()) break;
    double xn = 1.0;
    for (int k = 0; k < M; ++k) {
      r.point[k] += dx(k);
      xn = std::max(xn, std::abs(r.point[k]));
    }
    ++r.iterations;
    last = dx.cwiseAbs().maxCoeff() / xn;
    if (last < tol) {
      settled = true;
      break;
    }
  }
  Z(0) = 1.0;
  for (int k = 0; k < M; ++k) Z(k + 1) = r.point[k];
  system.evaluate(Z, F, J);
  r.residual = last;
  r.condition = affine_condition(J, M, r.point);
  r.singular = !settled || !(r.condition < 1e12);
  return r;
}

SolveResult solve_all(const PolySystem& system, const TrackerConfig& cfg) {
  return solve_all(system.tracking_system(), cfg);
}

SolveResult solve_all(const HomogeneousSystem& system, const TrackerConfig& cfg) {
  const int M = system.num_vars();
  if (M < 1 || M > kMaxVars) throw std::invalid_argument("solve_all: unsupported number of variables");
  const auto& d = system.degrees();
  long long total = 1;
  for (int dk : d) {
    if (dk < 1) throw std::invalid_argument("solve_all: equation of degree < 1");
    total *= dk;
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const cplx gamma = std::polar(1.0, angle(rng));
  HVec patch(M + 1);
  for (int a = 0; a <= M; ++a) patch(a) = std::conj(std::polar(1.0, angle(rng)));
  const PathTracker tracker(system, cfg, gamma, patch);

  SolveResult res;
  res.paths.resize(total);
  std::atomic<long long> next{0};

  auto work = [&]() {
    for (;;) {
      const long long idx = next.fetch_add(1);
      if (idx >= total) break;
      TrackedPath& path = res.paths[idx];
      HVec Z(M + 1);
      Z(0) = 1.0;
      long long rem = idx;
      path.start.resize(M);
      for (int k = 0; k < M; ++k) {
        const long long m = rem % d[k];
        rem /= d[k];
        path.start[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / d[k]);
        Z(k + 1) = path.start[k];
      }
      Z /= patch.dot(Z);

      auto out = tracker.track(Z, cfg.step_min);
      if (out.t < 1.0 - 1e-3) {
        auto retry = tracker.track(Z, cfg.step_min * 1e-3);
        retry.steps += out.steps;
        out = retry;
      }
      path.steps = out.steps;
      if (out.t < 1.0 - 1e-3) {
        path.status = PathStatus::Truncated;
        continue;
      }
      const double zmax = out.Z.cwiseAbs().maxCoeff();
      const double ratio = std::abs(out.Z(0)) / zmax;
      if (ratio < 1.0 / cfg.divergence_bound) {
        path.status = PathStatus::Diverged;
        continue;
      }
      std::vector<cplx> x(M);
      for (int k = 0; k < M; ++k) x[k] = out.Z(k + 1) / out.Z(0);
      auto rr = refine(x, system, 1e-15, 10);
      bool finite = true;
      double xmax = 0.0;
      for (cplx z : rr.point) {
        finite = finite && std::isfinite(std::abs(z));
        xmax = std::max(xmax, std::abs(z));
      }
      path.final_residual = rr.residual;
      path.condition_estimate = rr.condition;
      if (!finite || xmax > cfg.divergence_bound || (rr.singular && ratio < 1e-4)) {
        path.status = PathStatus::Diverged;
        continue;
      }
      path.end = rr.point;
      path.status = (!rr.singular && rr.residual < cfg.refine_tol) ? PathStatus::Converged
                                                                   : PathStatus::Singular;
    }
  };

  const int nt = static_cast<int>(std::min<long long>(thread_count(cfg.threads), total));
  if (nt <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& p : res.paths) {
    switch (p.status) {
      case PathStatus::Converged: ++res.converged; break;
      case PathStatus::Diverged: ++res.diverged; break;
      case PathStatus::Singular: ++res.singular; break;
      case PathStatus::Truncated: ++res.truncated; break;
    }
  }
  return res;
}

std::vector<cplx> polish_extended(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime,
                                  int max_iter) {
  const int M = static_cast<int>(roots.size());
  if (M == 0) return roots;
  detail::KernelParams<Big> P;
  P.xxx = regime.is_xxx();
  P.N = N;
  P.M = M;
  P.i1 = Big(0, 1);
  P.half_i = Big(0, Big::value_type(1) / 2);
  if (regime.kind == RegimeKind::RootOfUnity) {
    const auto pi = boost::multiprecision::cpp_bin_float_50(boost::math::constants::pi<boost::multiprecision::cpp_bin_float_50>());
    const auto th = pi / regime.p;
    P.q = Big(cos(th), sin(th));
  } else if (regime.is_xxz()) {
    P.q = exp(to_big(regime.eta));
  }
  P.q2 = P.q * P.q;

  std::vector<Big> Z(M + 1), F(M), J(M * (M + 1));
  Z[0] = Big(1);
  for (int k = 0; k < M; ++k) Z[k + 1] = to_big(roots[k]);
  for (int it = 0; it < max_iter; ++it) {
    detail::bethe_kernel(P, Z.data(), F.data(), J.data());
    // Gaussian elimination with partial pivoting on the affine Jacobian.
    std::vector<Big> A(M * M), b(M);
    for (int k = 0; k < M; ++k) {
      b[k] = -F[k];
      for (int a = 0; a < M; ++a) A[k * M + a] = J[k * (M + 1) + a + 1];
    }
    bool ok = true;
    for (int c = 0; c < M && ok; ++c) {
      int piv = c;
      for (int r = c + 1; r < M; ++r)
        if (abs(A[r * M + c]) > abs(A[piv * M + c])) piv = r;
      if (abs(A[piv * M + c]) == 0) {
        ok = false;
        break;
      }
      if (piv != c) {
        for (int a = 0; a < M; ++a) std::swap(A[c * M + a], A[piv * M + a]);
        std::swap(b[c], b[piv]);
      }
      for (int r = c + 1; r < M; ++r) {
        const Big f = A[r * M + c] / A[c * M + c];
        for (int a = c; a < M; ++a) A[r * M + a] -= f * A[c * M + a];
        b[r] -= f * b[c];
      }
    }
    if (!ok) break;
    std::vector<Big> dx(M);
    for (int r = M - 1; r >= 0; --r) {
      Big s = b[r];
      for (int a = r + 1; a < M; ++a) s -= A[r * M + a] * dx[a];
      dx[r] = s / A[r * M + r];
    }
    boost::multiprecision::cpp_bin_float_50 step = 0, size = 1;
    for (int k = 0; k < M; ++k) {
      Z[k + 1] += dx[k];
      step = std::max(step, boost::multiprecision::cpp_bin_float_50(abs(dx[k])));
      size = std::max(size, boost::multiprecision::cpp_bin_float_50(abs(Z[k + 1])));
    }
    if (step / size < boost::multiprecision::cpp_bin_float_50("1e-45")) break;
  }
  std::vector<cplx> out(M);
  for (int k = 0; k < M; ++k) {
    const double re = static_cast<double>(Z[k + 1].real());
    const double im = static_cast<double>(Z[k + 1].imag());
    out[k] = cplx(re, im);
  }
  // Fall back to the input if the polish wandered off.
  if (residual(out, N, regime) > residual(roots, N, regime)) return roots;
  return out;
}

bool same_roots(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (cplx z : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(z - b[j]) <= tol * std::max({1.0, std::abs(z), std::abs(b[j])})) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<DedupedSolution> dedupe(const std::vector<std::vector<cplx>>& endpoints, int N,
                                    const AnisotropyRegime& regime, double tol) {
  std::vector<DedupedSolution> out;
  for (const auto& e : endpoints) {
    auto sol = make_solution(regime, N, e);
    bool merged = false;
    for (auto& u : out) {
      if (same_roots(u.solution.roots, sol.roots, tol)) {
        ++u.endpoint_count;
        if (sol.residual < u.solution.residual) u.solution = sol;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({sol, 1});
  }
  return out;
}

namespace {

bool hermitian(const AnisotropyRegime& rg) {
  return rg.is_xxx() || (rg.kind == RegimeKind::GenericXXZ && rg.eta.imag() == 0.0);
}

// Off the line Re λ = 0 (|x| = 1), where the spurious points cluster.
bool interior(const SolutionVector& s) {
  for (cplx z : s.roots) {
    const double d = s.regime.is_xxx() ? z.real() : std::log(std::abs(z));
    if (std::abs(d) < 1e-6) return false;
  }
  return true;
}

bool self_conjugate(const SolutionVector& s) {
  std::vector<cplx> c;
  for (cplx z : s.roots) c.push_back(std::conj(z));
  c = canonical_roots(c, s.regime);
  for (std::size_t k = 0; k < c.size(); ++k)
    if (std::abs(c[k] - s.roots[k]) > 1e-8 * (1.0 + std::abs(c[k]))) return false;
  return true;
}

}  // namespace

HomotopyCensus run_homotopy(int N, int M, const AnisotropyRegime& regime, const TrackerConfig& cfg) {
  HomotopyCensus c;
  c.regime = regime;
  c.N = N;
  c.M = M;
  if (M == 0) {
    c.admissible.push_back(make_solution(regime, N, {}));
    c.solutions.push_back({c.admissible.back(), 1});
    return c;
  }
  const auto sys = tracking_form(regime, N, M);
  const auto res = solve_all(*sys, cfg);
  c.paths = static_cast<long long>(res.paths.size());
  c.converged = res.converged;
  c.diverged = res.diverged;
  c.singular = res.singular;
  c.truncated = res.truncated;
  // Endpoints with a root near 0 or infinity in x are limits of solutions at
  // infinity (x -> 1/x maps one to the other) and count as diverged.
  const double far = std::sqrt(cfg.divergence_bound) * 100.0;
  std::vector<std::vector<cplx>> ends;
  for (const auto& p : res.paths) {
    if (p.status != PathStatus::Converged) continue;
    auto x = sys->to_inner(p.end);
    const bool at_infinity = std::any_of(x.begin(), x.end(), [&](cplx z) {
      return std::abs(z) > far || (regime.is_xxz() && std::abs(z) < 1.0 / far);
    });
    if (at_infinity) {
      --c.converged;
      ++c.diverged;
      continue;
    }
    ends.push_back(std::move(x));
  }
  // Near-strings whose pair difference is within ~1e-10 of an exact string
  // sit next to the singular point of the product form, and their paths are
  // flagged singular. In Hermitian regimes a physical root set is closed under
  // conjugation; spurious points near the singularity fail that or sit on Re λ = 0.
  if (hermitian(regime)) {
    AdmissibilityTolerances strict;
    strict.singular = 1e-3;
    for (const auto& p : res.paths) {
      if (p.status != PathStatus::Singular) continue;
      auto x = polish_extended(sys->to_inner(p.end), N, regime);
      const auto s = make_solution(regime, N, x, strict);
      if (s.verdict != Verdict::Admissible || s.residual > 1e-10 || !interior(s) || !self_conjugate(s)) continue;
      ends.push_back(std::move(x));
      ++c.recovered;
    }
  }
  c.solutions = dedupe(ends, N, regime);
  c.expected_redundancy = 1 << M;
  for (int k = 2; k <= M; ++k) c.expected_redundancy *= k;
  for (auto& u : c.solutions) {
    if (u.solution.verdict != Verdict::Admissible) continue;
    if (cfg.polish) u.solution = make_solution(regime, N, polish_extended(u.solution.roots, N, regime));
    if (u.solution.verdict != Verdict::Admissible) continue;
    if (u.endpoint_count != c.expected_redundancy) ++c.redundancy_mismatches;
    c.admissible.push_back(u.solution);
  }
  auto key = [](const SolutionVector& s) {
    std::vector<std::pair<double, double>> k;
    for (cplx z : s.roots) k.emplace_back(std::round(z.real() * 1e9), std::round(z.imag() * 1e9));
    return k;
  };
  std::sort(c.admissible.begin(), c.admissible.end(),
            [&](const SolutionVector& a, const SolutionVector& b) { return key(a) < key(b); });
  return c;
}

nlohmann::json to_json(const HomotopyCensus& c) {
  nlohmann::json adm = nlohmann::json::array();
  for (const auto& s : c.admissible) adm.push_back(to_json(s));
  std::map<std::string, int> excluded;
  for (const auto& u : c.solutions)
    if (u.solution.verdict != Verdict::Admissible) ++excluded[to_string(u.solution.verdict)];
  return {{"regime", c.regime.to_string()},
          {"N", c.N},
          {"M", c.M},
          {"paths", c.paths},
          {"converged", c.converged},
          {"diverged", c.diverged},
          {"singular", c.singular},
          {"truncated", c.truncated},
          {"recovered", c.recovered},
          {"admissible_count", c.admissible.size()},
          {"excluded", excluded},
          {"expected_redundancy", c.expected_redundancy},
          {"redundancy_mismatches", c.redundancy_mismatches},
          {"admissible", adm}};
}

}  // namespace xxz
