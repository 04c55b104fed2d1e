#include "xxz/tq.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "xxz/repcount.hpp"

namespace xxz {

namespace {

const cplx I(0.0, 1.0);

cplx shift(const AnisotropyRegime& regime) { return regime.is_xxx() ? I : regime.eta; }

std::vector<std::pair<double, double>> sort_key(const SolutionVector& s) {
  std::vector<std::pair<double, double>> k;
  for (cplx z : s.roots) k.emplace_back(std::round(z.real() * 1e9), std::round(z.imag() * 1e9));
  return k;
}

void sort_solutions(std::vector<SolutionVector>& v) {
  std::sort(v.begin(), v.end(),
            [](const SolutionVector& a, const SolutionVector& b) { return sort_key(a) < sort_key(b); });
}

// Unit vector spanning the (numerical) kernel of B, from its smallest singular value.
CVec kernel_vector(const CMat& B) {
  Eigen::JacobiSVD<CMat> svd(B, Eigen::ComputeFullV);
  return svd.matrixV().col(B.cols() - 1);
}

}  // namespace

std::vector<cplx> tq_sample_points(int count) {
  std::vector<cplx> u;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 0; k < count; ++k) {
    const double th = 2.0 * std::numbers::pi * (0.1 + k * golden);
    u.push_back(0.3 + std::polar(0.15, th));
  }
  return u;
}

std::vector<EigenCurve> eigen_curves(int N, const AnisotropyRegime& regime, const std::vector<cplx>& u_samples,
                                     cplx u0) {
  if (N < 1 || N > 10) throw std::invalid_argument("eigen_curves: need 1 <= N <= 10");
  for (cplx u : u_samples) {
    const cplx s = regime.is_xxx() ? 2.0 * u + I : std::sinh(2.0 * u + regime.eta);
    if (std::abs(s) < 1e-8) throw std::invalid_argument("eigen_curves: sample at a pole");
  }
  const ChainOperators ops(N, regime);
  const auto blocks = transfer_sectors(u0, N, regime);
  SpectrumOptions opt;
  opt.jordan = false;
  const auto rep = spectrum_sectors(blocks, N, opt);
  double scale = 0.0;
  for (const auto& c : rep.eigenvalues) scale = std::max(scale, std::abs(c.value));
  const double tol = opt.cluster_tol * scale;

  std::map<int, Eigen::ComplexEigenSolver<CMat>> solvers;
  const int K = static_cast<int>(rep.eigenvalues.size());
  CMat V = CMat::Zero(ops.dim(), K);
  std::vector<EigenCurve> curves(K);
  for (int ci = 0; ci < K; ++ci) {
    const auto& c = rep.eigenvalues[ci];
    const int top = c.sz.rbegin()->first;
    const CMat& blk = blocks.at(top);
    auto it = solvers.find(top);
    if (it == solvers.end()) it = solvers.emplace(top, Eigen::ComplexEigenSolver<CMat>(blk, true)).first;
    const auto& es = it->second;
    std::vector<int> hits;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i) - c.value) <= tol) hits.push_back(i);
    CVec v;
    if (hits.size() == 1) {
      v = es.eigenvectors().col(hits[0]);
    } else {
      cplx lam = c.value;
      if (!hits.empty()) {
        lam = 0.0;
        for (int i : hits) lam += es.eigenvalues()(i);
        lam /= static_cast<double>(hits.size());
      }
      v = kernel_vector(blk - lam * CMat::Identity(blk.rows(), blk.cols()));
    }
    const auto basis = sector_basis(N, top);
    for (std::size_t r = 0; r < basis.size(); ++r) V(basis[r], ci) = v(r);
    V.col(ci).normalize();
    curves[ci].source_vector = ci;
    curves[ci].top_two_sz = top;
    curves[ci].multiplicity = c.algebraic;
  }

  std::vector<Eigen::Index> dominant(K);
  for (int ci = 0; ci < K; ++ci) V.col(ci).cwiseAbs().maxCoeff(&dominant[ci]);
  for (cplx u : u_samples) {
    const CMat Y = ops.apply_transfer(u, V);
    for (int ci = 0; ci < K; ++ci) {
      const auto d = dominant[ci];
      const cplx lam = Y(d, ci) / V(d, ci);
      const double ref = std::max(std::abs(lam) * std::abs(V(d, ci)), 1e-300);
      const double err = (Y.col(ci) - lam * V.col(ci)).cwiseAbs().maxCoeff() / ref;
      auto& cv = curves[ci];
      cv.samples.emplace_back(u, lam);
      cv.consistency = std::max(cv.consistency, err);
    }
  }
  for (auto& cv : curves)
    if (cv.consistency > 1e-6) {
      cv.rejected = true;
      cv.diagnostics = "component ratios disagree: " + std::to_string(cv.consistency);
    }
  return curves;
}

cplx QPolynomial::eval_w(cplx w) const {
  cplx s = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) s = s * w + *it;
  return s;
}

cplx tq_w(cplx u, const AnisotropyRegime& regime) {
  return regime.is_xxx() ? u * (u + I) : std::cosh(2.0 * u + regime.eta);
}

QPolynomial solve_tq(const EigenCurve& curve, int M, int N, const AnisotropyRegime& regime) {
  if (M < 0) throw std::invalid_argument("solve_tq: negative M");
  const int n = static_cast<int>(curve.samples.size());
  if (n < M + 2) throw std::invalid_argument("solve_tq: need at least M+2 samples");
  const int fit = std::min(n, 2 * M + 4);
  const cplx eta = shift(regime);
  QPolynomial Q;
  Q.M = M;

  struct Row {
    cplx lam, a, b, w0, wm, wp;
  };
  std::vector<Row> rows;
  for (const auto& [u, lam] : curve.samples) {
    const auto [a, b] = tq_coefficients(u, N, regime);
    rows.push_back({lam, a, b, tq_w(u, regime), tq_w(u - eta, regime), tq_w(u + eta, regime)});
  }
  auto row_terms = [&](const Row& r, const std::vector<cplx>& c) {
    QPolynomial P;
    P.coefficients = c;
    const cplx t0 = r.lam * P.eval_w(r.w0), tm = r.a * P.eval_w(r.wm), tp = r.b * P.eval_w(r.wp);
    return std::abs(t0 - tm - tp) / std::max({std::abs(t0), std::abs(tm), std::abs(tp), 1e-300});
  };

  if (M == 0) {
    Q.coefficients = {1.0};
    for (int i = 0; i < n; ++i) Q.residual = std::max(Q.residual, row_terms(rows[i], Q.coefficients));
    Q.found = Q.residual < 1e-10;
    Q.sigma_min = Q.residual;
    Q.sigma_next = 1.0;
    return Q;
  }

  CMat A(fit, M + 1);
  for (int i = 0; i < fit; ++i) {
    const Row& r = rows[i];
    cplx p0 = 1.0, pm = 1.0, pp = 1.0;
    for (int m = 0; m <= M; ++m) {
      A(i, m) = r.lam * p0 - r.a * pm - r.b * pp;
      p0 *= r.w0;
      pm *= r.wm;
      pp *= r.wp;
    }
  }
  for (int i = 0; i < fit; ++i) {
    const double s = A.row(i).norm();
    if (s > 0) A.row(i) /= s;
  }
  Eigen::VectorXd colscale(M + 1);
  for (int m = 0; m <= M; ++m) {
    colscale(m) = std::max(A.col(m).norm(), 1e-300);
    A.col(m) /= colscale(m);
  }
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Q.sigma_min = s(M) / s(0);
  Q.sigma_next = s(M - 1) / s(0);
  Q.found = Q.sigma_min < 1e-10;
  Q.ambiguous = Q.found && Q.sigma_next <= 1e-6;
  CVec c = svd.matrixV().col(M);
  // a lower-degree Q padded with zeros is not a degree-M solution
  if (std::abs(c(M)) < 1e-6) {
    Q.found = false;
    Q.degree_drop = true;
    return Q;
  }
  for (int m = 0; m <= M; ++m) c(m) /= colscale(m);
  c /= c(M);
  Q.coefficients.assign(c.data(), c.data() + M + 1);
  // held-out points; the fit rows when none are left
  for (int i = fit < n ? fit : 0; i < n; ++i) Q.residual = std::max(Q.residual, row_terms(rows[i], Q.coefficients));
  return Q;
}

SolutionVector roots_to_bethe(const QPolynomial& Q, int N, const AnisotropyRegime& regime) {
  if (!Q.found || static_cast<int>(Q.coefficients.size()) != Q.M + 1 || std::abs(Q.coefficients.back() - 1.0) > 1e-12)
    throw std::invalid_argument("roots_to_bethe: need a monic Q of degree M");
  const int M = Q.M;
  if (M == 0) return make_solution(regime, N, {});
  CMat C = CMat::Zero(M, M);
  for (int k = 1; k < M; ++k) C(k, k - 1) = 1.0;
  for (int k = 0; k < M; ++k) C(k, M - 1) = -Q.coefficients[k];
  Eigen::ComplexEigenSolver<CMat> es(C, false);
  std::vector<cplx> roots;
  for (int k = 0; k < M; ++k) {
    const cplx w = es.eigenvalues()(k);
    // the other branch is the image under the reflection symmetry
    roots.push_back(regime.is_xxx() ? std::sqrt(w - 0.25) : w + std::sqrt(w * w - 1.0));
  }
  auto sol = make_solution(regime, N, roots);
  if (sol.verdict == Verdict::Admissible) {
    const auto fine = polish_extended(sol.roots, N, regime);
    bool close = true;
    for (int k = 0; k < M; ++k)
      close = close && std::isfinite(std::abs(fine[k])) &&
              std::abs(fine[k] - sol.roots[k]) < 1e-6 * std::max(1.0, std::abs(sol.roots[k]));
    if (close) sol = make_solution(regime, N, fine);
  }
  return sol;
}

std::vector<SolutionVector> TQCensus::admissible(int M) const {
  std::vector<SolutionVector> out;
  for (const auto& s : solutions)
    if (s.solution.verdict == Verdict::Admissible && s.solution.M() == M) out.push_back(s.solution);
  sort_solutions(out);
  return out;
}

std::vector<int> TQCensus::degeneracies(int M) const {
  std::vector<int> out;
  for (const auto& s : solutions)
    if (s.solution.verdict == Verdict::Admissible && s.solution.M() == M) out.push_back(s.multiplicity);
  std::sort(out.begin(), out.end());
  return out;
}

TQCensus run_tq(int N, const AnisotropyRegime& regime, cplx u0) {
  TQCensus c;
  c.regime = regime;
  c.N = N;
  const auto curves = eigen_curves(N, regime, tq_sample_points(2 * (N / 2) + 9), u0);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& cv = curves[i];
    const std::string tag = "curve " + std::to_string(i) + " (M=" + std::to_string(cv.magnons(N)) + ")";
    if (cv.rejected) {
      c.problems.push_back(tag + ": " + cv.diagnostics);
      continue;
    }
    const int M = cv.magnons(N);
    auto Q = solve_tq(cv, M, N, regime);
    if (!Q.found) {
      c.problems.push_back(tag + ": no Q of degree M");
      continue;
    }
    if (Q.ambiguous) {
      c.problems.push_back(tag + ": nullspace of dimension >= 2");
      continue;
    }
    if (Q.residual > 1e-8) c.problems.push_back(tag + ": held-out T-Q residual " + std::to_string(Q.residual));
    TQSolution s;
    s.solution = roots_to_bethe(Q, N, regime);
    s.curve = static_cast<int>(i);
    s.multiplicity = cv.multiplicity;
    s.Q = std::move(Q);
    c.solutions.push_back(std::move(s));
  }
  return c;
}

CrossValidation cross_validate(const TQCensus& tq, int M, const TrackerConfig& cfg, double tol) {
  CrossValidation cv;
  cv.N = tq.N;
  cv.M = M;
  cv.tq = tq.admissible(M);
  if (M > 0) cv.homotopy = run_homotopy(tq.N, M, tq.regime, cfg).admissible;
  else cv.homotopy = {make_solution(tq.regime, tq.N, {})};
  auto unmatched = [&](const std::vector<SolutionVector>& a, const std::vector<SolutionVector>& b) {
    std::vector<SolutionVector> out;
    for (const auto& s : a) {
      const bool hit = std::any_of(b.begin(), b.end(), [&](const SolutionVector& t) { return same_roots(s.roots, t.roots, tol); });
      if (!hit) out.push_back(s);
    }
    return out;
  };
  cv.only_homotopy = unmatched(cv.homotopy, cv.tq);
  cv.only_tq = unmatched(cv.tq, cv.homotopy);
  const auto& rg = tq.regime;
  if (!rg.is_root_of_unity())
    cv.predicted = static_cast<long long>(count_generic(tq.N, M));
  else if (rg.p == 2)
    cv.predicted = static_cast<long long>(p2_count(tq.N, M));
  else
    cv.predicted = static_cast<long long>(count_root_of_unity(tq.N, M, rg.p, measure_njk(tq.N, rg).corrections));
  return cv;
}

CrossValidation cross_validate(int N, int M, const AnisotropyRegime& regime, const TrackerConfig& cfg, double tol) {
  return cross_validate(run_tq(N, regime), M, cfg, tol);
}

nlohmann::json to_json(const TQCensus& c) {
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& s : c.solutions) {
    nlohmann::json roots = nlohmann::json::array();
    for (cplx z : s.solution.roots) roots.push_back({z.real(), z.imag()});
    curves.push_back({{"M", s.solution.M()},
                      {"roots", roots},
                      {"residual", s.Q.residual},
                      {"verdict", to_string(s.solution.verdict)},
                      {"multiplicity", s.multiplicity}});
  }
  return {{"regime", c.regime.to_string()}, {"N", c.N}, {"curves", curves}, {"problems", c.problems}};
}

}  // namespace xxz
