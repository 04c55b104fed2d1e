#include "xxz/chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "xxz/bethe.hpp"

namespace xxz {

namespace {

const cplx I(0.0, 1.0);

void check_sites(int N) {
  if (N < 1 || N > kMaxChainSites) throw std::length_error("chain: N out of supported range");
}

inline int site_bit(int N, int k) { return N - k; }  // k is 1-based

inline int two_sz(int N, long idx) { return N - 2 * std::popcount(static_cast<unsigned long>(idx)); }

double sz_half(long idx, int N, int k) { return ((idx >> site_bit(N, k)) & 1) ? -0.5 : 0.5; }

std::string spin_string(int twoJ) { return twoJ % 2 ? std::to_string(twoJ) + "/2" : std::to_string(twoJ / 2); }

}  // namespace

Eigen::Matrix4cd r_matrix(cplx u, const AnisotropyRegime& regime) {
  cplx a, b, c;
  if (regime.is_xxx()) {
    a = u + I;
    b = u;
    c = I;
  } else {
    a = std::sinh(u + regime.eta);
    b = std::sinh(u);
    c = std::sinh(regime.eta);
  }
  Eigen::Matrix4cd R = Eigen::Matrix4cd::Zero();
  R(0, 0) = a;
  R(3, 3) = a;
  R(1, 1) = b;
  R(2, 2) = b;
  R(1, 2) = c;
  R(2, 1) = c;
  return R;
}

std::pair<Eigen::Vector2cd, Eigen::Vector2cd> k_matrices(cplx u, const AnisotropyRegime& regime) {
  Eigen::Vector2cd kp(1.0, 1.0), km(1.0, 1.0);
  if (!regime.is_xxx()) {
    kp << std::exp(-u - regime.eta), std::exp(u + regime.eta);
    km << std::exp(u), std::exp(-u);
  }
  return {kp, km};
}

ChainOperators::ChainOperators(int N, const AnisotropyRegime& regime) : N_(N), regime_(regime) { check_sites(N); }

cplx ChainOperators::eta() const { return regime_.is_xxx() ? I : regime_.eta; }

void ChainOperators::apply_R(cplx u, int site, RowMat& p0, RowMat& p1) const {
  const auto R = r_matrix(u, regime_);
  const cplx a = R(0, 0), b = R(1, 1), c = R(1, 2);
  const long bit = 1L << site_bit(N_, site);
  const long D = dim();
  for (long i = 0; i < D; ++i) {
    if (i & bit) continue;
    const long j = i | bit;  // site down
    // (aux, site): (0,0) -> a; (1,1) -> a; (0,1) <-> (1,0) mix with b, c
    auto r00 = p0.row(i);
    auto r11 = p1.row(j);
    r00 *= a;
    r11 *= a;
    auto r01 = p0.row(j);
    auto r10 = p1.row(i);
    const auto t01 = (b * r01 + c * r10).eval();
    r10 = b * r10 + c * r01;
    r01 = t01;
  }
}

void ChainOperators::apply_U(cplx u, RowMat& p0, RowMat& p1) const {
  for (int k = 1; k <= N_; ++k) apply_R(u, k, p0, p1);  // T^ = R_aN ... R_a1
  const auto km = k_matrices(u, regime_).second;
  p0 *= km(0);
  p1 *= km(1);
  for (int k = N_; k >= 1; --k) apply_R(u, k, p0, p1);  // T = R_a1 ... R_aN
}

CMat ChainOperators::apply_transfer(cplx u, const CMat& X) const {
  const auto kp = k_matrices(u, regime_).first;
  CMat out = CMat::Zero(X.rows(), X.cols());
  for (int b = 0; b < 2; ++b) {
    RowMat p0 = RowMat::Zero(X.rows(), X.cols()), p1 = p0;
    (b == 0 ? p0 : p1) = X;
    apply_U(u, p0, p1);
    out += kp(b) * (b == 0 ? p0 : p1);
  }
  return out;
}

CMat ChainOperators::apply_B(cplx u, const CMat& X) const {
  RowMat p0 = RowMat::Zero(X.rows(), X.cols());
  RowMat p1 = X;
  apply_U(u, p0, p1);
  return p0;
}

OperatorMatrix transfer_matrix(cplx u, int N, const AnisotropyRegime& regime) {
  const ChainOperators ops(N, regime);
  return {ops.apply_transfer(u, CMat::Identity(ops.dim(), ops.dim())), "t(u)"};
}

OperatorMatrix hamiltonian(int N, const AnisotropyRegime& regime) {
  check_sites(N);
  if (N < 2) throw std::invalid_argument("hamiltonian: N >= 2");
  const cplx q = regime.q();
  const cplx ch = 0.5 * (q + 1.0 / q), sh = 0.5 * (q - 1.0 / q);
  const long D = 1L << N;
  CMat H = CMat::Zero(D, D);
  for (long i = 0; i < D; ++i) {
    for (int k = 1; k < N; ++k) {
      const double z1 = 2 * sz_half(i, N, k), z2 = 2 * sz_half(i, N, k + 1);
      H(i, i) += ch * z1 * z2;
      if (z1 != z2) H(i ^ (1L << site_bit(N, k)) ^ (1L << site_bit(N, k + 1)), i) += 2.0;
    }
    H(i, i) -= sh * (2 * sz_half(i, N, 1) - 2 * sz_half(i, N, N));
  }
  return {H, "H"};
}

std::pair<cplx, cplx> hamiltonian_transfer_relation(int N, const AnisotropyRegime& regime) {
  if (regime.is_xxx()) {
    const cplx alpha = (N % 2 ? -1.0 : 1.0) * 0.5 * I;
    return {alpha, -static_cast<double>(N)};
  }
  const cplx eta = regime.eta;
  const cplx alpha = 1.0 / std::sinh(2.0 * eta) * std::pow(1.0 / std::sinh(eta), 2 * (N - 1));
  const cplx beta = -static_cast<double>(N + 1) * std::cosh(eta) + 1.0 / std::cosh(eta);
  return {alpha, beta};
}

OperatorMatrix higher_charge(int n, int N, const AnisotropyRegime& regime, int points, double radius) {
  if (n < 0 || n > 4) throw std::invalid_argument("higher_charge: 0 <= n <= 4");
  if (n == 0) {
    auto t = transfer_matrix(0.0, N, regime);
    t.label = "H_0";
    return t;
  }
  const ChainOperators ops(N, regime);
  const long D = ops.dim();
  CMat acc = CMat::Zero(D, D);
  const CMat Id = CMat::Identity(D, D);
  for (int j = 0; j < points; ++j) {
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * j / points);
    acc += ops.apply_transfer(radius * w, Id) * std::pow(w, -n);
  }
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  acc *= fact / (points * std::pow(radius, n));
  return {acc, "H_" + std::to_string(n)};
}

cplx qnumber(cplx x, cplx q) {
  if (std::abs(q - 1.0) < 1e-14) return x;
  return (std::pow(q, x) - std::pow(q, -x)) / (q - 1.0 / q);
}

QGroupGenerators qgroup_generators(int N, cplx q) {
  check_sites(N);
  const long D = 1L << N;
  QGroupGenerators g;
  g.Sz = {CMat::Zero(D, D), "S^z"};
  g.Splus = {CMat::Zero(D, D), "S^+"};
  g.Sminus = {CMat::Zero(D, D), "S^-"};
  g.K = {CMat::Zero(D, D), "K"};
  for (long i = 0; i < D; ++i) {
    const double sz = 0.5 * two_sz(N, i);
    g.Sz.m(i, i) = sz;
    g.K.m(i, i) = std::pow(q, 2.0 * sz);
    double left = 0.0, right = 0.0;
    for (int k = 1; k <= N; ++k) right += sz_half(i, N, k);
    for (int k = 1; k <= N; ++k) {
      const double s = sz_half(i, N, k);
      right -= s;
      const cplx dress = std::pow(q, -left) * std::pow(q, right);
      const long j = i ^ (1L << site_bit(N, k));
      if (s < 0)
        g.Splus.m(j, i) += dress;  // raises site k
      else
        g.Sminus.m(j, i) += dress;
      left += s;
    }
  }
  CMat diag = CMat::Zero(D, D);
  const cplx half = qnumber(0.5, q);
  for (long i = 0; i < D; ++i) {
    const cplx b = qnumber(0.5 * two_sz(N, i) + 0.5, q);
    diag(i, i) = b * b - half * half;
  }
  g.casimir = {g.Sminus.m * g.Splus.m + diag, "S^2"};
  return g;
}

std::vector<OperatorMatrix> tl_generators(int N, cplx q) {
  check_sites(N);
  if (N < 2) throw std::invalid_argument("tl_generators: N >= 2");
  const long D = 1L << N;
  const cplx dl = q + 1.0 / q, df = q - 1.0 / q;
  std::vector<OperatorMatrix> out;
  for (int k = 1; k < N; ++k) {
    CMat e = CMat::Zero(D, D);
    for (long i = 0; i < D; ++i) {
      const double z1 = 2 * sz_half(i, N, k), z2 = 2 * sz_half(i, N, k + 1);
      e(i, i) += -0.25 * dl * (z1 * z2 - 1.0) + 0.25 * df * (z1 - z2);
      if (z1 != z2) e(i ^ (1L << site_bit(N, k)) ^ (1L << site_bit(N, k + 1)), i) += -1.0;
    }
    out.push_back({e, "e_" + std::to_string(k)});
  }
  return out;
}

std::vector<long> sector_basis(int N, int twoSz) {
  std::vector<long> b;
  for (long i = 0; i < (1L << N); ++i)
    if (two_sz(N, i) == twoSz) b.push_back(i);
  return b;
}

std::map<int, CMat> operator_sectors(const CMat& A, int N) {
  std::map<int, CMat> out;
  for (int s = -N; s <= N; s += 2) {
    const auto b = sector_basis(N, s);
    CMat blk(b.size(), b.size());
    for (std::size_t r = 0; r < b.size(); ++r)
      for (std::size_t c = 0; c < b.size(); ++c) blk(r, c) = A(b[r], b[c]);
    out[s] = blk;
  }
  return out;
}

std::map<int, CMat> transfer_sectors(cplx u, int N, const AnisotropyRegime& regime) {
  const ChainOperators ops(N, regime);
  std::map<int, CMat> out;
  for (int s = -N; s <= N; s += 2) {
    const auto b = sector_basis(N, s);
    CMat X = CMat::Zero(ops.dim(), b.size());
    for (std::size_t c = 0; c < b.size(); ++c) X(b[c], c) = 1.0;
    const CMat Y = ops.apply_transfer(u, X);
    CMat blk(b.size(), b.size());
    for (std::size_t r = 0; r < b.size(); ++r) blk.row(r) = Y.row(b[r]);
    out[s] = blk;
  }
  return out;
}

namespace {

struct RawEig {
  cplx value;
  int sector;
};

// Number of small singular values of B, chosen at the widest gap among
// candidate kernel sizes lo..hi; `ref` stands above the largest singular
// value when the whole space is a candidate. Returns (k, ratio).
std::pair<int, double> kernel_by_gap(const CMat& B, int lo, int hi, double ref) {
  Eigen::JacobiSVD<CMat> svd(B);
  Eigen::VectorXd s = svd.singularValues().reverse();  // ascending
  const int n = static_cast<int>(s.size());
  hi = std::min(hi, n);
  int best = hi;
  double best_ratio = 0.0;
  const double floor = std::max(ref * 1e-15, 1e-300);
  for (int k = std::max(lo, 0); k <= hi; ++k) {
    const double below = k > 0 ? std::max(s(k - 1), floor) : floor;
    const double above = k < n ? s(k) : ref;
    if (k == 0) continue;
    const double ratio = above / below;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return {best, best_ratio};
}

}  // namespace

SpectralReport spectrum_sectors(const std::map<int, CMat>& blocks, int N, const SpectrumOptions& opt) {
  SpectralReport rep;
  std::vector<RawEig> all;
  std::map<int, Eigen::VectorXcd> sector_vals;
  for (const auto& [s, blk] : blocks) {
    rep.dim += static_cast<int>(blk.rows());
    if (blk.rows() == 0) continue;
    Eigen::ComplexEigenSolver<CMat> es(blk, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigen solver failed");
    sector_vals[s] = es.eigenvalues();
    for (int i = 0; i < es.eigenvalues().size(); ++i) all.push_back({es.eigenvalues()(i), s});
  }
  double scale = 0.0;
  for (const auto& e : all) scale = std::max(scale, std::abs(e.value));
  double bnorm = 0.0;
  for (const auto& [s, blk] : blocks) bnorm = std::max(bnorm, blk.norm());
  scale = std::max(scale, 1e-300);
  const double tol = opt.cluster_tol * std::max(scale, bnorm);

  // single-linkage clustering
  const int n = static_cast<int>(all.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return all[a].value.real() < all[b].value.real(); });
  for (int ia = 0; ia < n; ++ia)
    for (int ib = ia + 1; ib < n; ++ib) {
      const auto& a = all[order[ia]];
      const auto& b = all[order[ib]];
      if (b.value.real() - a.value.real() > tol) break;
      if (std::abs(a.value - b.value) <= tol) parent[find(order[ia])] = find(order[ib]);
    }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);

  for (const auto& [root, members] : groups) {
    EigenCluster c;
    cplx sum = 0.0;
    for (int i : members) {
      sum += all[i].value;
      ++c.sz[all[i].sector];
    }
    c.value = sum / static_cast<double>(members.size());
    c.algebraic = static_cast<int>(members.size());
    c.geometric = c.algebraic;
    c.gap_ratio = std::numeric_limits<double>::infinity();
    if (opt.jordan) {
      c.geometric = 0;
      for (const auto& [s, m] : c.sz) {
        if (m == 1) {
          ++c.geometric;
          continue;
        }
        const CMat& blk = blocks.at(s);
        cplx lam = 0.0;
        int cnt = 0;
        for (int i : members)
          if (all[i].sector == s) {
            lam += all[i].value;
            ++cnt;
          }
        lam /= static_cast<double>(cnt);
        const CMat B = blk - lam * CMat::Identity(blk.rows(), blk.cols());
        const double ref = std::max(blk.norm(), 1e-300);
        const auto [g, r1] = kernel_by_gap(B, (m + 1) / 2, m, ref);
        const auto [g2, r2] = kernel_by_gap(B * B, g, m, ref * ref);
        c.geometric += g;
        c.jordan2 += g2 - g;
        c.gap_ratio = std::min({c.gap_ratio, r1, r2});
        if (g2 != m) c.flagged = true;  // rank chain inconsistent with max rank 2
      }
      if (c.gap_ratio < opt.gap_audit) c.flagged = true;
    }
    rep.eigenvalues.push_back(c);
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](const EigenCluster& a, const EigenCluster& b) {
    const double ar = std::round(a.value.real() * 1e8), br = std::round(b.value.real() * 1e8);
    if (ar != br) return ar < br;
    return a.value.imag() < b.value.imag();
  });
  rep.distinct = static_cast<int>(rep.eigenvalues.size());
  rep.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < rep.eigenvalues.size(); ++a)
    for (std::size_t b = a + 1; b < rep.eigenvalues.size(); ++b)
      rep.min_separation = std::min(rep.min_separation,
                                    std::abs(rep.eigenvalues[a].value - rep.eigenvalues[b].value) / scale);
  for (const auto& c : rep.eigenvalues) rep.flagged += c.flagged;
  (void)N;
  return rep;
}

SpectralReport spectrum(const CMat& A, int N, const SpectrumOptions& opt) {
  if (A.rows() != (1L << N) || A.cols() != A.rows()) throw std::invalid_argument("spectrum: dimension mismatch");
  const auto g = qgroup_generators(N, 1.0);
  const CMat comm = A * g.Sz.m - g.Sz.m * A;
  if (comm.norm() > 1e-10 * std::max(1.0, A.norm())) throw std::invalid_argument("spectrum: A does not commute with S^z");
  return spectrum_sectors(operator_sectors(A, N), N, opt);
}

nlohmann::json to_json(const SpectralReport& r) {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& c : r.eigenvalues) {
    nlohmann::json sz = nlohmann::json::array();
    for (const auto& [s, m] : c.sz)
      for (int k = 0; k < m; ++k) sz.push_back(0.5 * s);
    ev.push_back({{"re", c.value.real()},
                  {"im", c.value.imag()},
                  {"alg", c.algebraic},
                  {"geo", c.geometric},
                  {"jordan2", c.jordan2},
                  {"sz", sz},
                  {"flagged", c.flagged}});
  }
  return {{"eigenvalues", ev}, {"distinct", r.distinct}};
}

DistinctCounts distinct_eigenvalue_count(int N, const AnisotropyRegime& regime, cplx u0) {
  SpectrumOptions opt;
  opt.jordan = false;
  DistinctCounts d;
  d.transfer = spectrum_sectors(transfer_sectors(u0, N, regime), N, opt).distinct;
  d.hamiltonian = spectrum_sectors(operator_sectors(hamiltonian(N, regime).m, N), N, opt).distinct;
  return d;
}

std::vector<cplx> bethe_v(const std::vector<cplx>& roots, const AnisotropyRegime& regime) {
  std::vector<cplx> v;
  for (cplx r : roots) {
    if (regime.is_xxx())
      v.push_back(r - 0.5 * I);
    else
      v.push_back(0.5 * std::log(r) - 0.5 * regime.eta);
  }
  return v;
}

std::pair<cplx, cplx> tq_coefficients(cplx u, int N, const AnisotropyRegime& regime) {
  if (regime.is_xxx()) {
    const cplx pre = 2.0 / (2.0 * u + I);
    return {pre * std::pow(u + I, 2 * N + 1), pre * std::pow(u, 2 * N + 1)};
  }
  const cplx eta = regime.eta;
  const cplx den = std::sinh(2.0 * u + eta);
  return {std::sinh(2.0 * u + 2.0 * eta) / den * std::pow(std::sinh(u + eta), 2 * N),
          std::sinh(2.0 * u) / den * std::pow(std::sinh(u), 2 * N)};
}

cplx transfer_eigenvalue(cplx u, const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime) {
  const auto v = bethe_v(roots, regime);
  const bool xxx = regime.is_xxx();
  const cplx eta = xxx ? I : regime.eta;
  auto Q = [&](cplx w) {
    cplx p = 1.0;
    for (cplx vk : v) p *= xxx ? (w - vk) * (w + vk + I) : std::sinh(w - vk) * std::sinh(w + vk + eta);
    return p;
  };
  const auto [a, b] = tq_coefficients(u, N, regime);
  return (a * Q(u - eta) + b * Q(u + eta)) / Q(u);
}

BetheState bethe_state(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime) {
  for (cplx r : roots) {
    const bool pole = regime.is_xxx() ? std::abs(r) < 1e-12
                                      : std::abs(r - 1.0) < 1e-12 || std::abs(r + 1.0) < 1e-12;
    if (pole) throw std::invalid_argument("bethe_state: root at a pole of f(u,v) must be discarded");
  }
  const ChainOperators ops(N, regime);
  CMat ref = CMat::Zero(ops.dim(), 1);
  ref(0, 0) = 1.0;
  CMat psi = ref;
  // scale: product of |B(v_k)|0>|, what the state would be without cancellation
  double scale = 1.0;
  for (cplx v : bethe_v(roots, regime)) {
    scale *= ops.apply_B(v, ref).norm();
    psi = ops.apply_B(v, psi);
  }
  BetheState st;
  st.psi = psi.col(0);
  const double nrm = st.psi.norm();
  st.null_state = !st.psi.allFinite() || !(nrm >= 1e-12 * scale) || nrm == 0.0;
  if (!st.null_state) st.psi /= nrm;
  return st;
}

OnShellReport verify_on_shell(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime,
                              const std::vector<cplx>& u_samples, double tol) {
  OnShellReport rep;
  BetheState st;
  try {
    st = bethe_state(roots, N, regime);
  } catch (const std::invalid_argument& e) {
    rep.failure = e.what();
    return rep;
  }
  if (st.null_state) {
    rep.failure = "NullState";
    return rep;
  }
  const ChainOperators ops(N, regime);
  const CVec& psi = st.psi;
  for (cplx u : u_samples) {
    const CVec tpsi = ops.apply_transfer(u, psi);
    const cplx lam = transfer_eigenvalue(u, roots, N, regime);
    const double r = (tpsi - lam * psi).norm() / std::max(tpsi.norm(), 1e-300);
    if (r > rep.eigen_residual) {
      rep.eigen_residual = r;
      rep.worst_sample = u;
    }
  }
  const auto g = qgroup_generators(N, regime.q());
  rep.splus = (g.Splus.m * psi).norm() / psi.norm();
  const int M = static_cast<int>(roots.size());
  const double sz = 0.5 * N - M;
  rep.sz_residual = (g.Sz.m * psi - sz * psi).norm() / psi.norm();
  const cplx cas = std::pow(qnumber(sz + 0.5, regime.q()), 2) - std::pow(qnumber(0.5, regime.q()), 2);
  rep.casimir_residual = (g.casimir.m * psi - cas * psi).norm() / std::max(1.0, std::abs(cas)) / psi.norm();
  rep.ok = rep.eigen_residual < tol && rep.splus < tol && rep.sz_residual < tol && rep.casimir_residual < tol;
  if (!rep.ok) {
    if (rep.eigen_residual >= tol)
      rep.failure = "eigen residual at u=" + format_complex(rep.worst_sample);
    else if (rep.splus >= tol)
      rep.failure = "S+ annihilation";
    else if (rep.sz_residual >= tol)
      rep.failure = "S^z eigenvalue";
    else
      rep.failure = "Casimir eigenvalue";
  }
  return rep;
}

std::vector<InvariantResidual> structural_residuals(int N, const AnisotropyRegime& regime) {
  if (N < 2) throw std::invalid_argument("structural_residuals: N >= 2");
  const long D = 1L << N;
  const CMat Id = CMat::Identity(D, D);
  auto rel = [](const CMat& a, const CMat& b) { return (a - b).norm() / std::max(1e-300, std::max(a.norm(), b.norm())); };
  auto comm = [](const CMat& a, const CMat& b) {
    return (a * b - b * a).norm() / std::max(1e-300, a.norm() * b.norm());
  };
  std::vector<InvariantResidual> out;
  const ChainOperators ops(N, regime);
  const cplx u(0.3, 0.05), v(0.1, 0.7);
  const CMat t1 = transfer_matrix(u, N, regime).m, t2 = transfer_matrix(v, N, regime).m;
  out.push_back({"commutativity [t(u),t(v)]", comm(t1, t2)});
  out.push_back({"crossing t(-u-eta) = t(u)", rel(transfer_matrix(-u - ops.eta(), N, regime).m, t1)});
  const cplx q = regime.q();
  const auto g = qgroup_generators(N, q);
  out.push_back({"[t, S+]", comm(t1, g.Splus.m)});
  out.push_back({"[t, S-]", comm(t1, g.Sminus.m)});
  const CMat H = hamiltonian(N, regime).m;
  out.push_back({"[H, t]", comm(H, t1)});
  if (regime.is_root_of_unity() && regime.p == 2) {
    const CMat t2d = higher_charge(2, N, regime).m;
    out.push_back({"H = (-1)^N t''(0)/4", rel((N % 2 ? -0.25 : 0.25) * t2d, H)});
  } else {
    const auto [a, b] = hamiltonian_transfer_relation(N, regime);
    out.push_back({"H = alpha t'(0) + beta", rel(a * higher_charge(1, N, regime).m + b * Id, H)});
  }
  const CMat& Sp = g.Splus.m;
  const CMat& Sm = g.Sminus.m;
  const CMat& Sz = g.Sz.m;
  CMat bracket = CMat::Zero(D, D);
  for (long i = 0; i < D; ++i) bracket(i, i) = qnumber(2.0 * Sz(i, i), q);
  out.push_back({"[Sz, S+] = S+", rel(Sz * Sp - Sp * Sz, Sp)});
  out.push_back({"[Sz, S-] = -S-", rel(Sz * Sm - Sm * Sz, -Sm)});
  out.push_back({"[S+, S-] = [2Sz]_q", (Sp * Sm - Sm * Sp - bracket).norm() / (Sp.norm() * Sm.norm())});
  out.push_back({"[C, S+]", comm(g.casimir.m, Sp)});
  const auto e = tl_generators(N, q);
  const cplx delta = q + 1.0 / q;
  double sq = 0.0, braid = 0.0, far = 0.0;
  CMat sum = CMat::Zero(D, D);
  for (int k = 0; k < N - 1; ++k) {
    sq = std::max(sq, (e[k].m * e[k].m - delta * e[k].m).norm() / e[k].m.norm());
    if (k + 1 < N - 1) {
      braid = std::max(braid, rel(e[k].m * e[k + 1].m * e[k].m, e[k].m));
      braid = std::max(braid, rel(e[k + 1].m * e[k].m * e[k + 1].m, e[k + 1].m));
    }
    for (int l = k + 2; l < N - 1; ++l) far = std::max(far, comm(e[k].m, e[l].m));
    sum += e[k].m;
  }
  out.push_back({"TL e^2 = delta e", sq});
  out.push_back({"TL e e' e = e", braid});
  out.push_back({"TL far commutation", far});
  out.push_back({"H = -2 sum e + delta (N-1)/2", rel(-2.0 * sum + 0.5 * delta * (N - 1.0) * Id, H)});
  return out;
}

std::map<int, int> tilting_sz_content(SpinLabel j, int p) {
  std::map<int, int> c;
  for (int s = -j.twoJ; s <= j.twoJ; s += 2) ++c[s];
  if (p == 0) return c;
  const int d = j.twoJ + 1;
  const int s = d % p;
  if (d > p && s != 0) {
    const int low = j.twoJ - 2 * s;
    for (int t = -low; t <= low; t += 2) ++c[t];
  }
  return c;
}

NjkMeasurement measure_njk(const SpectralReport& spec, int, const AnisotropyRegime& regime) {
  NjkMeasurement out;
  const int p = regime.is_root_of_unity() ? regime.p : 0;
  // per top j: the n_jk seen for every cluster with that top
  std::map<int, std::vector<std::map<int, int>>> per_top;
  std::map<int, int> nonleading;  // twoK -> copies absorbed into a higher cluster
  for (const auto& c : spec.eigenvalues) {
    std::map<int, int> rest = c.sz;
    ClusterDecomposition dec;
    dec.value = c.value;
    while (!rest.empty()) {
      const int top = rest.rbegin()->first;
      const int copies = rest.rbegin()->second;
      if (top < 0 || copies <= 0) {
        dec.ok = false;
        break;
      }
      const SpinLabel j(top);
      const auto content = tilting_sz_content(j, p);
      for (const auto& [s, m] : content) {
        auto it = rest.find(s);
        if (it == rest.end() || it->second < copies * m) {
          dec.ok = false;
          break;
        }
        it->second -= copies * m;
        if (it->second == 0) rest.erase(it);
      }
      if (!dec.ok) break;
      dec.modules.emplace_back(j, copies);
    }
    if (!dec.ok) {
      out.problems.push_back("cluster " + format_complex(c.value) + " is not a sum of tilting modules");
      out.clusters.push_back(dec);
      continue;
    }
    const int lead_twoJ = dec.modules.front().first.twoJ;
    const int lead_copies = dec.modules.front().second;
    std::map<int, int> njk;
    for (std::size_t m = 1; m < dec.modules.size(); ++m) {
      const auto [k, cnt] = dec.modules[m];
      if (cnt % lead_copies != 0)
        out.problems.push_back("cluster " + format_complex(c.value) + ": copies not divisible per leading module");
      njk[k.twoJ] = cnt / lead_copies;
      nonleading[k.twoJ] += cnt;
      if (p && ((lead_twoJ - k.twoJ) / 2) % p != 0)
        out.problems.push_back("cluster " + format_complex(c.value) + ": (j-k) mod p != 0");
    }
    for (int r = 0; r < lead_copies; ++r) per_top[lead_twoJ].push_back(njk);
    out.clusters.push_back(dec);
  }
  // n_jk must not depend on which copy of T_j; only copies that lead a
  // cluster are considered, the rest are absorbed and counted in n_j
  DegeneracyCorrections& corr = out.corrections;
  for (auto& [twoJ, list] : per_top) {
    std::map<int, int> common;
    bool consistent = true;
    // every cluster led by a copy of T_j must carry the same partners
    for (const auto& m : list)
      if (!m.empty()) {
        if (common.empty())
          common = m;
        else if (m != common)
          consistent = false;
      }
    for (const auto& m : list)
      if (m.empty() && !common.empty()) consistent = false;
    if (!consistent)
      out.problems.push_back("n_jk for j=" + spin_string(twoJ) + " differs between copies");
    for (const auto& [twoK, n] : common) corr.njk[{SpinLabel(twoJ), SpinLabel(twoK)}] = n;
  }
  for (const auto& [twoK, n] : nonleading) corr.nj[SpinLabel(twoK)] = n;
  return out;
}

NjkMeasurement measure_njk(int N, const AnisotropyRegime& regime, cplx u0) {
  SpectrumOptions opt;
  opt.jordan = false;
  return measure_njk(spectrum_sectors(transfer_sectors(u0, N, regime), N, opt), N, regime);
}

}  // namespace xxz
