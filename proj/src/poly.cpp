#include "xxz/poly.hpp"

#include <map>
#include <stdexcept>

#include "bethe_kernel.hpp"

namespace xxz {

namespace {

using TermMap = std::map<std::vector<int>, cplx>;

TermMap multiply(const TermMap& a, const TermMap& b) {
  TermMap out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  return out;
}

TermMap power(const TermMap& a, int n, int nvars) {
  TermMap r{{std::vector<int>(nvars, 0), cplx(1.0)}};
  for (int i = 0; i < n; ++i) r = multiply(r, a);
  return r;
}

// c + Σ c_i x_i + c_kj x_k x_j in the M affine variables.
struct FactorBuilder {
  int nvars;
  TermMap constant(cplx c) const { return {{std::vector<int>(nvars, 0), c}}; }
  TermMap var(int i, cplx c) const {
    std::vector<int> e(nvars, 0);
    e[i] = 1;
    return {{e, c}};
  }
  TermMap prod(int i, int j, cplx c) const {
    std::vector<int> e(nvars, 0);
    e[i] += 1;
    e[j] += 1;
    return {{e, c}};
  }
};

TermMap add(TermMap a, const TermMap& b, cplx scale = 1.0) {
  for (const auto& [e, c] : b) a[e] += scale * c;
  return a;
}

Polynomial to_polynomial(const TermMap& m) {
  Polynomial p;
  for (const auto& [e, c] : m)
    if (c != 0.0) p.terms.push_back({c, e});
  return p;
}

detail::KernelParams<cplx> params_for(const AnisotropyRegime& regime, int N, int M) {
  detail::KernelParams<cplx> P;
  P.xxx = regime.is_xxx();
  P.N = N;
  P.M = M;
  P.q = regime.q();
  P.q2 = P.q * P.q;
  P.half_i = cplx(0.0, 0.5);
  P.i1 = cplx(0.0, 1.0);
  return P;
}

}  // namespace

int Term::degree() const {
  int d = 0;
  for (int e : exps) d += e;
  return d;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& t : terms) d = std::max(d, t.degree());
  return d;
}

cplx Polynomial::eval(const std::vector<cplx>& x) const {
  cplx s = 0.0;
  for (const auto& t : terms) {
    cplx v = t.coef;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (t.exps[i]) v *= std::pow(x[i], t.exps[i]);
    s += v;
  }
  return s;
}

PolySystem::PolySystem(int num_vars, std::vector<Polynomial> equations, std::vector<int> degrees)
    : n_(num_vars), eqs_(std::move(equations)), degrees_(std::move(degrees)) {
  if (static_cast<int>(eqs_.size()) != n_ || static_cast<int>(degrees_.size()) != n_)
    throw std::invalid_argument("PolySystem must be square");
  if (n_ > kMaxVars) throw std::invalid_argument("PolySystem: too many variables");
  for (int k = 0; k < n_; ++k)
    if (eqs_[k].degree() > degrees_[k]) throw std::invalid_argument("PolySystem: stored term exceeds degree");
}

void PolySystem::evaluate(const HVec& Z, HVec& F, HMat& J) const {
  const int n = n_ + 1;
  F.setZero(n_);
  J.setZero(n_, n);
  for (int k = 0; k < n_; ++k) {
    const int d = degrees_[k];
    for (const auto& t : eqs_[k].terms) {
      std::array<int, kMaxVars + 1> e{};
      e[0] = d - t.degree();
      for (int i = 0; i < n_; ++i) e[i + 1] = t.exps[i];
      cplx v = t.coef;
      for (int a = 0; a < n; ++a)
        if (e[a]) v *= std::pow(Z(a), e[a]);
      F(k) += v;
      for (int a = 0; a < n; ++a) {
        if (!e[a]) continue;
        cplx g = t.coef * static_cast<double>(e[a]);
        for (int b = 0; b < n; ++b) {
          const int eb = b == a ? e[b] - 1 : e[b];
          if (eb) g *= std::pow(Z(b), eb);
        }
        J(k, a) += g;
      }
    }
  }
}

std::vector<cplx> PolySystem::eval_affine(const std::vector<cplx>& x) const {
  std::vector<cplx> f;
  for (const auto& p : eqs_) f.push_back(p.eval(x));
  return f;
}

long long PolySystem::total_degree() const {
  long long t = 1;
  for (int d : degrees_) t *= d;
  return t;
}

BetheSystem::BetheSystem(const AnisotropyRegime& regime, int N, int M) : regime_(regime), N_(N), M_(M) {
  if (M < 1 || M > kMaxVars) throw std::invalid_argument("BetheSystem: M out of range");
  if (N < 1) throw std::invalid_argument("BetheSystem: N must be positive");
  degrees_.assign(M, bethe_degree(regime, N, M));
}

void BetheSystem::evaluate(const HVec& Z, HVec& F, HMat& J) const {
  const auto P = params_for(regime_, N_, M_);
  std::array<cplx, kMaxVars + 1> z{};
  std::array<cplx, kMaxVars> f{};
  std::array<cplx, kMaxVars*(kMaxVars + 1)> jac{};
  for (int a = 0; a <= M_; ++a) z[a] = Z(a);
  detail::bethe_kernel(P, z.data(), f.data(), jac.data());
  F.resize(M_);
  J.resize(M_, M_ + 1);
  for (int k = 0; k < M_; ++k) {
    F(k) = f[k];
    for (int a = 0; a <= M_; ++a) J(k, a) = jac[k * (M_ + 1) + a];
  }
}

std::vector<cplx> BetheSystem::eval_affine(const std::vector<cplx>& x) const {
  HVec Z(M_ + 1), F;
  HMat J;
  Z(0) = 1.0;
  for (int k = 0; k < M_; ++k) Z(k + 1) = x[k];
  evaluate(Z, F, J);
  return std::vector<cplx>(F.data(), F.data() + M_);
}

ShiftedSystem::ShiftedSystem(std::shared_ptr<const HomogeneousSystem> inner, cplx shift, cplx scale,
                             double eq_scale)
    : inner_(std::move(inner)), shift_(shift), scale_(scale), eq_scale_(eq_scale) {
  if (scale_ == 0.0) throw std::invalid_argument("ShiftedSystem: zero scale");
}

void ShiftedSystem::evaluate(const HVec& Z, HVec& F, HMat& J) const {
  const int M = num_vars();
  HVec X(M + 1);
  X(0) = Z(0);
  for (int k = 1; k <= M; ++k) X(k) = shift_ * Z(0) + scale_ * Z(k);
  HMat Jx;
  inner_->evaluate(X, F, Jx);
  J.resize(M, M + 1);
  for (int k = 0; k < M; ++k) {
    cplx j0 = Jx(k, 0);
    for (int a = 1; a <= M; ++a) {
      j0 += shift_ * Jx(k, a);
      J(k, a) = scale_ * Jx(k, a) * eq_scale_;
    }
    J(k, 0) = j0 * eq_scale_;
  }
  F *= eq_scale_;
}

std::vector<cplx> ShiftedSystem::to_inner(const std::vector<cplx>& v) const {
  std::vector<cplx> x(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) x[k] = shift_ + scale_ * v[k];
  return x;
}

std::vector<cplx> ShiftedSystem::from_inner(const std::vector<cplx>& x) const {
  std::vector<cplx> v(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) v[k] = (x[k] - shift_) / scale_;
  return v;
}

std::shared_ptr<const ShiftedSystem> tracking_form(const AnisotropyRegime& regime, int N, int M) {
  auto inner = std::make_shared<BetheSystem>(regime, N, M);
  if (regime.is_xxx()) return std::make_shared<ShiftedSystem>(inner, 0.0, 1.0, 1.0);
  // Each of the 2N + 2(M-1) factors is O(s) near the roots and the two
  // sides agree to leading order, hence one more power.
  const double s = std::abs(regime.q() - 1.0);
  const double eq_scale = std::pow(s, -(2 * N + 2 * M - 1));
  return std::make_shared<ShiftedSystem>(inner, 1.0, s, eq_scale);
}

int bethe_degree(const AnisotropyRegime& regime, int N, int M) {
  return regime.is_xxx() ? 2 * N + 2 * M - 3 : 2 * N + 3 * (M - 1);
}

PolySystem build_system_x(int N, int M, const AnisotropyRegime& regime) {
  if (!regime.is_xxz()) throw std::invalid_argument("build_system_x needs an XXZ regime");
  if (M < 1 || M > N / 2) throw std::invalid_argument("build_system_x: need 1 <= M <= N/2");
  const cplx q = regime.q(), q2 = q * q;
  FactorBuilder fb{M};
  std::vector<Polynomial> eqs;
  for (int k = 0; k < M; ++k) {
    TermMap L = power(add(fb.var(k, q), fb.constant(-1.0)), 2 * N, M);
    TermMap R = power(add(fb.var(k, 1.0), fb.constant(-q)), 2 * N, M);
    for (int j = 0; j < M; ++j) {
      if (j == k) continue;
      L = multiply(L, add(fb.var(k, 1.0), fb.var(j, -q2)));
      L = multiply(L, add(fb.prod(k, j, 1.0), fb.constant(-q2)));
      R = multiply(R, add(fb.var(k, q2), fb.var(j, -1.0)));
      R = multiply(R, add(fb.prod(k, j, q2), fb.constant(-1.0)));
    }
    eqs.push_back(to_polynomial(add(L, R, -1.0)));
  }
  PolySystem sys(M, std::move(eqs), std::vector<int>(M, bethe_degree(regime, N, M)));
  sys.attach_fast(std::make_shared<BetheSystem>(regime, N, M));
  return sys;
}

PolySystem build_system_xxx(int N, int M) {
  if (M < 1 || M > N / 2) throw std::invalid_argument("build_system_xxx: need 1 <= M <= N/2");
  const cplx i(0.0, 1.0);
  FactorBuilder fb{M};
  std::vector<Polynomial> eqs;
  for (int k = 0; k < M; ++k) {
    TermMap L = power(add(fb.var(k, 1.0), fb.constant(0.5 * i)), 2 * N, M);
    TermMap R = power(add(fb.var(k, 1.0), fb.constant(-0.5 * i)), 2 * N, M);
    for (int j = 0; j < M; ++j) {
      if (j == k) continue;
      L = multiply(L, add(add(fb.var(k, 1.0), fb.var(j, -1.0)), fb.constant(-i)));
      L = multiply(L, add(add(fb.var(k, 1.0), fb.var(j, 1.0)), fb.constant(-i)));
      R = multiply(R, add(add(fb.var(k, 1.0), fb.var(j, -1.0)), fb.constant(i)));
      R = multiply(R, add(add(fb.var(k, 1.0), fb.var(j, 1.0)), fb.constant(i)));
    }
    eqs.push_back(to_polynomial(add(L, R, -1.0)));
  }
  const auto xxx = AnisotropyRegime::xxx();
  PolySystem sys(M, std::move(eqs), std::vector<int>(M, bethe_degree(xxx, N, M)));
  sys.attach_fast(std::make_shared<BetheSystem>(xxx, N, M));
  return sys;
}

PolySystem build_system(int N, int M, const AnisotropyRegime& regime) {
  return regime.is_xxx() ? build_system_xxx(N, M) : build_system_x(N, M, regime);
}

}  // namespace xxz
