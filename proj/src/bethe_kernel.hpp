#pragma once

// Product-form Bethe equations in homogeneous coordinates, templated on the
// scalar so the same code serves tracking (complex double) and the
// extended-precision polish.

#include <array>

#include "xxz/poly.hpp"

namespace xxz::detail {

template <class T>
struct KernelParams {
  bool xxx = true;
  int N = 0;
  int M = 0;
  T q, q2;   // XXZ
  T half_i;  // XXX: i/2
  T i1;      // i
};

// Running product value and gradient over Z0..ZM.
template <class T>
struct Dual {
  T v;
  std::array<T, kMaxVars + 1> g;
};

template <class T>
inline void zero_dual(Dual<T>& d, int n, const T& value) {
  d.v = value;
  for (int a = 0; a < n; ++a) d.g[a] = T(0);
}

// d *= f where f = c0*Z0 + ck*Zk + cj*Zj (cj ignored if j < 0)
template <class T>
inline void mul_linear(Dual<T>& d, int n, const T& f, int i0, const T& c0, int ik, const T& ck, int ij,
                       const T& cj) {
  for (int a = 0; a < n; ++a) d.g[a] *= f;
  d.g[i0] += d.v * c0;
  d.g[ik] += d.v * ck;
  if (ij >= 0) d.g[ij] += d.v * cj;
  d.v *= f;
}

template <class T>
inline T ipow(const T& base, int e) {
  T r(1);
  T b = base;
  while (e > 0) {
    if (e & 1) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}

/// F[k] and row-major J[k*(M+1) + a] for the M homogenized equations.
template <class T>
void bethe_kernel(const KernelParams<T>& P, const T* Z, T* F, T* J) {
  const int M = P.M;
  const int n = M + 1;
  const int twoN = 2 * P.N;
  const T one(1);
  const T zero(0);
  for (int k = 1; k <= M; ++k) {
    const T& z0 = Z[0];
    const T& zk = Z[k];
    if (P.xxx) {
      // Σ_m X_1..X_{m-1} (X_m - Y_m)/Z0 Y_{m+1}..Y_n, accumulated as
      // D_m = D_{m-1} X_m + c_m Q_{m-1}, Q_m = Q_{m-1} Y_m.
      Dual<T> D, Q;
      zero_dual(D, n, zero);
      zero_dual(Q, n, one);
      auto step = [&](const T& X, const T& Y, const T& c, const T& cx0, const T& cy0, const T& ckk, int j,
                      const T& cjx, const T& cjy) {
        for (int a = 0; a < n; ++a) D.g[a] = D.g[a] * X + c * Q.g[a];
        D.g[0] += D.v * cx0;
        D.g[k] += D.v * ckk;
        if (j >= 0) D.g[j] += D.v * cjx;
        D.v = D.v * X + c * Q.v;
        mul_linear(Q, n, Y, 0, cy0, k, ckk, j, cjy);
      };
      const T X0 = zk + P.half_i * z0;
      const T Y0 = zk - P.half_i * z0;
      for (int r = 0; r < twoN; ++r) step(X0, Y0, P.i1, P.half_i, -P.half_i, one, -1, zero, zero);
      const T m2i = T(-2) * P.i1;
      for (int j = 1; j <= M; ++j) {
        if (j == k) continue;
        const T& zj = Z[j];
        step(zk - zj - P.i1 * z0, zk - zj + P.i1 * z0, m2i, -P.i1, P.i1, one, j, -one, -one);
        step(zk + zj - P.i1 * z0, zk + zj + P.i1 * z0, m2i, -P.i1, P.i1, one, j, one, one);
      }
      F[k - 1] = D.v;
      for (int a = 0; a < n; ++a) J[(k - 1) * n + a] = D.g[a];
    } else {
      const T& q = P.q;
      const T& q2 = P.q2;
      Dual<T> L, R;
      const T u = q * zk - z0;
      const T w = zk - q * z0;
      const T un1 = ipow(u, twoN - 1);
      const T wn1 = ipow(w, twoN - 1);
      const T nN = T(twoN);
      zero_dual(L, n, un1 * u);
      L.g[0] = -nN * un1;
      L.g[k] = nN * un1 * q;
      zero_dual(R, n, wn1 * w);
      R.g[0] = -nN * wn1 * q;
      R.g[k] = nN * wn1;
      for (int j = 1; j <= M; ++j) {
        if (j == k) continue;
        const T& zj = Z[j];
        // (Zk - q² Zj)(Zk Zj - q² Z0²)
        mul_linear(L, n, zk - q2 * zj, 0, zero, k, one, j, -q2);
        mul_linear(L, n, zk * zj - q2 * z0 * z0, 0, T(-2) * q2 * z0, k, zj, j, zk);
        // (q² Zk - Zj)(q² Zk Zj - Z0²)
        mul_linear(R, n, q2 * zk - zj, 0, zero, k, q2, j, -one);
        mul_linear(R, n, q2 * zk * zj - z0 * z0, 0, T(-2) * z0, k, q2 * zj, j, q2 * zk);
      }
      F[k - 1] = L.v - R.v;
      for (int a = 0; a < n; ++a) J[(k - 1) * n + a] = L.g[a] - R.g[a];
    }
  }
}

}  // namespace xxz::detail
