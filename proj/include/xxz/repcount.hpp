#pragma once

// Representation-theoretic bookkeeping for the U_q(sl2)-invariant open XXZ
// chain: su(2) multiplicities, Temperley-Lieb irreducible dimensions,
// tilting-module dimensions and the degeneracy corrections n_j / n_jk.
//
// Spins are carried as twice their value so half-integers stay exact.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace xxz {

using BigInt = boost::multiprecision::cpp_int;

/// Spin label stored as 2j.
struct SpinLabel {
  int twoJ = 0;

  constexpr SpinLabel() = default;
  constexpr explicit SpinLabel(int two_j) : twoJ(two_j) {}

  /// Spin of the highest-weight sector with M flipped spins, j = N/2 - M.
  static constexpr SpinLabel from_magnons(int N, int M) { return SpinLabel(N - 2 * M); }
  constexpr int magnons(int N) const { return (N - twoJ) / 2; }
  constexpr double value() const { return 0.5 * twoJ; }

  friend constexpr auto operator<=>(SpinLabel, SpinLabel) = default;
};

struct DecompositionEntry {
  SpinLabel spin;
  BigInt multiplicity;
  std::int64_t dimension = 0;
};

/// Direct-sum decomposition of (C^2)^{⊗N}; p == 0 marks generic q / XXX.
struct DecompositionTable {
  int N = 0;
  int p = 0;
  std::vector<DecompositionEntry> entries;
};

/// n_jk (T_k spectrum-degenerate with each copy of T_j, k < j) and n_j.
struct DegeneracyCorrections {
  std::map<std::pair<SpinLabel, SpinLabel>, BigInt> njk;
  std::map<SpinLabel, BigInt> nj;

  BigInt n_jk(SpinLabel j, SpinLabel k) const;
  BigInt n_j(SpinLabel j) const;
  bool empty() const { return njk.empty() && nj.empty(); }
};

BigInt binomial(int n, int k);
BigInt double_factorial(int n);
BigInt pow2(int e);

/// d_j = C(N, N/2-j) - C(N, N/2-j-1); zero for j > N/2.
BigInt multiplicity_d(int N, SpinLabel j);

/// dim T_j at q = e^{iπ/p}.
std::int64_t tilting_dim(SpinLabel j, int p);

/// Dimension d_j^0 of the irreducible Temperley-Lieb module at δ = 2cos(π/p).
BigInt tl_dim_d0(int N, SpinLabel j, int p);

DecompositionTable decomposition(int N, int p);
DecompositionTable decomposition_generic(int N);
bool check_dimension_sum(const DecompositionTable& table);

BigInt count_generic(int N, int M);
std::int64_t degeneracy_generic(int N, int M);

BigInt count_root_of_unity(int N, int M, int p, const DegeneracyCorrections& corr);
std::int64_t degeneracy_root_of_unity(int N, int M, int p, const DegeneracyCorrections& corr);

/// Alternating chain sum giving n_j from the n_jk table.
std::map<SpinLabel, BigInt> nj_from_njk(int N, int p, const DegeneracyCorrections& corr);

BigInt p2_count(int N, int M);
std::int64_t p2_degeneracy(int N, int M);
BigInt p2_njk(SpinLabel j, SpinLabel k);

/// n_jk from the p = 2 closed form for every pair in the N-site decomposition,
/// with n_j filled in by nj_from_njk.
DegeneracyCorrections p2_corrections(int N);

/// Σ_M counts[M]·degens[M] == 2^N.
bool completeness_sum(const std::vector<BigInt>& counts,
                      const std::vector<std::int64_t>& degens, int N);

}  // namespace xxz
