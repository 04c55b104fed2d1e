#include "xxz/repcount.hpp"

#include <stdexcept>
#include <string>

namespace xxz {

namespace {

void require_parity(int N, SpinLabel j) {
  if (N < 1) throw std::invalid_argument("chain length must be positive");
  if (j.twoJ < 0) throw std::invalid_argument("negative spin label");
  if ((j.twoJ - N) % 2 != 0)
    throw std::invalid_argument("spin 2j=" + std::to_string(j.twoJ) +
                                " has the wrong parity for N=" + std::to_string(N));
}

void require_p(int p) {
  if (p < 2) throw std::invalid_argument("root-of-unity order p must be >= 2");
}

void require_magnons(int N, int M) {
  if (N < 1) throw std::invalid_argument("chain length must be positive");
  if (M < 0 || M > N / 2)
    throw std::invalid_argument("M=" + std::to_string(M) + " outside 0..floor(N/2)");
}

// Multiplicity without argument checks; negative or oversize spins give zero.
BigInt d_unchecked(int N, int twoJ) {
  if (twoJ < 0 || twoJ > N) return 0;
  const int a = (N - twoJ) / 2;
  return binomial(N, a) - binomial(N, a - 1);
}

void validate_corrections(const DegeneracyCorrections& corr, int p) {
  for (const auto& [key, value] : corr.njk) {
    const auto [j, k] = key;
    if (value == 0) continue;
    if (value < 0) throw std::invalid_argument("n_jk must be non-negative");
    if (k >= j) throw std::invalid_argument("n_jk must vanish for k >= j");
    if ((j.twoJ - k.twoJ) % 2 != 0) throw std::invalid_argument("n_jk mixes spin parities");
    if (p > 0 && ((j.twoJ - k.twoJ) / 2) % p != 0)
      throw std::invalid_argument("n_jk must vanish unless (j-k) mod p == 0");
  }
}

}  // namespace

BigInt DegeneracyCorrections::n_jk(SpinLabel j, SpinLabel k) const {
  auto it = njk.find({j, k});
  return it == njk.end() ? BigInt(0) : it->second;
}

BigInt DegeneracyCorrections::n_j(SpinLabel j) const {
  auto it = nj.find(j);
  return it == nj.end() ? BigInt(0) : it->second;
}

BigInt binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt double_factorial(int n) {
  if (n < -1) throw std::invalid_argument("double factorial of a negative argument");
  BigInt r = 1;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

BigInt pow2(int e) {
  BigInt r = 1;
  r <<= e;
  return r;
}

BigInt multiplicity_d(int N, SpinLabel j) {
  require_parity(N, j);
  return d_unchecked(N, j.twoJ);
}

std::int64_t tilting_dim(SpinLabel j, int p) {
  require_p(p);
  if (j.twoJ < 0) throw std::invalid_argument("negative spin label");
  const std::int64_t dim = j.twoJ + 1;
  const std::int64_t s = dim % p;
  if (dim <= p || s == 0) return dim;
  return 2 * (dim - s);
}

BigInt tl_dim_d0(int N, SpinLabel j, int p) {
  require_p(p);
  require_parity(N, j);
  // r2 = 2 (j mod p), exact for half-integer j.
  const int r2 = j.twoJ % (2 * p);
  if (r2 == 2 * p - 1 || r2 == p - 1) return d_unchecked(N, j.twoJ);

  const int t = r2 > p - 1 ? 1 : 0;
  BigInt d0 = 0;
  for (int n = 0; j.twoJ + 2 * n * p <= N; ++n) d0 += d_unchecked(N, j.twoJ + 2 * n * p);
  for (int n = t + 1;; ++n) {
    const int twoK = j.twoJ + 2 * n * p - 2 - 2 * r2;
    if (twoK > N) break;
    d0 -= d_unchecked(N, twoK);
  }
  return d0;
}

DecompositionTable decomposition(int N, int p) {
  require_p(p);
  if (N < 1) throw std::invalid_argument("chain length must be positive");
  DecompositionTable table{N, p, {}};
  for (int twoJ = N % 2; twoJ <= N; twoJ += 2) {
    const SpinLabel j(twoJ);
    BigInt mult = tl_dim_d0(N, j, p);
    if (mult > 0) table.entries.push_back({j, std::move(mult), tilting_dim(j, p)});
  }
  return table;
}

DecompositionTable decomposition_generic(int N) {
  if (N < 1) throw std::invalid_argument("chain length must be positive");
  DecompositionTable table{N, 0, {}};
  for (int twoJ = N % 2; twoJ <= N; twoJ += 2) {
    BigInt mult = d_unchecked(N, twoJ);
    if (mult > 0) table.entries.push_back({SpinLabel(twoJ), std::move(mult), twoJ + 1});
  }
  return table;
}

bool check_dimension_sum(const DecompositionTable& table) {
  BigInt total = 0;
  for (const auto& e : table.entries) total += e.multiplicity * e.dimension;
  return total == pow2(table.N);
}

BigInt count_generic(int N, int M) {
  require_magnons(N, M);
  if (M == 0) return 1;
  return binomial(N, M) - binomial(N, M - 1);
}

std::int64_t degeneracy_generic(int N, int M) {
  require_magnons(N, M);
  return N - 2 * M + 1;
}

BigInt count_root_of_unity(int N, int M, int p, const DegeneracyCorrections& corr) {
  require_magnons(N, M);
  validate_corrections(corr, p);
  const auto j = SpinLabel::from_magnons(N, M);
  return tl_dim_d0(N, j, p) - corr.n_j(j);
}

std::int64_t degeneracy_root_of_unity(int N, int M, int p, const DegeneracyCorrections& corr) {
  require_magnons(N, M);
  validate_corrections(corr, p);
  const auto j = SpinLabel::from_magnons(N, M);
  std::int64_t total = tilting_dim(j, p);
  for (int twoK = N % 2; twoK < j.twoJ; twoK += 2) {
    const BigInt n = corr.n_jk(j, SpinLabel(twoK));
    if (n != 0) total += n.convert_to<std::int64_t>() * tilting_dim(SpinLabel(twoK), p);
  }
  return total;
}

std::map<SpinLabel, BigInt> nj_from_njk(int N, int p, const DegeneracyCorrections& corr) {
  require_p(p);
  validate_corrections(corr, p);
  std::vector<int> spins;
  for (int twoJ = N % 2; twoJ <= N; twoJ += 2) spins.push_back(twoJ);
  const std::size_t n = spins.size();

  std::vector<BigInt> chain(n);
  for (std::size_t a = 0; a < n; ++a) chain[a] = tl_dim_d0(N, SpinLabel(spins[a]), p);

  std::vector<BigInt> acc(n, 0);
  int sign = 1;
  // n_jk is strictly lower triangular, so the chain terminates after n steps.
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<BigInt> next(n, 0);
    bool nonzero = false;
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t a = b + 1; a < n; ++a) {
        if (chain[a] == 0) continue;
        const BigInt nab = corr.n_jk(SpinLabel(spins[a]), SpinLabel(spins[b]));
        if (nab != 0) next[b] += chain[a] * nab;
      }
      if (next[b] != 0) nonzero = true;
    }
    if (!nonzero) break;
    for (std::size_t b = 0; b < n; ++b) acc[b] += sign * next[b];
    sign = -sign;
    chain = std::move(next);
  }

  std::map<SpinLabel, BigInt> out;
  for (std::size_t a = 0; a < n; ++a) out[SpinLabel(spins[a])] = acc[a];
  return out;
}

BigInt p2_count(int N, int M) {
  require_magnons(N, M);
  if (M == 0) return 1;
  const int top = N % 2 == 0 ? N - 2 : N - 1;
  if (top - 2 * M < 0) return 0;
  BigInt numer = double_factorial(top);
  BigInt denom = double_factorial(top - 2 * M);
  for (int i = 2; i <= M; ++i) denom *= i;
  return numer / denom;
}

std::int64_t p2_degeneracy(int N, int M) {
  require_magnons(N, M);
  if (N % 2 == 0 && 2 * M == N) return 0;
  return std::int64_t{1} << (N / 2 - M + 1);
}

BigInt p2_njk(SpinLabel j, SpinLabel k) {
  if ((j.twoJ - k.twoJ) % 2 != 0)
    throw std::invalid_argument("p2_njk needs both spins integer or both half-odd");
  // Half-odd spins are shifted up by 1/2 onto the integer formula.
  const int shift = j.twoJ % 2;
  const int jj = (j.twoJ + shift) / 2;
  const int kk = (k.twoJ + shift) / 2;
  if (jj <= kk || (jj - kk) % 2 != 0 || kk == 0) return 0;
  BigInt num = binomial(jj - 1, (jj - kk) / 2) * (2 * kk);
  if (num % (jj + kk) != 0) throw std::logic_error("p2_njk closed form is not integral");
  return num / (jj + kk);
}

DegeneracyCorrections p2_corrections(int N) {
  DegeneracyCorrections corr;
  for (int twoJ = N % 2; twoJ <= N; twoJ += 2) {
    for (int twoK = N % 2; twoK < twoJ; twoK += 2) {
      BigInt v = p2_njk(SpinLabel(twoJ), SpinLabel(twoK));
      if (v != 0) corr.njk[{SpinLabel(twoJ), SpinLabel(twoK)}] = v;
    }
  }
  for (auto& [j, v] : nj_from_njk(N, 2, corr))
    if (v != 0) corr.nj[j] = v;
  return corr;
}

bool completeness_sum(const std::vector<BigInt>& counts,
                      const std::vector<std::int64_t>& degens, int N) {
  if (counts.size() != degens.size())
    throw std::invalid_argument("count and degeneracy tables differ in length");
  BigInt total = 0;
  for (std::size_t m = 0; m < counts.size(); ++m) total += counts[m] * degens[m];
  return total == pow2(N);
}

}  // namespace xxz
