#include "xxz/census.hpp"

#include <algorithm>

#include "xxz/chain.hpp"
#include "xxz/poly.hpp"
#include "xxz/repcount.hpp"

namespace xxz {

std::string to_string(Route r) {
  switch (r) {
    case Route::Trivial: return "trivial";
    case Route::Homotopy: return "homotopy";
    case Route::TQ: return "tq";
  }
  return "?";
}

BudgetExceeded::BudgetExceeded(int n, int m, long long p)
    : std::runtime_error("N=" + std::to_string(n) + " M=" + std::to_string(m) + " needs " + std::to_string(p) +
                         " homotopy paths, above the budget, and the T-Q route is limited to N <= 10"),
      N(n),
      M(m),
      paths(p) {}

long long total_degree_paths(int N, int M, const AnisotropyRegime& regime) {
  if (M == 0) return 0;
  long long t = 1;
  const long long d = bethe_degree(regime, N, M);
  for (int k = 0; k < M; ++k) t *= d;
  return t;
}

std::vector<MeasuredCount> measure_counts(int N, const AnisotropyRegime& regime, const CensusOptions& opt,
                                          int only_M) {
  if (N < 1) throw std::invalid_argument("measure_counts: N >= 1");
  if (only_M > N / 2) throw std::invalid_argument("measure_counts: M <= N/2");
  std::vector<int> Ms;
  for (int M = 0; M <= N / 2; ++M)
    if (only_M < 0 || M == only_M) Ms.push_back(M);
  std::optional<TQCensus> tq;
  std::vector<MeasuredCount> out;
  for (int M : Ms) {
    MeasuredCount mc;
    mc.M = M;
    mc.paths = total_degree_paths(N, M, regime);
    if (M == 0) {
      mc.route = Route::Trivial;
      mc.admissible.push_back(make_solution(regime, N, {}));
    } else if (mc.paths <= opt.budget) {
      mc.route = Route::Homotopy;
      mc.admissible = run_homotopy(N, M, regime, opt.tracker).admissible;
    } else {
      if (N > 10) throw BudgetExceeded(N, M, mc.paths);
      if (!tq) tq = run_tq(N, regime);
      mc.route = Route::TQ;
      mc.admissible = tq->admissible(M);
      mc.degeneracies = tq->degeneracies(M);
    }
    out.push_back(std::move(mc));
  }
  return out;
}

long long predicted_count(int N, int M, const AnisotropyRegime& regime) {
  if (!regime.is_root_of_unity()) return static_cast<long long>(count_generic(N, M));
  if (regime.p == 2) return static_cast<long long>(p2_count(N, M));
  if (N > 10) return -1;
  return static_cast<long long>(count_root_of_unity(N, M, regime.p, measure_njk(N, regime).corrections));
}

std::vector<long long> predicted_counts(int N, const AnisotropyRegime& regime) {
  std::vector<long long> out;
  if (regime.is_root_of_unity() && regime.p > 2) {
    if (N > 10) return std::vector<long long>(N / 2 + 1, -1);
    const auto corr = measure_njk(N, regime).corrections;
    for (int M = 0; M <= N / 2; ++M) out.push_back(static_cast<long long>(count_root_of_unity(N, M, regime.p, corr)));
    return out;
  }
  for (int M = 0; M <= N / 2; ++M) out.push_back(predicted_count(N, M, regime));
  return out;
}

std::vector<long long> predicted_degeneracies(int N, const AnisotropyRegime& regime) {
  std::vector<long long> out;
  if (!regime.is_root_of_unity()) {
    for (int M = 0; M <= N / 2; ++M) out.push_back(degeneracy_generic(N, M));
  } else if (regime.p == 2) {
    for (int M = 0; M <= N / 2; ++M) out.push_back(p2_degeneracy(N, M));
  } else if (N > 10) {
    out.assign(N / 2 + 1, -1);
  } else {
    const auto corr = measure_njk(N, regime).corrections;
    for (int M = 0; M <= N / 2; ++M) out.push_back(degeneracy_root_of_unity(N, M, regime.p, corr));
  }
  return out;
}

std::string TableRow::render() const {
  std::string s;
  for (std::size_t M = 0; M < values.size(); ++M) {
    if (M) s += ' ';
    s += std::to_string(values[M]);
    if (M < brackets.size() && brackets[M]) s += " [" + std::to_string(*brackets[M]) + "]";
  }
  return s;
}

nlohmann::json TableRow::to_json() const {
  nlohmann::json b = nlohmann::json::array();
  for (const auto& x : brackets) b.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
  return {{"N", N}, {"values", values}, {"brackets", b}};
}

long long count_reference(int N, int M, const AnisotropyRegime& regime) {
  const auto j = SpinLabel::from_magnons(N, M);
  return regime.is_root_of_unity() ? static_cast<long long>(tl_dim_d0(N, j, regime.p))
                                   : static_cast<long long>(multiplicity_d(N, j));
}

long long degeneracy_reference(int N, int M, const AnisotropyRegime& regime) {
  const auto j = SpinLabel::from_magnons(N, M);
  return regime.is_root_of_unity() ? tilting_dim(j, regime.p) : j.twoJ + 1;
}

TableRow count_row(int N, const AnisotropyRegime& regime, const std::vector<long long>& counts) {
  TableRow r;
  r.N = N;
  r.values = counts;
  for (std::size_t M = 0; M < counts.size(); ++M) {
    const long long ref = count_reference(N, static_cast<int>(M), regime);
    r.brackets.push_back(counts[M] != ref ? std::optional<long long>(ref) : std::nullopt);
  }
  return r;
}

TableRow degeneracy_row(int N, const AnisotropyRegime& regime, const std::vector<long long>& degeneracies) {
  TableRow r;
  r.N = N;
  r.values = degeneracies;
  for (std::size_t M = 0; M < degeneracies.size(); ++M) {
    const long long dim = degeneracy_reference(N, static_cast<int>(M), regime);
    const bool differs = degeneracies[M] > 0 && degeneracies[M] != dim;
    r.brackets.push_back(differs ? std::optional<long long>(dim) : std::nullopt);
  }
  return r;
}

std::vector<long long> measured_degeneracies(const TQCensus& census) {
  std::vector<long long> out;
  for (int M = 0; M <= census.N / 2; ++M) {
    const auto d = census.degeneracies(M);
    if (d.empty())
      out.push_back(0);
    else if (d.front() != d.back())
      out.push_back(-1);
    else
      out.push_back(d.front());
  }
  return out;
}

}  // namespace xxz
