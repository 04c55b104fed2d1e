#include "xxz/reference.hpp"

#include <algorithm>
#include <cmath>

namespace xxz {

namespace detail {
extern const char* const kReferenceRoots;
extern const char* const kReferenceTables;
}  // namespace detail

const nlohmann::json& reference_tables() {
  static const nlohmann::json j = nlohmann::json::parse(detail::kReferenceTables);
  return j;
}

const nlohmann::json& reference_roots() {
  static const nlohmann::json j = nlohmann::json::parse(detail::kReferenceRoots);
  return j;
}

std::vector<SolutionVector> reference_solutions(const AnisotropyRegime& regime, int N, int M) {
  std::vector<std::pair<int, SolutionVector>> found;
  for (const auto& e : reference_roots()["solutions"]) {
    if (e["N"].get<int>() != N || e["M"].get<int>() != M) continue;
    if (!(AnisotropyRegime::parse(e["regime"].get<std::string>()) == regime)) continue;
    auto s = solution_from_json(e);
    s.roots = canonical_roots(s.roots, regime);
    found.emplace_back(e.value("index", 0), std::move(s));
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<SolutionVector> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

bool has_reference_solutions(const AnisotropyRegime& regime, int N, int M) {
  return !reference_solutions(regime, N, M).empty();
}

std::optional<TableRow> reference_row(TableKind kind, const AnisotropyRegime& regime, int N) {
  const auto& t = reference_tables()[kind == TableKind::Counts ? "counts" : "degeneracies"];
  const auto key = regime.to_string();
  if (!t.contains(key) || !t[key].contains(std::to_string(N))) return std::nullopt;
  const auto& row = t[key][std::to_string(N)];
  TableRow r;
  r.N = N;
  r.values = row["values"].get<std::vector<long long>>();
  for (const auto& b : row["brackets"])
    r.brackets.push_back(b.is_null() ? std::nullopt : std::optional<long long>(b.get<long long>()));
  return r;
}

namespace {

bool coordinatewise(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (cplx z : a) {
    bool hit = false;
    for (std::size_t k = 0; k < b.size() && !hit; ++k)
      if (!used[k] && std::abs(z.real() - b[k].real()) <= tol && std::abs(z.imag() - b[k].imag()) <= tol)
        used[k] = hit = true;
    if (!hit) return false;
  }
  return true;
}

}  // namespace

GoldenComparison compare_solutions(const std::vector<SolutionVector>& measured,
                                   const std::vector<SolutionVector>& expected, double tol) {
  GoldenComparison g;
  g.expected = static_cast<int>(expected.size());
  std::vector<bool> used(measured.size(), false);
  for (const auto& e : expected) {
    bool hit = false;
    for (std::size_t k = 0; k < measured.size() && !hit; ++k)
      if (!used[k] && coordinatewise(measured[k].roots, e.roots, tol)) used[k] = hit = true;
    if (hit)
      ++g.matched;
    else
      g.missing.push_back(e);
  }
  for (std::size_t k = 0; k < measured.size(); ++k)
    if (!used[k]) g.extra.push_back(measured[k]);
  return g;
}

}  // namespace xxz
