#include "doctest.h"

#include <fstream>

#include "xxz/census.hpp"
#include "xxz/reference.hpp"

using namespace xxz;

namespace {

nlohmann::json load_tables() {
  std::ifstream in(std::string(XXZ_DATA_DIR) + "/reference_tables.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

std::vector<long long> values(const nlohmann::json& row) { return row["values"].get<std::vector<long long>>(); }

}  // namespace

TEST_CASE("bracket rules reproduce every tabulated row") {
  const auto t = load_tables();
  int rows = 0;
  for (const auto& kind : {"counts", "degeneracies"})
    for (const auto& [key, byN] : t[kind].items()) {
      const auto rg = AnisotropyRegime::parse(key);
      for (const auto& [n, row] : byN.items()) {
        const int N = std::stoi(n);
        const auto r = std::string(kind) == "counts" ? count_row(N, rg, values(row)) : degeneracy_row(N, rg, values(row));
        INFO(kind, " ", key, " N=", N);
        CHECK(r.to_json()["brackets"] == row["brackets"]);
        ++rows;
      }
    }
  CHECK(rows > 50);
}

TEST_CASE("row rendering") {
  const auto rg = AnisotropyRegime::root_of_unity(2);
  CHECK(count_row(9, rg, {1, 8, 24, 32, 16}).render() == "1 8 24 [27] 32 [48] 16 [42]");
  CHECK(degeneracy_row(9, rg, {32, 16, 8, 4, 2}).render() == "32 [10] 16 [8] 8 [6] 4 2");
  CHECK(degeneracy_row(8, rg, {32, 16, 8, 4, 0}).render() == "32 [16] 16 [12] 8 4 0");
  CHECK(count_row(4, AnisotropyRegime::xxx(), {1, 3, 2}).render() == "1 3 2");
}

TEST_CASE("path budget and routing") {
  CHECK(total_degree_paths(8, 3, AnisotropyRegime::root_of_unity(3)) == 22 * 22 * 22);
  CHECK(total_degree_paths(5, 0, AnisotropyRegime::xxx()) == 0);
  const auto rg = AnisotropyRegime::generic(0.1);
  CensusOptions hom, tq;
  tq.budget = 0;
  const auto a = measure_counts(5, rg, hom);
  const auto b = measure_counts(5, rg, tq);
  REQUIRE(a.size() == 3);
  REQUIRE(b.size() == 3);
  for (int M = 0; M <= 2; ++M) {
    CHECK(a[M].route == (M ? Route::Homotopy : Route::Trivial));
    CHECK(b[M].route == (M ? Route::TQ : Route::Trivial));
    CHECK(static_cast<long long>(a[M].admissible.size()) == predicted_count(5, M, rg));
    REQUIRE(a[M].admissible.size() == b[M].admissible.size());
    for (std::size_t k = 0; k < a[M].admissible.size(); ++k)
      CHECK(same_roots(a[M].admissible[k].roots, b[M].admissible[k].roots, 1e-8));
  }
  CHECK(measure_counts(6, rg, hom, 2).size() == 1);
  CHECK_THROWS_AS(measure_counts(11, AnisotropyRegime::xxx(), tq, 5), BudgetExceeded);
  CHECK_THROWS_AS(measure_counts(6, rg, hom, 4), std::invalid_argument);
}

TEST_CASE("predicted counts and measured degeneracies") {
  const auto p2 = AnisotropyRegime::root_of_unity(2);
  CHECK(predicted_count(9, 2, p2) == 24);
  CHECK(predicted_count(7, 3, AnisotropyRegime::xxx()) == 14);
  const auto t = load_tables();
  for (int p = 2; p <= 3; ++p) {
    const auto rg = AnisotropyRegime::root_of_unity(p);
    const auto c = run_tq(6, rg);
    CHECK(measured_degeneracies(c) == values(t["degeneracies"][rg.to_string()]["6"]));
    for (int M = 0; M <= 3; ++M)
      CHECK(predicted_count(6, M, rg) == values(t["counts"][rg.to_string()]["6"])[M]);
  }
}

TEST_CASE("embedded reference data") {
  const auto xxx = AnisotropyRegime::xxx();
  const auto s = reference_solutions(xxx, 5, 2);
  REQUIRE(s.size() == 5);
  CHECK(has_reference_solutions(AnisotropyRegime::root_of_unity(3), 8, 3));
  CHECK_FALSE(has_reference_solutions(xxx, 9, 2));
  const auto row = reference_row(TableKind::Counts, AnisotropyRegime::root_of_unity(2), 9);
  REQUIRE(row);
  CHECK(row->render() == "1 8 24 [27] 32 [48] 16 [42]");
  CHECK_FALSE(reference_row(TableKind::Degeneracies, xxx, 4));

  auto shifted = s;
  shifted[0].roots[0] += cplx(2e-8, 0.0);
  shifted.pop_back();
  const auto g = compare_solutions(shifted, s, 1e-8);
  CHECK(g.matched == 3);
  CHECK(g.missing.size() == 2);
  CHECK(g.extra.size() == 1);
  CHECK(compare_solutions(s, s).ok());
}
