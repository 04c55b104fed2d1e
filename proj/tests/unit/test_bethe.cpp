#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <numbers>

#include "xxz/bethe.hpp"

using namespace xxz;

namespace {

const cplx I(0.0, 1.0);

nlohmann::json load_reference() {
  std::ifstream in(std::string(XXZ_DATA_DIR) + "/reference_roots.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("regime parsing") {
  CHECK(AnisotropyRegime::parse("xxx").is_xxx());
  auto r = AnisotropyRegime::parse("p=3");
  CHECK(r.kind == RegimeKind::RootOfUnity);
  CHECK(std::abs(std::pow(r.q(), 6) - 1.0) < 1e-14);
  auto g = AnisotropyRegime::parse("eta=0.1+0.25i");
  CHECK(g.eta == cplx(0.1, 0.25));
  CHECK(AnisotropyRegime::parse(g.to_string()) == g);
  CHECK(parse_complex("-2.5e-3-4i") == cplx(-2.5e-3, -4.0));
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("-0.5j") == cplx(0, -0.5));
  CHECK_THROWS_AS(AnisotropyRegime::parse("p=1"), std::invalid_argument);
  CHECK_THROWS_AS(AnisotropyRegime::parse("q=2"), std::invalid_argument);
  CHECK_THROWS_AS(AnisotropyRegime::parse("eta=abc"), std::invalid_argument);
  CHECK(AnisotropyRegime::generic(cplx(0, std::numbers::pi / 3)).looks_like_root_of_unity());
  CHECK_FALSE(AnisotropyRegime::generic(0.1).looks_like_root_of_unity());
}

TEST_CASE("residual examples") {
  CHECK(residual_xxx({0.5}, 2) < 1e-12);
  CHECK(residual_xxx({0.6683262276726571, 0.2309546565991595}, 4) < 1e-10);
  CHECK(residual_xxx({}, 4) == 0.0);
  CHECK(residual_xxx({0.4}, 2) > 1e-3);
  CHECK(residual_x({cplx(0.9950207489532265, 0.0996679946249558)}, 2, AnisotropyRegime::generic(0.1)) < 1e-10);
  CHECK(residual_x({3.732050807568877}, 2, AnisotropyRegime::root_of_unity(3)) < 1e-10);
  CHECK(residual_x({1.45314130298278, 3.20337817632093}, 4, AnisotropyRegime::root_of_unity(4)) < 1e-10);
  CHECK(std::isinf(residual_x({0.0}, 2, AnisotropyRegime::root_of_unity(3))));
  CHECK(std::isinf(residual_xxx({cplx(NAN, 0)}, 2)));
}

TEST_CASE("energies") {
  CHECK(std::abs(energy({}, 2, AnisotropyRegime::xxx()) - 1.0) < 1e-15);
  CHECK(std::abs(energy({0.5}, 2, AnisotropyRegime::xxx()) + 3.0) < 1e-12);
  // Oracle: singlet energy of σ1·σ2 from a 4x4 diagonalization.
  Eigen::Matrix4d h;
  h << 1, 0, 0, 0, 0, -1, 2, 0, 0, 2, -1, 0, 0, 0, 0, 1;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
  CHECK(std::abs(energy({0.5}, 2, AnisotropyRegime::xxx()).real() - es.eigenvalues()(0)) < 1e-12);
  auto g = AnisotropyRegime::generic(0.1);
  CHECK(std::abs(energy({}, 5, g) - 4.0 * std::cosh(0.1)) < 1e-15);
  CHECK_THROWS_AS(energy({0.5 * I}, 2, AnisotropyRegime::xxx()), std::domain_error);
  CHECK_THROWS_AS(energy({g.q()}, 2, g), std::domain_error);
}

TEST_CASE("canonicalization") {
  auto xxx = AnisotropyRegime::xxx();
  CHECK(canonical_roots({-0.5}, xxx)[0] == cplx(0.5));
  CHECK(canonical_roots({cplx(0.0, -0.3)}, xxx)[0] == cplx(0.0, 0.3));
  auto g = AnisotropyRegime::generic(0.1);
  CHECK(std::abs(canonical_roots({0.25}, g)[0] - 4.0) < 1e-15);
  auto s = canonical_roots({0.5, 0.2886751345948129}, xxx);
  CHECK(s[0].real() < s[1].real());
  auto a = canonical_roots({cplx(0.7, -0.5), cplx(-0.7, -0.5)}, xxx);
  CHECK(a[0] == cplx(0.7, -0.5));
  CHECK(a[1] == cplx(0.7, 0.5));
}

TEST_CASE("admissibility verdicts") {
  auto xxx = AnisotropyRegime::xxx();
  SolutionVector sing{xxx, 4, {0.5 * I, -0.5 * I}, 0.0, Verdict::NonCanonical};
  CHECK(is_admissible(sing) == Verdict::SingularExcluded);
  CHECK(make_solution(xxx, 4, {0.5 * I, -0.5 * I}).verdict == Verdict::SingularExcluded);
  auto g = AnisotropyRegime::generic(0.1);
  CHECK(make_solution(g, 3, {-1.0}).verdict == Verdict::ZeroOrHalfPiExcluded);
  CHECK(make_solution(xxx, 3, {0.0}).verdict == Verdict::ZeroOrHalfPiExcluded);
  CHECK(make_solution(xxx, 4, {0.3, -0.3}).verdict == Verdict::Coincident);
  CHECK(make_solution(xxx, 4, {0.3, 0.4}).verdict == Verdict::Admissible);
  SolutionVector raw{xxx, 4, {-0.3}, 0.0, Verdict::NonCanonical};
  CHECK(is_admissible(raw) == Verdict::NonCanonical);

  auto p2 = AnisotropyRegime::root_of_unity(2);
  const cplx c(1.7, 0.4);
  CHECK(make_solution(p2, 5, {c, -c}).verdict == Verdict::PStringExcluded);
  CHECK(make_solution(p2, 5, {c, -1.0 / c}).verdict == Verdict::PStringExcluded);
  CHECK(contains_p_string(p_string(cplx(2.0, 0.3), 3), 3));
  CHECK_FALSE(contains_p_string({2.0, 3.0, 5.0}, 3));
}

TEST_CASE("appended p-strings preserve the equations") {
  for (int p : {2, 3, 4}) {
    auto rg = AnisotropyRegime::root_of_unity(p);
    // Base: the N=2 root at p=3, the empty solution otherwise.
    const int N = p == 3 ? 2 : 3;
    std::vector<cplx> base = p == 3 ? std::vector<cplx>{3.732050807568877} : std::vector<cplx>{};
    auto roots = base;
    for (cplx z : p_string(cplx(1.9, 0.7), p)) roots.push_back(z);
    CAPTURE(p);
    CHECK(residual_x(roots, N, rg) < 1e-8);
    CHECK(make_solution(rg, N, roots).verdict == Verdict::PStringExcluded);
  }
}

TEST_CASE("reference solutions are admissible") {
  const auto ref = load_reference();
  int checked = 0;
  for (const auto& rec : ref.at("solutions")) {
    auto rg = AnisotropyRegime::parse(rec.at("regime").get<std::string>());
    const int N = rec.at("N").get<int>();
    std::vector<cplx> roots;
    for (const auto& z : rec.at("roots")) roots.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    auto sol = make_solution(rg, N, roots);
    CAPTURE(rec.dump());
    CHECK(sol.residual < 1e-8);
    CHECK(sol.verdict == Verdict::Admissible);
    ++checked;
  }
  CHECK(checked == 363);
}

TEST_CASE("json round trip") {
  auto s = make_solution(AnisotropyRegime::root_of_unity(4), 4, {1.45314130298278, 3.20337817632093});
  auto back = solution_from_json(to_json(s));
  CHECK(back.regime == s.regime);
  CHECK(back.roots == s.roots);
  CHECK(back.verdict == s.verdict);
  CHECK(back.residual == s.residual);
}
