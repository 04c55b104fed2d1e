#pragma once

// Dense and matrix-free operators of the open U_q(sl2)-invariant chain,
// spectral analysis with Jordan structure, Bethe states and the empirical
// tilting-module bookkeeping.
//
// Basis convention: site k (1-based) is bit N-k of the state index and bit
// value 0 is spin up, so |0> is index 0 and S^z = N/2 - popcount.

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xxz/regime.hpp"
#include "xxz/repcount.hpp"

namespace xxz {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct OperatorMatrix {
  CMat m;
  std::string label;
};

constexpr int kMaxChainSites = 12;

Eigen::Matrix4cd r_matrix(cplx u, const AnisotropyRegime& regime);
/// (K+, K-) as diagonals; both identity for XXX.
std::pair<Eigen::Vector2cd, Eigen::Vector2cd> k_matrices(cplx u, const AnisotropyRegime& regime);

/// Matrix-free action of t(u) and B(u) on blocks of state vectors.
class ChainOperators {
 public:
  ChainOperators(int N, const AnisotropyRegime& regime);

  int N() const { return N_; }
  long dim() const { return 1L << N_; }
  const AnisotropyRegime& regime() const { return regime_; }
  /// η in the convention of the R-matrix: η for XXZ, i for XXX.
  cplx eta() const;

  CMat apply_transfer(cplx u, const CMat& X) const;
  CMat apply_B(cplx u, const CMat& X) const;

 private:
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  // ψ0, ψ1: auxiliary up / down components
  void apply_R(cplx u, int site, RowMat& p0, RowMat& p1) const;
  void apply_U(cplx u, RowMat& p0, RowMat& p1) const;

  int N_;
  AnisotropyRegime regime_;
};

OperatorMatrix transfer_matrix(cplx u, int N, const AnisotropyRegime& regime);
OperatorMatrix hamiltonian(int N, const AnisotropyRegime& regime);

/// Coefficients of H = α t'(0) + β; XXX uses the rescaled limit.
std::pair<cplx, cplx> hamiltonian_transfer_relation(int N, const AnisotropyRegime& regime);

/// n-th derivative of t(u) at 0 from a Cauchy integral on |u| = radius.
OperatorMatrix higher_charge(int n, int N, const AnisotropyRegime& regime, int points = 64,
                             double radius = 0.25);

struct QGroupGenerators {
  OperatorMatrix Sz, Splus, Sminus, K, casimir;
};
/// q = 1 gives the undeformed su(2) generators.
QGroupGenerators qgroup_generators(int N, cplx q);
/// [x]_q, with the q -> 1 limit x.
cplx qnumber(cplx x, cplx q);

std::vector<OperatorMatrix> tl_generators(int N, cplx q);

/// Basis indices of the sector with 2S^z = twoSz, ascending.
std::vector<long> sector_basis(int N, int twoSz);

struct EigenCluster {
  cplx value;
  int algebraic = 0;
  int geometric = 0;
  int jordan2 = 0;
  std::map<int, int> sz;  // 2S^z -> algebraic count
  bool flagged = false;   // singular-value gap below audit ratio
  double gap_ratio = 0.0;
};

struct SpectralReport {
  std::vector<EigenCluster> eigenvalues;  // sorted by (re, im)
  int distinct = 0;
  int dim = 0;
  double min_separation = 0.0;  // between distinct clusters, relative
  int flagged = 0;
};

struct SpectrumOptions {
  double cluster_tol = 1e-7;  // relative to the largest |eigenvalue|
  double gap_audit = 1e3;
  bool jordan = true;
};

/// A must commute with S^z; analysed sector by sector.
SpectralReport spectrum(const CMat& A, int N, const SpectrumOptions& opt = {});
/// Same, from a per-sector builder (2S^z -> block in sector_basis order).
SpectralReport spectrum_sectors(const std::map<int, CMat>& blocks, int N, const SpectrumOptions& opt = {});

/// Sector blocks of t(u) via the matrix-free action.
std::map<int, CMat> transfer_sectors(cplx u, int N, const AnisotropyRegime& regime);
std::map<int, CMat> operator_sectors(const CMat& A, int N);

nlohmann::json to_json(const SpectralReport& r);

inline const cplx kGenericU0(0.37, 0.21);

struct DistinctCounts {
  int transfer = 0;
  int hamiltonian = 0;
};
DistinctCounts distinct_eigenvalue_count(int N, const AnisotropyRegime& regime, cplx u0 = kGenericU0);

/// (a, b) in Λ(u)Q(u) = a(u)Q(u-η) + b(u)Q(u+η); η = i for XXX.
std::pair<cplx, cplx> tq_coefficients(cplx u, int N, const AnisotropyRegime& regime);
/// Λ(u) from the T-Q relation for Bethe roots (λ for XXX, x for XXZ).
cplx transfer_eigenvalue(cplx u, const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime);
/// v_k = λ_k - η/2 in the R-matrix convention.
std::vector<cplx> bethe_v(const std::vector<cplx>& roots, const AnisotropyRegime& regime);

struct BetheState {
  CVec psi;
  bool null_state = false;
};
/// Π B(v_k)|0>; rejects roots at the poles λ = 0, iπ/2.
BetheState bethe_state(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime);

struct OnShellReport {
  bool ok = false;
  double eigen_residual = 0.0;  // worst over samples
  cplx worst_sample;
  double splus = 0.0;
  double sz_residual = 0.0;
  double casimir_residual = 0.0;
  std::string failure;
};
OnShellReport verify_on_shell(const std::vector<cplx>& roots, int N, const AnisotropyRegime& regime,
                              const std::vector<cplx>& u_samples = {cplx(0.31, 0.17), cplx(-0.23, 0.41),
                                                                    cplx(0.52, -0.28)},
                              double tol = 1e-8);

struct InvariantResidual {
  std::string name;
  double value = 0.0;  // relative
};
/// Commutativity, crossing, [t, S^±], H from t'(0) (t''(0) at p = 2),
/// U_q(sl2) and Temperley-Lieb relations on an N-site chain.
std::vector<InvariantResidual> structural_residuals(int N, const AnisotropyRegime& regime);

/// S^z content of T_j: V_j, plus V_{j-s(j)} when reducible.
std::map<int, int> tilting_sz_content(SpinLabel j, int p);

struct ClusterDecomposition {
  cplx value;
  std::vector<std::pair<SpinLabel, int>> modules;  // (j, copies), top first
  bool ok = true;
};

struct NjkMeasurement {
  DegeneracyCorrections corrections;
  std::vector<ClusterDecomposition> clusters;
  std::vector<std::string> problems;  // inconsistent or undecomposable clusters
  bool ok() const { return problems.empty(); }
};
/// Peels each degenerate cluster of t(u0) into tilting modules by S^z content.
NjkMeasurement measure_njk(int N, const AnisotropyRegime& regime, cplx u0 = kGenericU0);
NjkMeasurement measure_njk(const SpectralReport& spec, int N, const AnisotropyRegime& regime);

}  // namespace xxz
