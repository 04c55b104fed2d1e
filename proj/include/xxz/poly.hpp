#pragma once

// Polynomial systems for the Bethe equations. Each system can be evaluated
// in homogeneous coordinates Z = (Z0, Z1, ..., ZM), x_k = Z_k / Z0, which
// is what the path tracker works with.

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "xxz/regime.hpp"

namespace xxz {

constexpr int kMaxVars = 8;

using HVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxVars + 1, 1>;
using HMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVars + 1, kMaxVars + 1>;

/// Square system of M homogenized polynomials in M+1 unknowns.
class HomogeneousSystem {
 public:
  virtual ~HomogeneousSystem() = default;
  virtual int num_vars() const = 0;
  virtual const std::vector<int>& degrees() const = 0;
  /// F has M entries, J is M x (M+1) with column 0 the Z0 derivative.
  virtual void evaluate(const HVec& Z, HVec& F, HMat& J) const = 0;
};

struct Term {
  cplx coef;
  std::vector<int> exps;
  int degree() const;
};

struct Polynomial {
  std::vector<Term> terms;
  int degree() const;
  cplx eval(const std::vector<cplx>& x) const;
};

/// Expanded term-list form. When built from the Bethe equations it also
/// carries the product-form evaluator used for tracking.
class PolySystem : public HomogeneousSystem {
 public:
  PolySystem(int num_vars, std::vector<Polynomial> equations, std::vector<int> degrees);

  int num_vars() const override { return n_; }
  const std::vector<int>& degrees() const override { return degrees_; }
  const std::vector<Polynomial>& equations() const { return eqs_; }
  void evaluate(const HVec& Z, HVec& F, HMat& J) const override;

  std::vector<cplx> eval_affine(const std::vector<cplx>& x) const;
  long long total_degree() const;

  /// Evaluator used by the tracker: the product form if attached, else this.
  const HomogeneousSystem& tracking_system() const { return fast_ ? *fast_ : *this; }
  void attach_fast(std::shared_ptr<const HomogeneousSystem> fast) { fast_ = std::move(fast); }
  bool has_fast() const { return static_cast<bool>(fast_); }

 private:
  int n_;
  std::vector<Polynomial> eqs_;
  std::vector<int> degrees_;
  std::shared_ptr<const HomogeneousSystem> fast_;
};

/// Product-form Bethe equations; cheap to evaluate with exact derivatives.
class BetheSystem : public HomogeneousSystem {
 public:
  BetheSystem(const AnisotropyRegime& regime, int N, int M);

  int num_vars() const override { return M_; }
  const std::vector<int>& degrees() const override { return degrees_; }
  void evaluate(const HVec& Z, HVec& F, HMat& J) const override;

  const AnisotropyRegime& regime() const { return regime_; }
  int N() const { return N_; }

  /// Affine residual vector F(x).
  std::vector<cplx> eval_affine(const std::vector<cplx>& x) const;

 private:
  AnisotropyRegime regime_;
  int N_, M_;
  std::vector<int> degrees_;
};

/// The inner system in variables v with x_k = shift + scale·v_k, each
/// equation multiplied by eq_scale. Degrees are unchanged.
class ShiftedSystem : public HomogeneousSystem {
 public:
  ShiftedSystem(std::shared_ptr<const HomogeneousSystem> inner, cplx shift, cplx scale, double eq_scale);

  int num_vars() const override { return inner_->num_vars(); }
  const std::vector<int>& degrees() const override { return inner_->degrees(); }
  void evaluate(const HVec& Z, HVec& F, HMat& J) const override;

  std::vector<cplx> to_inner(const std::vector<cplx>& v) const;
  std::vector<cplx> from_inner(const std::vector<cplx>& x) const;

 private:
  std::shared_ptr<const HomogeneousSystem> inner_;
  cplx shift_, scale_;
  double eq_scale_;
};

/// Well-scaled tracking form of the Bethe equations. Small |η| clusters the
/// x roots around 1 and shrinks F there, so XXZ systems are tracked in
/// v = (x - 1)/|q - 1|; XXX is returned unchanged.
std::shared_ptr<const ShiftedSystem> tracking_form(const AnisotropyRegime& regime, int N, int M);

/// Degree of each equation: 2N+3(M-1) in x, 2N+2M-3 in λ (the leading
/// forms of the two sides cancel identically).
int bethe_degree(const AnisotropyRegime& regime, int N, int M);

PolySystem build_system_x(int N, int M, const AnisotropyRegime& regime);
PolySystem build_system_xxx(int N, int M);
PolySystem build_system(int N, int M, const AnisotropyRegime& regime);

}  // namespace xxz
