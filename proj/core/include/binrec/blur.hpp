#pragma once

#include <memory>
#include <numbers>
#include <span>

#include "binrec/fem.hpp"

namespace binrec {

/// Discrete blurring operator S_h: u -> y with
///   alpha (grad y, grad v) + (y, v) = (u, v)   for all P1 v,
/// i.e. the Neumann solution operator of -alpha Lap y + y = u.
///
/// The system matrix alpha K + M and its incomplete Cholesky factor are
/// built once; apply() can be called concurrently.
class BlurOperator {
 public:
  BlurOperator(std::shared_ptr<const FeSystem> system, double alpha,
               double poincare_constant = 1.0 / std::numbers::pi, double solve_tol = 1e-12);
  BlurOperator(MeshPtr mesh, double alpha, double poincare_constant = 1.0 / std::numbers::pi,
               double solve_tol = 1e-12);

  FeFunction apply(const FeFunction& u) const;

  struct AdjointState {
    FeFunction y;  // S_h u_prev
    FeFunction p;  // (alpha K + M)^{-1} M (y - y_d)
  };
  AdjointState adjoint_chain(const FeFunction& u_prev, const FeFunction& y_d) const;

  /// Solves (alpha K + M) x = rhs, x holds the initial guess on entry.
  void solve(std::span<const double> rhs, std::span<double> x) const;

  /// C_s(alpha) = 1 / (1 + alpha / C_p)
  double stability_constant() const noexcept;

  double alpha() const noexcept { return alpha_; }
  double poincare_constant() const noexcept { return poincare_; }
  const FeSystem& system() const noexcept { return *system_; }
  const std::shared_ptr<const FeSystem>& system_ptr() const noexcept { return system_; }
  const MeshPtr& mesh() const noexcept { return system_->mesh; }
  const SparseMatrix& system_matrix() const noexcept { return solver_.matrix(); }

 private:
  void check_mesh(const FeFunction& f, const char* what) const;

  std::shared_ptr<const FeSystem> system_;
  double alpha_;
  double poincare_;
  double tol_;
  PcgSolver solver_;
};

}  // namespace binrec
