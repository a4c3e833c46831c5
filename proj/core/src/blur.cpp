#include "binrec/blur.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace binrec {

namespace {

SparseMatrix blur_matrix(const FeSystem& sys, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("BlurOperator: alpha must be positive");
  return add(alpha, sys.stiffness, 1.0, sys.mass);
}

}  // namespace

BlurOperator::BlurOperator(std::shared_ptr<const FeSystem> system, double alpha,
                           double poincare_constant, double solve_tol)
    : system_(std::move(system)),
      alpha_(alpha),
      poincare_(poincare_constant),
      tol_(solve_tol),
      solver_(blur_matrix(*system_, alpha), Preconditioner::IncompleteCholesky) {
  if (!(poincare_constant > 0.0)) {
    throw std::invalid_argument("BlurOperator: Poincare constant must be positive");
  }
}

BlurOperator::BlurOperator(MeshPtr mesh, double alpha, double poincare_constant, double solve_tol)
    : BlurOperator(assemble_system(std::move(mesh)), alpha, poincare_constant, solve_tol) {}

void BlurOperator::check_mesh(const FeFunction& f, const char* what) const {
  if (f.size() != system_->mesh->node_count()) {
    throw std::invalid_argument(std::string("BlurOperator: ") + what + " has wrong size");
  }
}

void BlurOperator::solve(std::span<const double> rhs, std::span<double> x) const {
  solver_.solve(rhs, x, tol_, 20000);
}

FeFunction BlurOperator::apply(const FeFunction& u) const {
  check_mesh(u, "input");
  const auto rhs = system_->mass.apply(u.coeffs);
  FeFunction y = FeFunction::zeros(system_->mesh);
  solve(rhs, y.coeffs);
  return y;
}

BlurOperator::AdjointState BlurOperator::adjoint_chain(const FeFunction& u_prev,
                                                       const FeFunction& y_d) const {
  check_mesh(y_d, "data");
  FeFunction y = apply(u_prev);
  std::vector<double> misfit(y.size());
  for (std::size_t i = 0; i < misfit.size(); ++i) misfit[i] = y[i] - y_d[i];
  const auto rhs = system_->mass.apply(misfit);
  FeFunction p = FeFunction::zeros(system_->mesh);
  solve(rhs, p.coeffs);
  return {std::move(y), std::move(p)};
}

double BlurOperator::stability_constant() const noexcept { return 1.0 / (1.0 + alpha_ / poincare_); }

}  // namespace binrec
