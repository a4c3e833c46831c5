#pragma once

#include <functional>
#include <span>
#include <vector>

#include "binrec/blur.hpp"
#include "binrec/fem.hpp"
#include "binrec/phasefield.hpp"

namespace binrec {

/// One convex-concave splitting step written as a quadratic program
///   minimise 1/2 u^T B u - load^T u   (optionally subject to |u_i| <= 1)
/// where B collects every implicitly treated term and load every explicit
/// one. B is SPD whenever rho exceeds sigma_eff / epsilon.
struct SplittingStep {
  SparseMatrix matrix;
  std::vector<double> load;
  bool box_constrained = false;
};

/// 1/2 u^T B u - load^T u
double step_objective(const SplittingStep& step, std::span<const double> u);

/// Linearised double-well step:
///   B = rho M + s eps K + (s / eps) (D(u_prev^2) - M_L),  load = rho M u_prev - M p
/// with s = sigma / c(Psi_1), D(w) = diag(m_i w_i) and M_L the lumped mass.
SplittingStep make_well_step(const FeSystem& sys, std::span<const double> u_prev,
                             std::span<const double> p_prev, const ModelParams& params);

/// Double-obstacle step, box constrained to [-1, 1]:
///   B = rho M_L + s eps K - (s / eps) M_L,  load = rho M_L u_prev - M p
SplittingStep make_obstacle_step(const FeSystem& sys, std::span<const double> u_prev,
                                 std::span<const double> p_prev, const ModelParams& params);

struct PgsOptions {
  double tol = 1e-10;  // max-norm change between sweeps
  int max_sweeps = 500000;
};

using SweepObserver = std::function<void(int sweep, std::span<const double> x)>;

/// Projected Gauss-Seidel for min 1/2 x^T A x - b^T x over lower <= x <= upper,
/// natural node order. x holds the start value. Returns the sweep count;
/// throws NumericalError when max_sweeps is exceeded.
int projected_gauss_seidel(const SparseMatrix& A, std::span<const double> b, std::span<double> x,
                           double lower, double upper, const PgsOptions& options = {},
                           const SweepObserver& observer = {});

/// Solves a step starting from the values in x (CG for unconstrained steps,
/// projected Gauss-Seidel for box-constrained ones).
void solve_step(const SplittingStep& step, std::span<double> x, const PgsOptions& pgs = {});

/// Throws std::invalid_argument unless rho > sigma_eff / epsilon.
void check_rho(const ModelParams& params, Potential p);

FeFunction dw_step(const FeFunction& u_prev, const FeFunction& y_d, const BlurOperator& blur,
                   const ModelParams& params);
FeFunction do_step(const FeFunction& u_prev, const FeFunction& y_d, const BlurOperator& blur,
                   const ModelParams& params);

struct RecoveryResult {
  FeFunction final_u;
  double initial_energy = 0.0;
  std::vector<double> energies;  // energy of iterate n, n = 1..iterations
  std::vector<double> diffs;     // ||u^n - u^{n-1}||_L2
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
  std::vector<int> energy_increases;  // iterations where the energy went up
};

/// Called after every accepted iterate.
using IterateObserver = std::function<void(int iteration, const FeFunction& u, double energy,
                                           double diff)>;

/// Outer loop: adjoint chain, splitting step, energy bookkeeping and the
/// stopping test, until the test passes or max_iters is reached.
RecoveryResult run_recovery(const FeFunction& y_d, const BlurOperator& blur,
                            const ModelParams& params, Potential potential, const FeFunction& u0,
                            const IterateObserver& observer = {});

/// Implicit-Euler gradient flow with time step dt; the same iteration as
/// run_recovery with rho = 1 / dt.
RecoveryResult gradient_flow_run(const FeFunction& y_d, const BlurOperator& blur,
                                 const ModelParams& params, Potential potential,
                                 const FeFunction& u0, double dt,
                                 const IterateObserver& observer = {});

/// Lumped-L2 norm of the discrete first-order optimality residual. For the
/// obstacle the residual is taken in projected form u - P(u - g), which
/// vanishes where the constraint is active with the right sign.
double stationarity_residual(const FeFunction& u, const FeFunction& y_d, const BlurOperator& blur,
                             const ModelParams& params, Potential potential);

}  // namespace binrec
