#include "binrec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "binrec/errors.hpp"

namespace binrec {

namespace {

constexpr double kStepSolveTol = 1e-12;
constexpr double kMonotoneRelTol = 1e-12;

void require_size(const FeSystem& sys, std::span<const double> v, const char* what) {
  if (v.size() != sys.mesh->node_count()) {
    throw std::invalid_argument(std::string(what) + " is not on the operator's mesh");
  }
}

bool feasible(std::span<const double> u) {
  return std::all_of(u.begin(), u.end(), [](double v) { return v >= -1.0 && v <= 1.0; });
}

// rhs = rho W u_prev - M p  with W either the consistent or lumped mass
std::vector<double> step_load(const FeSystem& sys, std::span<const double> u_prev,
                              std::span<const double> p_prev, double rho, bool lumped) {
  std::vector<double> load = sys.mass.apply(p_prev);
  if (lumped) {
    for (std::size_t i = 0; i < load.size(); ++i) {
      load[i] = rho * sys.lumped_mass[i] * u_prev[i] - load[i];
    }
  } else {
    const auto mu = sys.mass.apply(u_prev);
    for (std::size_t i = 0; i < load.size(); ++i) load[i] = rho * mu[i] - load[i];
  }
  return load;
}

// rhs of the adjoint solve: M (y - y_d)
std::vector<double> misfit_load(const FeSystem& sys, std::span<const double> y,
                                std::span<const double> y_d) {
  std::vector<double> misfit(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) misfit[i] = y[i] - y_d[i];
  return sys.mass.apply(misfit);
}

SplittingStep make_step(const FeSystem& sys, std::span<const double> u_prev,
                        std::span<const double> p_prev, const ModelParams& params, Potential p) {
  return p == Potential::SmoothDoubleWell ? make_well_step(sys, u_prev, p_prev, params)
                                          : make_obstacle_step(sys, u_prev, p_prev, params);
}

}  // namespace

double step_objective(const SplittingStep& step, std::span<const double> u) {
  return 0.5 * inner(step.matrix, u, u) - dot(step.load, u);
}

void check_rho(const ModelParams& params, Potential p) {
  const double threshold = effective_sigma(params.sigma, p) / params.epsilon;
  if (!(params.rho > threshold)) {
    std::ostringstream msg;
    msg << "rho = " << params.rho << " must exceed sigma_eff / epsilon = " << threshold;
    throw std::invalid_argument(msg.str());
  }
}

SplittingStep make_well_step(const FeSystem& sys, std::span<const double> u_prev,
                             std::span<const double> p_prev, const ModelParams& params) {
  require_size(sys, u_prev, "u_prev");
  require_size(sys, p_prev, "p_prev");
  const double s = effective_sigma(params.sigma, Potential::SmoothDoubleWell);
  const double reaction = s / params.epsilon;

  std::vector<double> diag(u_prev.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    diag[i] = reaction * sys.lumped_mass[i] * (u_prev[i] * u_prev[i] - 1.0);
  }
  SplittingStep step;
  step.matrix = add_diagonal(add(params.rho, sys.mass, s * params.epsilon, sys.stiffness), diag);
  step.load = step_load(sys, u_prev, p_prev, params.rho, false);
  step.box_constrained = false;
  return step;
}

SplittingStep make_obstacle_step(const FeSystem& sys, std::span<const double> u_prev,
                                 std::span<const double> p_prev, const ModelParams& params) {
  require_size(sys, u_prev, "u_prev");
  require_size(sys, p_prev, "p_prev");
  const double s = effective_sigma(params.sigma, Potential::DoubleObstacle);
  const double shift = params.rho - s / params.epsilon;

  std::vector<double> diag(u_prev.size());
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = shift * sys.lumped_mass[i];
  SplittingStep step;
  step.matrix = add_diagonal(scaled(s * params.epsilon, sys.stiffness), diag);
  step.load = step_load(sys, u_prev, p_prev, params.rho, true);
  step.box_constrained = true;
  return step;
}

int projected_gauss_seidel(const SparseMatrix& A, std::span<const double> b, std::span<double> x,
                           double lower, double upper, const PgsOptions& options,
                           const SweepObserver& observer) {
  const std::size_t n = A.size();
  if (b.size() != n || x.size() != n) {
    throw std::invalid_argument("projected_gauss_seidel: dimension mismatch");
  }
  const auto rp = A.row_offsets();
  const auto cols = A.column_indices();
  const auto vals = A.values();
  const auto diag = A.diagonal();
  for (double d : diag) {
    if (!(d > 0.0)) throw std::invalid_argument("projected_gauss_seidel: non-positive diagonal");
  }
  for (double& v : x) v = std::clamp(v, lower, upper);

  double change = 0.0;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
        if (static_cast<std::size_t>(cols[k]) != i) s -= vals[k] * x[cols[k]];
      }
      const double updated = std::clamp(s / diag[i], lower, upper);
      change = std::max(change, std::abs(updated - x[i]));
      x[i] = updated;
    }
    if (observer) observer(sweep, x);
    if (!std::isfinite(change)) throw NumericalError("projected_gauss_seidel: non-finite iterate", change);
    if (change < options.tol) return sweep;
  }
  throw NumericalError("projected_gauss_seidel: no convergence in " +
                           std::to_string(options.max_sweeps) + " sweeps",
                       change);
}

void solve_step(const SplittingStep& step, std::span<double> x, const PgsOptions& pgs) {
  if (step.box_constrained) {
    projected_gauss_seidel(step.matrix, step.load, x, -1.0, 1.0, pgs);
    return;
  }
  PcgSolver solver(step.matrix, Preconditioner::Jacobi);
  solver.solve(step.load, x, kStepSolveTol, 20000);
}

FeFunction dw_step(const FeFunction& u_prev, const FeFunction& y_d, const BlurOperator& blur,
                   const ModelParams& params) {
  check_rho(params, Potential::SmoothDoubleWell);
  for (double v : u_prev.coeffs) {
    if (!std::isfinite(v)) throw std::invalid_argument("dw_step: u_prev has non-finite values");
  }
  const auto adj = blur.adjoint_chain(u_prev, y_d);
  const auto step = make_well_step(blur.system(), u_prev.coeffs, adj.p.coeffs, params);
  FeFunction u = u_prev;
  solve_step(step, u.coeffs);
  return u;
}

FeFunction do_step(const FeFunction& u_prev, const FeFunction& y_d, const BlurOperator& blur,
                   const ModelParams& params) {
  check_rho(params, Potential::DoubleObstacle);
  if (!feasible(u_prev.coeffs)) throw std::invalid_argument("do_step: u_prev leaves [-1, 1]");
  const auto adj = blur.adjoint_chain(u_prev, y_d);
  const auto step = make_obstacle_step(blur.system(), u_prev.coeffs, adj.p.coeffs, params);
  FeFunction u = u_prev;
  solve_step(step, u.coeffs);
  return u;
}

RecoveryResult run_recovery(const FeFunction& y_d, const BlurOperator& blur,
                            const ModelParams& params, Potential potential, const FeFunction& u0,
                            const IterateObserver& observer) {
  params.validate();
  check_rho(params, potential);
  const FeSystem& sys = blur.system();
  require_size(sys, y_d.coeffs, "y_d");
  require_size(sys, u0.coeffs, "u0");
  if (potential == Potential::DoubleObstacle && !feasible(u0.coeffs)) {
    throw std::invalid_argument("run_recovery: initial guess leaves [-1, 1]");
  }

  FeFunction u = u0;
  FeFunction y = FeFunction::zeros(sys.mesh);
  blur.solve(sys.mass.apply(u.coeffs), y.coeffs);
  std::vector<double> p(u.size(), 0.0);

  RecoveryResult result;
  result.initial_energy = total_energy_from_blurred(u, y, y_d, sys, params, potential);
  double previous_energy = result.initial_energy;

  std::vector<double> delta(u.size());
  for (int n = 1; n <= params.max_iters; ++n) {
    blur.solve(misfit_load(sys, y.coeffs, y_d.coeffs), p);
    const auto step = make_step(sys, u.coeffs, p, params, potential);

    FeFunction next = u;
    solve_step(step, next.coeffs);
    blur.solve(sys.mass.apply(next.coeffs), y.coeffs);

    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = next[i] - u[i];
    const double diff = l2_norm(sys.mass, delta);
    const double energy = total_energy_from_blurred(next, y, y_d, sys, params, potential);

    result.energies.push_back(energy);
    result.diffs.push_back(diff);
    result.iterations = n;
    if (energy > previous_energy + kMonotoneRelTol * std::abs(previous_energy)) {
      result.monotone = false;
      result.energy_increases.push_back(n);
    }
    u = std::move(next);
    if (observer) observer(n, u, energy, diff);

    const bool done = params.stop_on == StopCriterion::L2Change
                          ? diff < params.tol
                          : std::abs(energy - previous_energy) < params.tol;
    previous_energy = energy;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.final_u = std::move(u);
  return result;
}

RecoveryResult gradient_flow_run(const FeFunction& y_d, const BlurOperator& blur,
                                 const ModelParams& params, Potential potential,
                                 const FeFunction& u0, double dt, const IterateObserver& observer) {
  if (!(dt > 0.0)) throw std::invalid_argument("gradient_flow_run: dt must be positive");
  ModelParams flow = params;
  flow.rho = 1.0 / dt;
  return run_recovery(y_d, blur, flow, potential, u0, observer);
}

double stationarity_residual(const FeFunction& u, const FeFunction& y_d, const BlurOperator& blur,
                             const ModelParams& params, Potential potential) {
  const FeSystem& sys = blur.system();
  require_size(sys, u.coeffs, "u");
  if (potential == Potential::DoubleObstacle && !feasible(u.coeffs)) {
    throw std::invalid_argument("stationarity_residual: u leaves [-1, 1]");
  }
  const auto adj = blur.adjoint_chain(u, y_d);
  const double s = effective_sigma(params.sigma, potential);

  // r = M p + s eps K u + (s / eps) M_L Psi'(u)
  std::vector<double> r = sys.mass.apply(adj.p.coeffs);
  const auto ku = sys.stiffness.apply(u.coeffs);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double dpsi = potential == Potential::SmoothDoubleWell ? u[i] * u[i] * u[i] - u[i] : -u[i];
    r[i] += s * params.epsilon * ku[i] + s / params.epsilon * sys.lumped_mass[i] * dpsi;
    double g = r[i] / sys.lumped_mass[i];
    if (potential == Potential::DoubleObstacle) g = u[i] - std::clamp(u[i] - g, -1.0, 1.0);
    norm_sq += sys.lumped_mass[i] * g * g;
  }
  return std::sqrt(norm_sq);
}

}  // namespace binrec
