#pragma once

#include <limits>
#include <string_view>

#include "binrec/blur.hpp"
#include "binrec/fem.hpp"

namespace binrec {

enum class Potential { SmoothDoubleWell, DoubleObstacle };

std::string_view to_string(Potential p) noexcept;
/// Accepts "well" / "double_well" / "obstacle" / "double_obstacle".
Potential parse_potential(std::string_view name);

/// Energy value of an infeasible state (obstacle potential outside [-1, 1]).
/// Compares greater than every finite energy.
inline constexpr double kInfeasibleEnergy = std::numeric_limits<double>::infinity();

/// Psi_1(s) = (1 - s^2)^2 / 4, Psi_2(s) = (1 - s^2) / 2 on [-1, 1] and
/// kInfeasibleEnergy outside.
double potential_value(Potential p, double s) noexcept;

/// Interface constant c(Psi): 4 sqrt(2) / 3 for the well, pi / 2 for the
/// obstacle.
double gamma_constant(Potential p) noexcept;

/// sigma / c(Psi), the weight that makes both relaxations penalise
/// perimeter by sigma asymptotically.
double effective_sigma(double sigma, Potential p) noexcept;

enum class StopCriterion { L2Change, EnergyChange };

struct ModelParams {
  double alpha = 0.0;    // blurring strength
  double gamma = 0.0;    // noise variance
  double sigma = 0.0;    // perimeter weight
  double epsilon = 0.0;  // interface width scale
  double h = 0.0;        // target grid width
  double omega = 0.0;    // smallest feature width
  double rho = 0.0;      // splitting parameter
  double tol = 0.0;      // stopping tolerance
  int max_iters = 10000;
  StopCriterion stop_on = StopCriterion::L2Change;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

/// Default parameters for feature width omega: sigma = omega / 80,
/// pi epsilon = omega / 4, h = omega / 32 and the tuned rho / TOL per
/// potential. alpha and gamma are left at zero for the caller.
ModelParams parameter_heuristics(double omega, Potential p);

/// (eps / 2) u^T K u + (1 / eps) sum_i m_i Psi(u_i) with lumped weights m_i.
/// Returns kInfeasibleEnergy for obstacle states outside [-1, 1].
double ginzburg_landau(const FeSystem& sys, const FeFunction& u, double epsilon, Potential p);

/// 1/2 ||S_h u - y_d||^2 + sigma / c(Psi) * G_eps(u).
double total_energy(const FeFunction& u, const FeFunction& y_d, const BlurOperator& blur,
                    const ModelParams& params, Potential p);

/// Same as total_energy with S_h u already known.
double total_energy_from_blurred(const FeFunction& u, const FeFunction& blurred_u,
                                 const FeFunction& y_d, const FeSystem& sys,
                                 const ModelParams& params, Potential p);

}  // namespace binrec
