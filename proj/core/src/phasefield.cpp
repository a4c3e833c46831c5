#include "binrec/phasefield.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace binrec {

std::string_view to_string(Potential p) noexcept {
  return p == Potential::SmoothDoubleWell ? "well" : "obstacle";
}

Potential parse_potential(std::string_view name) {
  if (name == "well" || name == "double_well" || name == "dw") return Potential::SmoothDoubleWell;
  if (name == "obstacle" || name == "double_obstacle" || name == "do") return Potential::DoubleObstacle;
  throw std::invalid_argument("unknown potential '" + std::string(name) + "'");
}

double potential_value(Potential p, double s) noexcept {
  const double q = 1.0 - s * s;
  if (p == Potential::SmoothDoubleWell) return 0.25 * q * q;
  if (s < -1.0 || s > 1.0) return kInfeasibleEnergy;
  return 0.5 * q;
}

double gamma_constant(Potential p) noexcept {
  return p == Potential::SmoothDoubleWell ? 4.0 * std::numbers::sqrt2 / 3.0 : std::numbers::pi / 2.0;
}

double effective_sigma(double sigma, Potential p) noexcept { return sigma / gamma_constant(p); }

void ModelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
  };
  require(alpha > 0.0, "alpha must be > 0");
  require(gamma >= 0.0, "gamma must be >= 0");
  require(sigma > 0.0, "sigma must be > 0");
  require(epsilon > 0.0, "epsilon must be > 0");
  require(h > 0.0, "h must be > 0");
  require(omega >= 0.0, "omega must be >= 0");
  require(rho > 0.0, "rho must be > 0");
  require(tol > 0.0, "tol must be > 0");
  require(max_iters >= 1, "max_iters must be >= 1");
}

ModelParams parameter_heuristics(double omega, Potential p) {
  if (!(omega > 0.0)) throw std::invalid_argument("parameter_heuristics: omega must be > 0");
  ModelParams m;
  m.omega = omega;
  m.sigma = omega / 80.0;
  m.epsilon = omega / (4.0 * std::numbers::pi);
  m.h = omega / 32.0;
  const bool well = p == Potential::SmoothDoubleWell;
  m.rho = well ? 0.833 : 0.588;
  m.tol = well ? 3e-4 : 3.5e-4;
  return m;
}

double ginzburg_landau(const FeSystem& sys, const FeFunction& u, double epsilon, Potential p) {
  if (u.size() != sys.lumped_mass.size()) {
    throw std::invalid_argument("ginzburg_landau: function is not on the system's mesh");
  }
  double well = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double psi = potential_value(p, u[i]);
    if (psi == kInfeasibleEnergy) return kInfeasibleEnergy;
    well += sys.lumped_mass[i] * psi;
  }
  const double gradient = inner(sys.stiffness, u.coeffs, u.coeffs);
  return 0.5 * epsilon * gradient + well / epsilon;
}

double total_energy_from_blurred(const FeFunction& u, const FeFunction& blurred_u,
                                 const FeFunction& y_d, const FeSystem& sys,
                                 const ModelParams& params, Potential p) {
  const double gl = ginzburg_landau(sys, u, params.epsilon, p);
  if (gl == kInfeasibleEnergy) return kInfeasibleEnergy;
  std::vector<double> misfit(y_d.size());
  for (std::size_t i = 0; i < misfit.size(); ++i) misfit[i] = blurred_u[i] - y_d[i];
  const double fidelity = 0.5 * inner(sys.mass, misfit, misfit);
  return fidelity + effective_sigma(params.sigma, p) * gl;
}

double total_energy(const FeFunction& u, const FeFunction& y_d, const BlurOperator& blur,
                    const ModelParams& params, Potential p) {
  if (y_d.size() != u.size()) throw std::invalid_argument("total_energy: u and y_d differ in size");
  return total_energy_from_blurred(u, blur.apply(u), y_d, blur.system(), params, p);
}

}  // namespace binrec
