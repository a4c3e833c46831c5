#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "binrec/phasefield.hpp"

namespace binrec::cli {

/// Row-major dense square matrix, small sizes only.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit DenseMatrix(std::size_t size = 0) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  std::vector<double> apply(std::span<const double> x) const;
};

DenseMatrix dense_add(double a, const DenseMatrix& A, double b, const DenseMatrix& B);

/// Element-by-element dense assembly on [0, 1] with `cells` equal cells,
/// written from the textbook element matrices.
DenseMatrix dense_interval_mass(int cells);
DenseMatrix dense_interval_stiffness(int cells);
/// Same on the unit square, triangles split bottom-left to top-right,
/// node index j (n + 1) + i. Element matrices from vertex coordinates.
DenseMatrix dense_square_mass(int cells);
DenseMatrix dense_square_stiffness(int cells);

/// Cholesky solve; throws std::invalid_argument if A is not SPD.
std::vector<double> dense_solve(const DenseMatrix& A, std::span<const double> b);

/// 1/2 x^T A x - b^T x
double dense_objective(const DenseMatrix& A, std::span<const double> b, std::span<const double> x);

/// Minimises the quadratic objective over the box [lo, hi]^n by projected
/// gradient descent with step 1 / (Gershgorin bound), from several random
/// feasible starts; returns the best end point.
std::vector<double> projected_gradient_minimize(const DenseMatrix& A, std::span<const double> b,
                                                double lo, double hi, int iterations, int starts,
                                                std::uint64_t seed);

/// Dense version of one splitting step on the interval mesh: the blurred
/// state and adjoint by dense solves, then either the linear well step
/// (solved directly) or the obstacle step (projected gradient).
struct DenseStep {
  DenseMatrix matrix;
  std::vector<double> load;
};
DenseStep dense_step(int cells, std::span<const double> u_prev, std::span<const double> y_d,
                     const ModelParams& params, Potential p);

struct OracleRow {
  std::string check;
  int instance = 0;
  int cells = 0;
  double max_deviation = 0.0;
  double energy_gap = 0.0;  // implementation minus oracle objective; NaN when not applicable
  bool pass = false;
};

struct OracleReport {
  double tolerance = 1e-8;
  std::vector<OracleRow> rows;
  bool all_pass() const;
};

/// Assembly checks on small meshes plus `instances` random dw_step and
/// do_step problems on meshes with at most 8 nodes. `perturbation` is added
/// to entry (0, 0) of every oracle matrix (negative control).
OracleReport oracle_check(std::uint64_t seed, int instances = 20, double perturbation = 0.0);

void write_report(std::ostream& out, const OracleReport& report);

}  // namespace binrec::cli
