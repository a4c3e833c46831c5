#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "binrec/mesh.hpp"
#include "binrec/sparse.hpp"

namespace binrec {

/// P1 finite element function: one coefficient per mesh node.
struct FeFunction {
  MeshPtr mesh;
  std::vector<double> coeffs;

  static FeFunction zeros(MeshPtr mesh);
  static FeFunction constant(MeshPtr mesh, double value);

  std::size_t size() const noexcept { return coeffs.size(); }
  double& operator[](std::size_t i) noexcept { return coeffs[i]; }
  double operator[](std::size_t i) const noexcept { return coeffs[i]; }

  /// Value of the piecewise-linear interpolant at p. Linear search over
  /// elements; meant for tests and output, not inner loops.
  double evaluate(const Point& p) const;
};

using Sampler = std::function<double(const Point&)>;

SparseMatrix assemble_mass(const Mesh& mesh);
SparseMatrix assemble_stiffness(const Mesh& mesh);
/// Diagonal matrix of consistent-mass row sums.
SparseMatrix assemble_lumped_mass(const Mesh& mesh);

/// Mass, stiffness and lumped mass of one mesh, assembled once and shared.
struct FeSystem {
  MeshPtr mesh;
  SparseMatrix mass;
  SparseMatrix stiffness;
  std::vector<double> lumped_mass;
};

std::shared_ptr<const FeSystem> assemble_system(MeshPtr mesh);

/// Nodal interpolant of a pointwise function.
FeFunction interpolate(MeshPtr mesh, const Sampler& sampler);

/// L2 projection onto the P1 space. Loads use a degree-5 (1D) or degree-4
/// (2D) Gauss rule per element.
FeFunction l2_project(MeshPtr mesh, const Sampler& sampler);

/// u^T A v. Throws std::invalid_argument on dimension mismatch.
double inner(const SparseMatrix& A, std::span<const double> u, std::span<const double> v);
double l2_norm(const SparseMatrix& M, std::span<const double> u);

enum class Preconditioner { Jacobi, IncompleteCholesky };

/// Preconditioned conjugate gradients for a fixed SPD matrix. The
/// preconditioner is set up once and reused across solves.
class PcgSolver {
 public:
  explicit PcgSolver(SparseMatrix A, Preconditioner kind = Preconditioner::Jacobi);

  /// Solves A x = rhs starting from the value already in x. Returns the
  /// iteration count. Throws NumericalError when max_iter is exceeded or a
  /// non-finite value appears; x then holds the last iterate.
  int solve(std::span<const double> rhs, std::span<double> x, double tol = 1e-10,
            int max_iter = 10000) const;

  const SparseMatrix& matrix() const noexcept { return A_; }
  /// Preconditioner actually in use (incomplete Cholesky falls back to
  /// Jacobi on breakdown).
  Preconditioner preconditioner() const noexcept { return kind_; }

 private:
  void precondition(std::span<const double> r, std::span<double> z) const;
  bool factor_incomplete_cholesky();

  SparseMatrix A_;
  Preconditioner kind_;
  std::vector<double> inv_diag_;
  // lower factor, row-compressed, diagonal stored last in each row
  std::vector<std::size_t> l_ptr_;
  std::vector<int> l_cols_;
  std::vector<double> l_vals_;
};

/// Jacobi-preconditioned CG from a zero initial guess; relative residual
/// ||A x - b|| / ||b|| <= tol on return.
std::vector<double> solve_spd(const SparseMatrix& A, std::span<const double> rhs, double tol = 1e-10,
                              int max_iter = 10000);

}  // namespace binrec
