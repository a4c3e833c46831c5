#include "binrec/cli/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <stdexcept>

#include "binrec/blur.hpp"
#include "binrec/fem.hpp"
#include "binrec/mesh.hpp"
#include "binrec/solver.hpp"

namespace binrec::cli {

std::vector<double> DenseMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) y[i] += (*this)(i, j) * x[j];
  }
  return y;
}

DenseMatrix dense_add(double a, const DenseMatrix& A, double b, const DenseMatrix& B) {
  if (A.n != B.n) throw std::invalid_argument("dense_add: size mismatch");
  DenseMatrix C(A.n);
  for (std::size_t k = 0; k < C.a.size(); ++k) C.a[k] = a * A.a[k] + b * B.a[k];
  return C;
}

DenseMatrix dense_interval_mass(int cells) {
  DenseMatrix M(static_cast<std::size_t>(cells) + 1);
  const double h = 1.0 / cells;
  for (int e = 0; e < cells; ++e) {
    M(e, e) += h / 3.0;
    M(e + 1, e + 1) += h / 3.0;
    M(e, e + 1) += h / 6.0;
    M(e + 1, e) += h / 6.0;
  }
  return M;
}

DenseMatrix dense_interval_stiffness(int cells) {
  DenseMatrix K(static_cast<std::size_t>(cells) + 1);
  const double h = 1.0 / cells;
  for (int e = 0; e < cells; ++e) {
    K(e, e) += 1.0 / h;
    K(e + 1, e + 1) += 1.0 / h;
    K(e, e + 1) -= 1.0 / h;
    K(e + 1, e) -= 1.0 / h;
  }
  return K;
}

namespace {

struct Triangle {
  std::size_t v[3];
  double x[3];
  double y[3];
};

std::vector<Triangle> square_triangles(int cells) {
  std::vector<Triangle> out;
  const auto id = [cells](int i, int j) { return static_cast<std::size_t>(j) * (cells + 1) + i; };
  const double h = 1.0 / cells;
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      const double x0 = i * h, x1 = (i + 1) * h, y0 = j * h, y1 = (j + 1) * h;
      out.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, {x0, x1, x1}, {y0, y0, y1}});
      out.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, {x0, x1, x0}, {y0, y1, y1}});
    }
  }
  return out;
}

// Gradients of the three hat functions: solve [1 x y] c = e_k by Cramer.
void hat_gradients(const Triangle& t, double gx[3], double gy[3], double& area) {
  const double det = (t.x[1] - t.x[0]) * (t.y[2] - t.y[0]) - (t.x[2] - t.x[0]) * (t.y[1] - t.y[0]);
  area = 0.5 * std::abs(det);
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    gx[k] = (t.y[a] - t.y[b]) / det;
    gy[k] = (t.x[b] - t.x[a]) / det;
  }
}

}  // namespace

DenseMatrix dense_square_mass(int cells) {
  const std::size_t n = static_cast<std::size_t>(cells + 1) * (cells + 1);
  DenseMatrix M(n);
  for (const auto& t : square_triangles(cells)) {
    double gx[3], gy[3], area = 0.0;
    hat_gradients(t, gx, gy, area);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) M(t.v[r], t.v[c]) += area / 12.0 * (r == c ? 2.0 : 1.0);
    }
  }
  return M;
}

DenseMatrix dense_square_stiffness(int cells) {
  const std::size_t n = static_cast<std::size_t>(cells + 1) * (cells + 1);
  DenseMatrix K(n);
  for (const auto& t : square_triangles(cells)) {
    double gx[3], gy[3], area = 0.0;
    hat_gradients(t, gx, gy, area);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) K(t.v[r], t.v[c]) += area * (gx[r] * gx[c] + gy[r] * gy[c]);
    }
  }
  return K;
}

std::vector<double> dense_solve(const DenseMatrix& A, std::span<const double> b) {
  const std::size_t n = A.n;
  DenseMatrix L(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = A(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) throw std::invalid_argument("dense_solve: matrix is not positive definite");
    L(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = A(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= L(i, k) * x[k];
    x[i] /= L(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= L(k, i) * x[k];
    x[i] /= L(i, i);
  }
  return x;
}

double dense_objective(const DenseMatrix& A, std::span<const double> b, std::span<const double> x) {
  const auto ax = A.apply(x);
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += 0.5 * x[i] * ax[i] - b[i] * x[i];
  return v;
}

std::vector<double> projected_gradient_minimize(const DenseMatrix& A, std::span<const double> b,
                                                double lo, double hi, int iterations, int starts,
                                                std::uint64_t seed) {
  double bound = 0.0;
  for (std::size_t i = 0; i < A.n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < A.n; ++j) row += std::abs(A(i, j));
    bound = std::max(bound, row);
  }
  const double step = 1.0 / bound;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> start(lo, hi);

  std::vector<double> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    std::vector<double> x(A.n);
    for (double& v : x) v = start(rng);
    for (int it = 0; it < iterations; ++it) {
      const auto ax = A.apply(x);
      double change = 0.0;
      for (std::size_t i = 0; i < A.n; ++i) {
        const double next = std::clamp(x[i] - step * (ax[i] - b[i]), lo, hi);
        change = std::max(change, std::abs(next - x[i]));
        x[i] = next;
      }
      if (change == 0.0) break;
    }
    const double value = dense_objective(A, b, x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

DenseStep dense_step(int cells, std::span<const double> u_prev, std::span<const double> y_d,
                     const ModelParams& params, Potential p) {
  const DenseMatrix M = dense_interval_mass(cells);
  const DenseMatrix K = dense_interval_stiffness(cells);
  const std::size_t n = M.n;
  std::vector<double> lumped(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lumped[i] += M(i, j);
  }

  const DenseMatrix blur = dense_add(params.alpha, K, 1.0, M);
  const auto y = dense_solve(blur, M.apply(u_prev));
  std::vector<double> misfit(n);
  for (std::size_t i = 0; i < n; ++i) misfit[i] = y[i] - y_d[i];
  const auto adjoint = dense_solve(blur, M.apply(misfit));
  const auto mp = M.apply(adjoint);

  const double s = effective_sigma(params.sigma, p);
  DenseStep step;
  step.load.resize(n);
  if (p == Potential::SmoothDoubleWell) {
    step.matrix = dense_add(params.rho, M, s * params.epsilon, K);
    const auto mu = M.apply(u_prev);
    for (std::size_t i = 0; i < n; ++i) {
      step.matrix(i, i) += s / params.epsilon * lumped[i] * (u_prev[i] * u_prev[i] - 1.0);
      step.load[i] = params.rho * mu[i] - mp[i];
    }
  } else {
    step.matrix = dense_add(s * params.epsilon, K, 0.0, K);
    for (std::size_t i = 0; i < n; ++i) {
      step.matrix(i, i) += (params.rho - s / params.epsilon) * lumped[i];
      step.load[i] = params.rho * lumped[i] * u_prev[i] - mp[i];
    }
  }
  return step;
}

bool OracleReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const OracleRow& r) { return r.pass; });
}

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

OracleRow assembly_row(const std::string& check, int cells, const SparseMatrix& impl, DenseMatrix oracle,
                       double perturbation, double tol) {
  oracle(0, 0) += perturbation;
  const auto dense = impl.to_dense();
  OracleRow row{check, 0, cells, max_abs_diff(dense, oracle.a), std::numeric_limits<double>::quiet_NaN(), false};
  row.pass = row.max_deviation < tol;
  return row;
}

}  // namespace

OracleReport oracle_check(std::uint64_t seed, int instances, double perturbation) {
  OracleReport report;
  const double tol = report.tolerance;

  for (int cells = 1; cells <= 7; ++cells) {
    const auto mesh = build_interval_mesh(cells);
    report.rows.push_back(assembly_row("mass_1d", cells, assemble_mass(*mesh), dense_interval_mass(cells),
                                       perturbation, tol));
    report.rows.push_back(assembly_row("stiffness_1d", cells, assemble_stiffness(*mesh),
                                       dense_interval_stiffness(cells), perturbation, tol));
  }
  for (int cells = 1; cells <= 2; ++cells) {
    const auto mesh = build_square_mesh(cells);
    report.rows.push_back(assembly_row("mass_2d", cells, assemble_mass(*mesh), dense_square_mass(cells),
                                       perturbation, tol));
    report.rows.push_back(assembly_row("stiffness_2d", cells, assemble_stiffness(*mesh),
                                       dense_square_stiffness(cells), perturbation, tol));
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_cells(1, 7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Potential p : {Potential::SmoothDoubleWell, Potential::DoubleObstacle}) {
    for (int k = 0; k < instances; ++k) {
      const int cells = pick_cells(rng);
      ModelParams params;
      params.alpha = std::pow(10.0, -2.5 + 2.5 * unit(rng));
      params.sigma = 0.01 + 0.3 * unit(rng);
      params.epsilon = 0.05 + 0.45 * unit(rng);
      // rho >= 3 sigma_eff / eps keeps the well matrix SPD with the consistent mass
      params.rho = effective_sigma(params.sigma, p) / params.epsilon * (3.1 + 2.0 * unit(rng)) + 0.05;
      params.h = 1.0 / cells;
      params.tol = 1e-6;

      const auto mesh = build_interval_mesh(cells);
      FeFunction u_prev = FeFunction::zeros(mesh);
      FeFunction y_d = FeFunction::zeros(mesh);
      for (double& v : u_prev.coeffs) v = 2.0 * unit(rng) - 1.0;
      for (double& v : y_d.coeffs) v = 3.0 * unit(rng) - 1.5;

      DenseStep oracle = dense_step(cells, u_prev.coeffs, y_d.coeffs, params, p);
      oracle.matrix(0, 0) += perturbation;
      const BlurOperator blur(mesh, params.alpha);

      OracleRow row;
      row.instance = k;
      row.cells = cells;
      std::vector<double> expected;
      FeFunction got;
      if (p == Potential::SmoothDoubleWell) {
        row.check = "dw_step";
        expected = dense_solve(oracle.matrix, oracle.load);
        got = dw_step(u_prev, y_d, blur, params);
      } else {
        row.check = "do_step";
        expected = projected_gradient_minimize(oracle.matrix, oracle.load, -1.0, 1.0, 100000, 20,
                                               seed + static_cast<std::uint64_t>(k));
        got = do_step(u_prev, y_d, blur, params);
      }
      row.max_deviation = max_abs_diff(got.coeffs, expected);
      row.energy_gap = dense_objective(oracle.matrix, oracle.load, got.coeffs) -
                       dense_objective(oracle.matrix, oracle.load, expected);
      row.pass = row.max_deviation < tol && std::abs(row.energy_gap) < tol;
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_report(std::ostream& out, const OracleReport& report) {
  out << std::left << std::setw(14) << "check" << std::setw(10) << "instance" << std::setw(7) << "cells"
      << std::setw(16) << "max_deviation" << std::setw(16) << "energy_gap" << "result\n";
  double worst = 0.0;
  int failed = 0;
  for (const auto& r : report.rows) {
    out << std::setw(14) << r.check << std::setw(10) << r.instance << std::setw(7) << r.cells
        << std::setw(16) << std::setprecision(3) << std::scientific << r.max_deviation << std::setw(16);
    if (std::isnan(r.energy_gap)) {
      out << "-";
    } else {
      out << r.energy_gap;
    }
    out << (r.pass ? "pass" : "FAIL") << '\n';
    worst = std::max(worst, r.max_deviation);
    failed += r.pass ? 0 : 1;
  }
  out << std::defaultfloat;
  out << (failed == 0 ? "all " : "") << report.rows.size() - failed << "/" << report.rows.size()
      << " oracle rows pass (tolerance " << report.tolerance << ", worst deviation " << worst << ")\n";
}

}  // namespace binrec::cli
