#include "binrec/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "binrec/errors.hpp"

namespace binrec {

namespace {

struct QuadPoint {
  std::array<double, 3> bary;
  double weight;  // fraction of the element measure
};

const std::array<QuadPoint, 3>& gauss_1d() {
  static const std::array<QuadPoint, 3> rule = [] {
    const double a = 0.5 * std::sqrt(3.0 / 5.0);
    return std::array<QuadPoint, 3>{{
        {{0.5 + a, 0.5 - a, 0.0}, 5.0 / 18.0},
        {{0.5, 0.5, 0.0}, 8.0 / 18.0},
        {{0.5 - a, 0.5 + a, 0.0}, 5.0 / 18.0},
    }};
  }();
  return rule;
}

// Dunavant degree-4 rule.
const std::array<QuadPoint, 6>& gauss_2d() {
  static const std::array<QuadPoint, 6> rule = {{
      {{0.108103018168070, 0.445948490915965, 0.445948490915965}, 0.223381589678011},
      {{0.445948490915965, 0.108103018168070, 0.445948490915965}, 0.223381589678011},
      {{0.445948490915965, 0.445948490915965, 0.108103018168070}, 0.223381589678011},
      {{0.816847572980459, 0.091576213509771, 0.091576213509771}, 0.109951743655322},
      {{0.091576213509771, 0.816847572980459, 0.091576213509771}, 0.109951743655322},
      {{0.091576213509771, 0.091576213509771, 0.816847572980459}, 0.109951743655322},
  }};
  return rule;
}

// Gradients of the barycentric basis functions on triangle e.
std::array<Point, 3> triangle_gradients(const Mesh& mesh, std::span<const int> v, double area) {
  const Point p0 = mesh.node(v[0]);
  const Point p1 = mesh.node(v[1]);
  const Point p2 = mesh.node(v[2]);
  const double two_a = 2.0 * area;
  return {{
      {(p1.y - p2.y) / two_a, (p2.x - p1.x) / two_a},
      {(p2.y - p0.y) / two_a, (p0.x - p2.x) / two_a},
      {(p0.y - p1.y) / two_a, (p1.x - p0.x) / two_a},
  }};
}

template <typename ElementMatrix>
SparseMatrix assemble(const Mesh& mesh, ElementMatrix&& local) {
  const int nv = mesh.vertices_per_element();
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.element_count() * static_cast<std::size_t>(nv * (nv + 1) / 2));
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto v = mesh.element(e);
    for (int a = 0; a < nv; ++a) {
      for (int b = a; b < nv; ++b) triplets.push_back({v[a], v[b], local(e, v, a, b)});
    }
  }
  return SparseMatrix::from_symmetric_triplets(mesh.node_count(), triplets);
}

}  // namespace

FeFunction FeFunction::zeros(MeshPtr mesh) { return constant(std::move(mesh), 0.0); }

FeFunction FeFunction::constant(MeshPtr mesh, double value) {
  const std::size_t n = mesh->node_count();
  return {std::move(mesh), std::vector<double>(n, value)};
}

double FeFunction::evaluate(const Point& p) const {
  const int n = mesh->cells_per_side();
  if (mesh->dim() == 1) {
    const double x = std::clamp(p.x, 0.0, 1.0);
    const int i = std::min(n - 1, static_cast<int>(std::floor(x * n)));
    const double t = x * n - i;
    return (1.0 - t) * coeffs[i] + t * coeffs[i + 1];
  }
  const double x = std::clamp(p.x, 0.0, 1.0) * n;
  const double y = std::clamp(p.y, 0.0, 1.0) * n;
  const int i = std::min(n - 1, static_cast<int>(std::floor(x)));
  const int j = std::min(n - 1, static_cast<int>(std::floor(y)));
  const double s = x - i;
  const double t = y - j;
  const int stride = n + 1;
  const double a = coeffs[j * stride + i];
  const double b = coeffs[j * stride + i + 1];
  const double c = coeffs[(j + 1) * stride + i + 1];
  const double d = coeffs[(j + 1) * stride + i];
  if (s >= t) return a + s * (b - a) + t * (c - b);  // lower triangle (a, b, c)
  return a + s * (c - d) + t * (d - a);              // upper triangle (a, c, d)
}

SparseMatrix assemble_mass(const Mesh& mesh) {
  const double scale = mesh.dim() == 1 ? 1.0 / 6.0 : 1.0 / 12.0;
  return assemble(mesh, [&](std::size_t e, std::span<const int>, int a, int b) {
    return mesh.element_measure(e) * scale * (a == b ? 2.0 : 1.0);
  });
}

SparseMatrix assemble_stiffness(const Mesh& mesh) {
  if (mesh.dim() == 1) {
    return assemble(mesh, [&](std::size_t e, std::span<const int>, int a, int b) {
      return (a == b ? 1.0 : -1.0) / mesh.element_measure(e);
    });
  }
  return assemble(mesh, [&](std::size_t e, std::span<const int> v, int a, int b) {
    const double area = mesh.element_measure(e);
    const auto g = triangle_gradients(mesh, v, area);
    return area * (g[a].x * g[b].x + g[a].y * g[b].y);
  });
}

SparseMatrix assemble_lumped_mass(const Mesh& mesh) {
  const auto sums = assemble_mass(mesh).row_sums();
  return SparseMatrix::from_diagonal(sums);
}

std::shared_ptr<const FeSystem> assemble_system(MeshPtr mesh) {
  auto sys = std::make_shared<FeSystem>();
  sys->mass = assemble_mass(*mesh);
  sys->stiffness = assemble_stiffness(*mesh);
  sys->lumped_mass = sys->mass.row_sums();
  sys->mesh = std::move(mesh);
  return sys;
}

FeFunction interpolate(MeshPtr mesh, const Sampler& sampler) {
  FeFunction f = FeFunction::zeros(mesh);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = sampler(mesh->node(i));
  return f;
}

FeFunction l2_project(MeshPtr mesh, const Sampler& sampler) {
  std::vector<double> load(mesh->node_count(), 0.0);
  const int nv = mesh->vertices_per_element();
  auto accumulate = [&](const auto& rule) {
    for (std::size_t e = 0; e < mesh->element_count(); ++e) {
      const auto v = mesh->element(e);
      const double measure = mesh->element_measure(e);
      for (const auto& q : rule) {
        Point p{0.0, 0.0};
        for (int a = 0; a < nv; ++a) {
          const Point node = mesh->node(v[a]);
          p.x += q.bary[a] * node.x;
          p.y += q.bary[a] * node.y;
        }
        const double value = sampler(p) * q.weight * measure;
        for (int a = 0; a < nv; ++a) load[v[a]] += value * q.bary[a];
      }
    }
  };
  if (mesh->dim() == 1) {
    accumulate(gauss_1d());
  } else {
    accumulate(gauss_2d());
  }

  PcgSolver solver(assemble_mass(*mesh), Preconditioner::Jacobi);
  FeFunction f = FeFunction::zeros(mesh);
  solver.solve(load, f.coeffs, 1e-14, 10000);
  return f;
}

double inner(const SparseMatrix& A, std::span<const double> u, std::span<const double> v) {
  if (u.size() != A.size() || v.size() != A.size()) {
    throw std::invalid_argument("inner: dimension mismatch (matrix " + std::to_string(A.size()) +
                                ", vectors " + std::to_string(u.size()) + " and " +
                                std::to_string(v.size()) + ")");
  }
  return dot(u, A.apply(v));
}

double l2_norm(const SparseMatrix& M, std::span<const double> u) {
  return std::sqrt(std::max(0.0, inner(M, u, u)));
}

// ---------------------------------------------------------------------------
// PCG

PcgSolver::PcgSolver(SparseMatrix A, Preconditioner kind) : A_(std::move(A)), kind_(kind) {
  inv_diag_ = A_.diagonal();
  for (double& d : inv_diag_) {
    if (!(d > 0.0)) throw std::invalid_argument("PcgSolver: matrix has a non-positive diagonal");
    d = 1.0 / d;
  }
  if (kind_ == Preconditioner::IncompleteCholesky && !factor_incomplete_cholesky()) {
    kind_ = Preconditioner::Jacobi;
  }
}

bool PcgSolver::factor_incomplete_cholesky() {
  const std::size_t n = A_.size();
  const auto rp = A_.row_offsets();
  const auto cols = A_.column_indices();
  const auto vals = A_.values();

  l_ptr_.assign(n + 1, 0);
  l_cols_.clear();
  l_vals_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row_start = l_cols_.size();
    double diag = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(cols[k]);
      if (j > i) break;
      if (j == i) {
        diag = vals[k];
        break;
      }
      // L_ij = (a_ij - sum_{m<j} L_im L_jm) / L_jj
      double s = vals[k];
      std::size_t pi = row_start;
      std::size_t pj = l_ptr_[j];
      const std::size_t ej = l_ptr_[j + 1] - 1;  // skip diagonal of row j
      while (pi < l_cols_.size() && pj < ej) {
        if (l_cols_[pi] == l_cols_[pj]) {
          s -= l_vals_[pi++] * l_vals_[pj++];
        } else if (l_cols_[pi] < l_cols_[pj]) {
          ++pi;
        } else {
          ++pj;
        }
      }
      l_cols_.push_back(static_cast<int>(j));
      l_vals_.push_back(s / l_vals_[l_ptr_[j + 1] - 1]);
    }
    for (std::size_t p = row_start; p < l_cols_.size(); ++p) diag -= l_vals_[p] * l_vals_[p];
    if (!(diag > 0.0)) {
      l_ptr_.clear();
      l_cols_.clear();
      l_vals_.clear();
      return false;
    }
    l_cols_.push_back(static_cast<int>(i));
    l_vals_.push_back(std::sqrt(diag));
    l_ptr_[i + 1] = l_cols_.size();
  }
  return true;
}

void PcgSolver::precondition(std::span<const double> r, std::span<double> z) const {
  const std::size_t n = r.size();
  if (kind_ == Preconditioner::Jacobi) {
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag_[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = r[i];
    const std::size_t last = l_ptr_[i + 1] - 1;
    for (std::size_t p = l_ptr_[i]; p < last; ++p) s -= l_vals_[p] * z[l_cols_[p]];
    z[i] = s / l_vals_[last];
  }
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t last = l_ptr_[i + 1] - 1;
    z[i] /= l_vals_[last];
    const double zi = z[i];
    for (std::size_t p = l_ptr_[i]; p < last; ++p) z[l_cols_[p]] -= l_vals_[p] * zi;
  }
}

int PcgSolver::solve(std::span<const double> rhs, std::span<double> x, double tol,
                     int max_iter) const {
  const std::size_t n = A_.size();
  if (rhs.size() != n || x.size() != n) {
    throw std::invalid_argument("PcgSolver::solve: dimension mismatch");
  }
  const double norm_b = std::sqrt(dot(rhs, rhs));
  if (!std::isfinite(norm_b)) throw NumericalError("PcgSolver::solve: non-finite right-hand side", norm_b);
  if (norm_b == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return 0;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  A_.multiply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - q[i];
  double res = std::sqrt(dot(r, r));
  const double target = tol * norm_b;
  if (res <= target) return 0;

  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A_.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0) || !std::isfinite(pq)) {
      throw NumericalError("PcgSolver::solve: breakdown (matrix not SPD or non-finite values)",
                           res / norm_b);
    }
    const double step = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * q[i];
    }
    res = std::sqrt(dot(r, r));
    if (!std::isfinite(res)) throw NumericalError("PcgSolver::solve: non-finite residual", res);
    if (res <= target) return it;
    precondition(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NumericalError("PcgSolver::solve: no convergence in " + std::to_string(max_iter) +
                           " iterations, relative residual " + std::to_string(res / norm_b),
                       res / norm_b);
}

std::vector<double> solve_spd(const SparseMatrix& A, std::span<const double> rhs, double tol,
                              int max_iter) {
  PcgSolver solver(A, Preconditioner::Jacobi);
  std::vector<double> x(rhs.size(), 0.0);
  solver.solve(rhs, x, tol, max_iter);
  return x;
}

}  // namespace binrec
