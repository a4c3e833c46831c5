#include "binrec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace binrec {

Mesh::Mesh(int dim, int cells, std::vector<double> coords, std::vector<int> connectivity, double h)
    : dim_(dim), cells_(cells), coords_(std::move(coords)), connectivity_(std::move(connectivity)), h_(h) {}

Point Mesh::node(std::size_t i) const noexcept {
  if (dim_ == 1) return {coords_[i], 0.0};
  return {coords_[2 * i], coords_[2 * i + 1]};
}

std::span<const int> Mesh::element(std::size_t e) const noexcept {
  const auto nv = static_cast<std::size_t>(dim_ + 1);
  return std::span<const int>(connectivity_).subspan(e * nv, nv);
}

double Mesh::element_measure(std::size_t e) const noexcept {
  const auto v = element(e);
  if (dim_ == 1) return std::abs(coords_[v[1]] - coords_[v[0]]);
  const Point a = node(v[0]);
  const Point b = node(v[1]);
  const Point c = node(v[2]);
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

MeshPtr build_interval_mesh(int n_cells) {
  if (n_cells < 1) {
    throw std::invalid_argument("build_interval_mesh: n_cells must be >= 1, got " +
                                std::to_string(n_cells));
  }
  std::vector<double> coords(static_cast<std::size_t>(n_cells) + 1);
  for (int i = 0; i <= n_cells; ++i) coords[i] = static_cast<double>(i) / n_cells;
  coords.back() = 1.0;

  std::vector<int> conn;
  conn.reserve(2 * static_cast<std::size_t>(n_cells));
  for (int i = 0; i < n_cells; ++i) {
    conn.push_back(i);
    conn.push_back(i + 1);
  }
  return std::shared_ptr<const Mesh>(
      new Mesh(1, n_cells, std::move(coords), std::move(conn), 1.0 / n_cells));
}

MeshPtr build_square_mesh(int n) {
  if (n < 1) {
    throw std::invalid_argument("build_square_mesh: n_cells_per_side must be >= 1, got " +
                                std::to_string(n));
  }
  const auto side = static_cast<std::size_t>(n) + 1;
  std::vector<double> coords;
  coords.reserve(2 * side * side);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      coords.push_back(static_cast<double>(i) / n);
      coords.push_back(static_cast<double>(j) / n);
    }
  }

  std::vector<int> conn;
  conn.reserve(6 * static_cast<std::size_t>(n) * n);
  const int stride = n + 1;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = j * stride + i;
      const int b = a + 1;
      const int c = a + stride + 1;
      const int d = a + stride;
      conn.insert(conn.end(), {a, b, c, a, c, d});
    }
  }
  return std::shared_ptr<const Mesh>(
      new Mesh(2, n, std::move(coords), std::move(conn), std::sqrt(2.0) / n));
}

int cells_for_width(double h, int dim) {
  if (!(h > 0.0)) throw std::invalid_argument("cells_for_width: h must be positive");
  const double target = (dim == 1 ? 1.0 : std::sqrt(2.0)) / h;
  // tolerate round-off so that e.g. h = 1/160 does not become 161 cells
  const double n = std::ceil(target - 1e-9 * target);
  return std::max(1, static_cast<int>(n));
}

}  // namespace binrec
