#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace binrec {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform simplicial mesh of the unit interval (dim 1) or unit square
/// (dim 2). Immutable once built.
///
/// 2D nodes are numbered row by row, index = j * (n + 1) + i for the node at
/// (i / n, j / n). Every square cell is cut along its bottom-left to
/// top-right diagonal into two counter-clockwise triangles.
class Mesh {
 public:
  int dim() const noexcept { return dim_; }
  int cells_per_side() const noexcept { return cells_; }
  std::size_t node_count() const noexcept { return coords_.size() / dim_; }
  std::size_t element_count() const noexcept { return connectivity_.size() / (dim_ + 1); }
  int vertices_per_element() const noexcept { return dim_ + 1; }

  /// Maximal element diameter.
  double h() const noexcept { return h_; }

  Point node(std::size_t i) const noexcept;
  std::span<const int> element(std::size_t e) const noexcept;
  double element_measure(std::size_t e) const noexcept;

  std::span<const double> coordinates() const noexcept { return coords_; }

 private:
  friend std::shared_ptr<const Mesh> build_interval_mesh(int n_cells);
  friend std::shared_ptr<const Mesh> build_square_mesh(int n_cells_per_side);

  Mesh(int dim, int cells, std::vector<double> coords, std::vector<int> connectivity, double h);

  int dim_;
  int cells_;
  std::vector<double> coords_;
  std::vector<int> connectivity_;
  double h_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// n_cells + 1 equally spaced nodes on [0, 1]. Throws std::invalid_argument
/// for n_cells < 1.
MeshPtr build_interval_mesh(int n_cells);

/// (n + 1)^2 node grid on [0, 1]^2 with 2 n^2 triangles, h = sqrt(2) / n.
MeshPtr build_square_mesh(int n_cells_per_side);

/// Smallest cell count whose mesh width does not exceed h.
int cells_for_width(double h, int dim);

}  // namespace binrec
