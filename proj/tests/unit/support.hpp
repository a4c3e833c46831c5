#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "binrec/fem.hpp"

namespace binrec::test {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline FeFunction random_function(const MeshPtr& mesh, std::uint64_t seed, double lo = -1.0,
                                  double hi = 1.0) {
  return FeFunction{mesh, random_vector(mesh->node_count(), seed, lo, hi)};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace binrec::test
