#pragma once

// Seeded random states. Mixed states follow the Hilbert-Schmidt measure
// (normalized A A^dagger with complex Gaussian A); pure states are uniform.

#include "cgdyn/qcore.hpp"

#include <cstdint>
#include <random>

namespace cgdyn {

using Rng = std::mt19937_64;

/// splitmix64 step; derives independent per-sample seeds from one root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Matrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> g;
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

inline DensityMatrix random_mixed_state(Eigen::Index dim, Rng& rng) {
  const Matrix a = random_ginibre(dim, dim, rng);
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::unchecked(rho);
}

inline Vector random_state_vector(Eigen::Index dim, Rng& rng) {
  Vector v = random_ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

inline DensityMatrix random_pure_state(Eigen::Index dim, Rng& rng) { return DensityMatrix::pure(random_state_vector(dim, rng)); }

inline Matrix random_hermitian(Eigen::Index dim, Rng& rng) {
  const Matrix a = random_ginibre(dim, dim, rng);
  return 0.5 * (a + a.adjoint());
}

/// Random probability vector of length n with every entry > 0.
inline std::vector<double> random_probabilities(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(static_cast<std::size_t>(n));
  double s = 0.0;
  for (auto& x : p) s += (x = u(rng));
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace cgdyn
