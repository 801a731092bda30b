#pragma once

#include "cgdyn/cgdyn.hpp"

#include <gtest/gtest.h>

namespace cgdyn::testing {

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline ::testing::AssertionResult matrices_near(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return ::testing::AssertionFailure() << "shape " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
  const double d = max_abs(a - b);
  if (d <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "max |a - b| = " << d << " > " << tol;
}

inline ::testing::AssertionResult vectors_near(const Real3& a, const Real3& b, double tol) {
  const double d = (a - b).cwiseAbs().maxCoeff();
  if (d <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "(" << a.transpose() << ") vs (" << b.transpose() << "), max diff " << d;
}

/// Uniform point in the Bloch ball.
inline Real3 random_bloch(Rng& rng, double max_norm = 1.0) {
  std::normal_distribution<double> g;
  Real3 v(g(rng), g(rng), g(rng));
  const double r = max_norm * std::cbrt(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
  return r * v.normalized();
}

inline DensityMatrix random_qubit(Rng& rng, double max_norm = 1.0) { return density_from_bloch(BlochVector(random_bloch(rng, max_norm))); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Vector basis_state(int index, int n) {
  Vector v = Vector::Zero(Eigen::Index{1} << n);
  v[index] = 1.0;
  return v;
}

}  // namespace cgdyn::testing
