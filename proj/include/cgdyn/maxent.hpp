#pragma once

// Maximum-entropy assignment: the product state of largest von Neumann
// entropy whose fuzzy-operator expectations reproduce a given effective qubit.
//
// For qubits the k-th factor exp(p_k lambda n.sigma)/Z_k has Bloch vector
// tanh(p_k lambda) n, so the whole solve reduces to the scalar equation
//   sum_k p_k tanh(p_k lambda) = |r_eff|.

#include "cgdyn/coarse_grain.hpp"

#include <limits>

namespace cgdyn {

inline constexpr double kPureThreshold = 1e-9;

struct LagrangeSolution {
  double lambda = 0.0;  ///< +infinity for pure effective states
  bool pure = false;
  Real3 direction = Real3(0, 0, 1);
  std::vector<double> per_particle_r;  ///< r_k = tanh(p_k lambda)
  int iterations = 0;
  double residual = 0.0;  ///< |sum_k p_k r_k - r_eff|

  Real3 multipliers() const { return lambda * direction; }  ///< lambda_alpha
};

/// Left-hand side of the norm equation.
inline double fuzzy_norm(double lambda, const CoarseGraining& cg) {
  double s = 0.0;
  for (const double p : cg.probs()) s += p * std::tanh(p * lambda);
  return s;
}

/// Bracketed bisection for lambda >= 0. The direction is left as +z; assign()
/// supplies the real one.
inline LagrangeSolution solve_lambda(double r_ef, const CoarseGraining& cg) {
  if (!(r_ef >= 0.0)) throw ValidationError("solve_lambda: r_ef must be nonnegative");
  if (r_ef > 1.0 + tol::bloch_norm) throw ValidationError("solve_lambda: r_ef exceeds 1");

  LagrangeSolution sol;
  const auto n = static_cast<std::size_t>(cg.n());
  if (r_ef == 0.0) {
    sol.per_particle_r.assign(n, 0.0);
    return sol;
  }
  if (r_ef > 1.0 - kPureThreshold) {
    sol.pure = true;
    sol.lambda = std::numeric_limits<double>::infinity();
    for (const double p : cg.probs()) sol.per_particle_r.push_back(p > 0.0 ? 1.0 : 0.0);
    return sol;
  }

  double lo = 0.0;
  double hi = 1.0;
  while (fuzzy_norm(hi, cg) < r_ef) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("solve_lambda: bracket expansion diverged");
  }
  for (sol.iterations = 0; sol.iterations < 200; ++sol.iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = fuzzy_norm(mid, cg) - r_ef;
    if (f == 0.0) {
      lo = hi = mid;
      break;
    }
    (f < 0.0 ? lo : hi) = mid;
  }
  const double flo = std::abs(fuzzy_norm(lo, cg) - r_ef);
  const double fhi = std::abs(fuzzy_norm(hi, cg) - r_ef);
  sol.lambda = flo <= fhi ? lo : hi;
  sol.residual = std::min(flo, fhi);
  for (const double p : cg.probs()) sol.per_particle_r.push_back(std::tanh(p * sol.lambda));
  return sol;
}

/// Product microscopic state; factors share the effective Bloch direction.
struct AssignedState {
  std::vector<DensityMatrix> factors;
  LagrangeSolution solution;

  int n() const { return static_cast<int>(factors.size()); }
  Real3 bloch(int k) const { return bloch_from_density(factors.at(static_cast<std::size_t>(k - 1))).vec(); }
  DensityMatrix product() const { return kron(std::span<const DensityMatrix>(factors)); }
};

inline AssignedState assign(const DensityMatrix& rho_eff, const CoarseGraining& cg) {
  const BlochVector r = bloch_from_density(rho_eff);
  const double norm = r.norm();
  AssignedState out;
  out.solution = solve_lambda(std::min(norm, 1.0), cg);
  if (norm > 0.0) out.solution.direction = r.vec() / norm;

  if (out.solution.pure) {
    if (!cg.strictly_positive())
      throw ValidationError("assign: pure effective state with a zero p_k has no unique maximum-entropy assignment");
    // Inside the threshold band every factor is rho_eff itself, which keeps
    // C(A(rho)) = rho exact; at |r| = 1 this is |phi><phi|^n.
    std::fill(out.solution.per_particle_r.begin(), out.solution.per_particle_r.end(), norm);
    out.solution.residual = 0.0;
    out.factors.assign(static_cast<std::size_t>(cg.n()), rho_eff);
    return out;
  }

  out.factors.reserve(static_cast<std::size_t>(cg.n()));
  for (const double rk : out.solution.per_particle_r)
    out.factors.push_back(DensityMatrix::unchecked(bloch_matrix(rk * out.solution.direction)));
  return out;
}

/// Dilated assignment on system (x) ancilla: A(Tr_E rho) (x) I_E / dim_E.
/// The effective qubit is the leftmost factor of the input.
inline DensityMatrix assign_extended(const DensityMatrix& rho_tilde, const CoarseGraining& cg, Eigen::Index dim_e) {
  if (dim_e < 1 || rho_tilde.dim() != 2 * dim_e)
    throw ValidationError("assign_extended: joint dimension must be 2 * dim_E");
  Matrix reduced = Matrix::Zero(2, 2);
  for (Eigen::Index a = 0; a < 2; ++a)
    for (Eigen::Index b = 0; b < 2; ++b)
      for (Eigen::Index e = 0; e < dim_e; ++e) reduced(a, b) += rho_tilde.matrix()(a * dim_e + e, b * dim_e + e);
  const AssignedState s = assign(DensityMatrix::unchecked(reduced), cg);
  const Matrix ancilla = Matrix::Identity(dim_e, dim_e) / static_cast<double>(dim_e);
  return DensityMatrix::unchecked(kron(s.product().matrix(), ancilla));
}

}  // namespace cgdyn
