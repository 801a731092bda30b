#pragma once

// Closed-form effective channels for the SWAP, CNOT, field, Ising and local-z
// models. These are the analytic predictions the generic Gamma_t pipeline is
// tested against; none of them calls into evolve.hpp.

#include "cgdyn/coarse_grain.hpp"
#include "cgdyn/maxent.hpp"

#include <array>
#include <numbers>

namespace cgdyn {

inline void check_unit_interval(double q, const char* what) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError(std::string(what) + ": parameter must lie in [0, 1]");
}

/// q rho + (1 - q) I/2: Bloch vector scaled by q.
inline DensityMatrix depolarize(const DensityMatrix& rho, double q) {
  check_unit_interval(q, "depolarize");
  return DensityMatrix::unchecked(q * rho.matrix() + (1.0 - q) * Matrix::Identity(2, 2) * 0.5);
}

namespace detail {
/// q rho + (1 - q) sigma rho sigma for any real q (the CNOT formulas feed
/// expectation values in [-1, 1]).
inline Matrix dephase_affine(const Matrix& rho, double q, Pauli axis) {
  const Matrix s = pauli(axis);
  return q * rho + (1.0 - q) * s * rho * s;
}
}  // namespace detail

/// q rho + (1 - q) sigma rho sigma: transverse components scaled by 2q - 1.
inline DensityMatrix dephase(const DensityMatrix& rho, double q, Pauli axis) {
  check_unit_interval(q, "dephase");
  if (axis == Pauli::I) throw ValidationError("dephase: axis must be X, Y or Z");
  return DensityMatrix::unchecked(detail::dephase_affine(rho.matrix(), q, axis));
}

// ---------------------------------------------------------------------------
// SWAP: a state-dependent depolarizing channel

struct SwapParameters {
  double omega = 1.0;
  double p1 = 0.5, p2 = 0.5;
  double r1 = 0.0, r2 = 0.0;  ///< Bloch norms of the two assigned factors

  double r_ef0() const { return p1 * r1 + p2 * r2; }
};

inline SwapParameters swap_parameters(const DensityMatrix& rho_eff, const CoarseGraining& cg, double omega) {
  if (cg.n() != 2) throw ValidationError("SWAP model needs n = 2");
  const AssignedState s = assign(rho_eff, cg);
  return {omega, cg.p(1), cg.p(2), s.bloch(1).norm(), s.bloch(2).norm()};
}

/// Ratio of effective Bloch norms at t and 0.
inline double kappa_swap(const SwapParameters& s, double t, std::optional<double> r_ef0 = std::nullopt) {
  for (const double r : {s.r1, s.r2}) check_unit_interval(r, "kappa_swap");
  if (r_ef0 && std::abs(*r_ef0 - s.r_ef0()) > 1e-10) throw ValidationError("kappa_swap: r_ef0 != p1 r1 + p2 r2");
  const double a = s.r_ef0();
  if (a == 0.0) return 1.0;
  const double b = s.p1 * s.r2 + s.p2 * s.r1;
  // (A cos^2 + B sin^2) / A, written so that B == A gives exactly 1.
  return 1.0 + (b - a) * std::pow(std::sin(s.omega * t), 2) / a;
}

/// d(ln kappa)/dt in closed form.
inline double swap_rate(const SwapParameters& s, double t) {
  const double a = s.r_ef0();
  if (a == 0.0) return 0.0;
  const double b = s.p1 * s.r2 + s.p2 * s.r1;
  return (b - a) * s.omega * std::sin(2.0 * s.omega * t) / (a + (b - a) * std::pow(std::sin(s.omega * t), 2));
}

/// Gamma_t(rho) = kappa rho + (1 - kappa) I/2.
inline DensityMatrix swap_effective(const DensityMatrix& rho_eff, const SwapParameters& s, double t) {
  const double k = kappa_swap(s, t);
  return DensityMatrix::unchecked(k * rho_eff.matrix() + (1.0 - k) * 0.5 * Matrix::Identity(2, 2));
}

struct KappaCurve {
  std::vector<double> times;
  std::vector<double> kappa;
  std::vector<double> rate;
};

inline KappaCurve kappa_curve(const SwapParameters& s, std::span<const double> times) {
  KappaCurve c;
  for (const double t : times) {
    c.times.push_back(t);
    c.kappa.push_back(kappa_swap(s, t));
    c.rate.push_back(swap_rate(s, t));
  }
  return c;
}

// ---------------------------------------------------------------------------
// CNOT: two state-dependent dephasing channels

/// Gamma_t = rho/2 + (p1/2) E^x + (p2/2) E^z with the expectations <sigma^x_2>,
/// <sigma^z_1> taken on the assigned factors (constants of the motion).
inline DensityMatrix cnot_effective(const DensityMatrix& rho_eff, const CoarseGraining& cg, double omega, double t) {
  if (cg.n() != 2) throw ValidationError("cnot_effective: needs n = 2");
  const AssignedState s = assign(rho_eff, cg);
  const Matrix& rho1 = s.factors[0].matrix();
  const Matrix& rho2 = s.factors[1].matrix();
  const Matrix x = pauli(Pauli::X), z = pauli(Pauli::Z);
  const double x2 = (x * rho2).trace().real();
  const double z1 = (z * rho1).trace().real();
  const double c = std::cos(omega * t), sn = std::sin(omega * t);

  const Matrix ex = rho1 * c * c + detail::dephase_affine(rho1, x2, Pauli::Z) * sn * sn -
                    kI * (1.0 - x2) * c * sn * (rho1 * z - z * rho1);
  const Matrix ez = rho2 * c * c + detail::dephase_affine(rho2, z1, Pauli::X) * sn * sn -
                    kI * (1.0 - z1) * c * sn * (rho2 * x - x * rho2);
  return DensityMatrix::unchecked(0.5 * rho_eff.matrix() + 0.5 * cg.p(1) * ex + 0.5 * cg.p(2) * ez);
}

/// Elliptical Bloch path u sin t + v cos t + c under (1/2) sigma^z (x) sigma^x.
struct EllipseParams {
  Real3 u = Real3::Zero();
  Real3 v = Real3::Zero();
  Real3 c = Real3::Zero();

  Real3 at(double t) const { return u * std::sin(t) + v * std::cos(t) + c; }
};

/// Qubit 1 precesses about z at a rate set by <sigma^x_2>, qubit 2 about x at
/// a rate set by <sigma^z_1>; both expectations are conserved.
inline EllipseParams ellipse_params(const Real3& r1, const Real3& r2, const CoarseGraining& cg) {
  if (cg.n() != 2) throw ValidationError("ellipse_params: needs n = 2");
  const double p1 = cg.p(1), p2 = cg.p(2);
  EllipseParams e;
  e.u = Real3(-p1 * r2.x() * r1.y(), p1 * r2.x() * r1.x() - p2 * r1.z() * r2.z(), p2 * r1.z() * r2.y());
  e.v = Real3(p1 * r1.x(), p1 * r1.y() + p2 * r2.y(), p2 * r2.z());
  e.c = Real3(p2 * r2.x(), 0.0, p1 * r1.z());
  return e;
}

// ---------------------------------------------------------------------------
// Ising chain at g = 0

/// Coherence multiplier gamma(theta, t) = (cos 2Jt + i cos(theta) sin 2Jt)^2.
inline Complex ising_gamma(double theta, double t, double J) {
  const Complex g(std::cos(2.0 * J * t), std::cos(theta) * std::sin(2.0 * J * t));
  return g * g;
}

/// Effective state for the pure input cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
inline DensityMatrix ising_effective_state(double theta, double phi, double t, double J) {
  Matrix m(2, 2);
  const Complex off = ising_gamma(theta, t, J) * 0.5 * std::exp(-kI * phi) * std::sin(theta);
  m << std::pow(std::cos(theta / 2), 2), off, std::conj(off), std::pow(std::sin(theta / 2), 2);
  return DensityMatrix::unchecked(m);
}

// ---------------------------------------------------------------------------
// Field + all-to-all interaction, large-n limit

/// Asymptote for t > t_c: only the preferred particle keeps a coherent
/// transverse component, of radius p1 r1 |n_perp|, precessing by 2 omega_1 t;
/// sigma^z is conserved. With the interaction the transverse part is further
/// dephased by D^z_{cos^2 t}, i.e. multiplied by cos 2t (a polar rose).
inline DensityMatrix field_limit_prediction(const DensityMatrix& rho_eff, double p1, double r1, double omega1, double t,
                                            bool with_interaction) {
  check_unit_interval(p1, "field_limit_prediction");
  check_unit_interval(r1, "field_limit_prediction");
  const Real3 r = bloch_from_density(rho_eff).vec();
  const double norm = r.norm();
  Real3 out(0.0, 0.0, r.z());
  if (norm > 0.0) {
    const double scale = p1 * r1 / norm;
    const double angle = 2.0 * omega1 * t;
    out.x() = scale * (r.x() * std::cos(angle) - r.y() * std::sin(angle));
    out.y() = scale * (r.x() * std::sin(angle) + r.y() * std::cos(angle));
    if (with_interaction) out.head<2>() *= std::cos(2.0 * t);
  }
  return DensityMatrix::unchecked(bloch_matrix(out));
}

// ---------------------------------------------------------------------------
// Linear but non-Markovian: H = (omega/2) I (x) sigma^z, non-preferential

inline DensityMatrix linear_nm_effective(const DensityMatrix& rho, double omega, double t) {
  if (rho.dim() != 2) throw ValidationError("linear_nm_effective: single-qubit input required");
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = std::exp(-kI * omega * t / 2.0);
  u(1, 1) = std::exp(kI * omega * t / 2.0);
  return DensityMatrix::unchecked(0.5 * (rho.matrix() + u * rho.matrix() * u.adjoint()));
}

/// Parametric circle traced by the Bloch vector.
inline Real3 linear_nm_bloch(const Real3& r, double omega, double t) {
  const double c = std::cos(omega * t), s = std::sin(omega * t);
  return {0.5 * (r.x() * c - r.y() * s + r.x()), 0.5 * (r.y() * c + r.x() * s + r.y()), r.z()};
}

struct CircleParams {
  Real3 center;
  double radius;
};

inline CircleParams circle_params(const Real3& r) { return {Real3(r.x() / 2, r.y() / 2, r.z()), 0.5 * std::hypot(r.x(), r.y())}; }

/// Effective Hamiltonian omega/4 sigma^z: half the microscopic frequency.
inline Matrix linear_nm_effective_hamiltonian(double omega) { return 0.25 * omega * pauli(Pauli::Z); }

/// Coefficient of (sigma^z rho sigma^z - rho) in the time-local master
/// equation; diverges where tan(omega t / 2) does and changes sign there.
inline double linear_nm_dephasing_rate(double omega, double t) { return 0.25 * omega * std::tan(0.5 * omega * t); }

// ---------------------------------------------------------------------------
// Microscopic channels that act equally on every marginal

/// n-qubit total z dephasing: average of sigma^a rho sigma^a over a in {I, Z}^n,
/// i.e. the computational-basis diagonal.
inline Matrix total_z_dephasing(const Matrix& rho) {
  qubit_count(rho.rows());
  return Matrix(rho.diagonal().asDiagonal());
}

/// Pauli-component-erasing map on two qubits: the coefficient of
/// sigma^a (x) sigma^b is multiplied by tau(a, b), indices ordered I, X, Y, Z.
inline Matrix pauli_component_erasing(const Matrix& rho, const Eigen::Matrix4d& tau) {
  if (rho.rows() != 4) throw ValidationError("pauli_component_erasing: two-qubit input required");
  static constexpr Pauli kAll[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  Matrix out = Matrix::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (tau(a, b) == 0.0) continue;
      const Matrix s = kron(pauli(kAll[a]), pauli(kAll[b]));
      out += tau(a, b) * (s * rho).trace() * s / 4.0;
    }
  return out;
}

/// The non-factorizable PCE example: keeps exactly the components whose
/// single-qubit labels are both in {I, Y} or both in {X, Z}.
inline Eigen::Matrix4d pce_example_tau() {
  Eigen::Matrix4d t;
  t << 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1;
  return t;
}

}  // namespace cgdyn
