#pragma once

// Dense qubit-space primitives: density matrices, Bloch vectors, tensor
// products, partial traces and unitary propagation.
//
// Index convention shared by every module: qubit 1 is the leftmost tensor
// factor, i.e. the most significant bit of a computational-basis index.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgdyn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Real3 = Eigen::Vector3d;

inline constexpr Complex kI{0.0, 1.0};

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameter, dimension mismatch, malformed config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity broke a physical invariant (PSD, trace, norm).
class NumericError : public Error {
 public:
  using Error::Error;
};

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double min_eigenvalue = -1e-10;
inline constexpr double bloch_norm = 1e-12;
inline constexpr double hamiltonian_hermitian = 1e-10;
}  // namespace tol

enum class Pauli { I, X, Y, Z };

inline const char* to_string(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Y: return "Y";
    case Pauli::Z: return "Z";
  }
  return "?";
}

inline Matrix pauli(Pauli p) {
  Matrix m(2, 2);
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -kI, kI, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline constexpr Pauli kBlochAxes[3] = {Pauli::X, Pauli::Y, Pauli::Z};

inline bool is_power_of_two(Eigen::Index d) { return d > 0 && (d & (d - 1)) == 0; }

inline int qubit_count(Eigen::Index dim) {
  if (!is_power_of_two(dim)) throw ValidationError("dimension " + std::to_string(dim) + " is not a power of two");
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

inline double hermitian_residual(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

/// Real 3-vector inside the closed unit ball.
class BlochVector {
 public:
  BlochVector() = default;
  BlochVector(double x, double y, double z) : r_(x, y, z) { check(); }
  explicit BlochVector(const Real3& r) : r_(r) { check(); }

  double x() const { return r_.x(); }
  double y() const { return r_.y(); }
  double z() const { return r_.z(); }
  double operator[](int i) const { return r_[i]; }
  double norm() const { return r_.norm(); }
  double transverse_norm() const { return std::hypot(r_.x(), r_.y()); }
  const Real3& vec() const { return r_; }

 private:
  void check() const {
    if (!r_.allFinite()) throw ValidationError("Bloch vector has non-finite components");
    if (r_.norm() > 1.0 + tol::bloch_norm)
      throw ValidationError("Bloch vector norm " + std::to_string(r_.norm()) + " exceeds 1");
  }

  Real3 r_ = Real3::Zero();
};

/// Hermitian, unit-trace, positive semidefinite operator on 2^n.
///
/// The public constructor validates Hermiticity and trace for every size and
/// the spectrum for dim <= kSpectralCheckDim (larger spectra cost O(d^3) and
/// are only produced internally from products of valid factors).
class DensityMatrix {
 public:
  static constexpr Eigen::Index kSpectralCheckDim = 256;

  DensityMatrix() : m_(Matrix::Identity(2, 2) * 0.5) {}

  explicit DensityMatrix(Matrix m) : m_(std::move(m)) { validate(); }

  /// Wraps a matrix known to be a state by construction; symmetrizes away
  /// round-off but performs no spectral check.
  static DensityMatrix unchecked(Matrix m) {
    DensityMatrix d(Tag{}, std::move(m));
    d.m_ = 0.5 * (d.m_ + d.m_.adjoint()).eval();
    return d;
  }

  static DensityMatrix maximally_mixed(Eigen::Index dim) {
    return unchecked(Matrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  static DensityMatrix pure(const Vector& psi) {
    const double nrm = psi.norm();
    if (nrm == 0.0) throw ValidationError("cannot build a pure state from the zero vector");
    const Vector v = psi / nrm;
    return unchecked(v * v.adjoint());
  }

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int qubits() const { return qubit_count(dim()); }
  double purity() const { return (m_ * m_).trace().real(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  struct Tag {};
  DensityMatrix(Tag, Matrix m) : m_(std::move(m)) {}

  void validate() {
    if (m_.rows() != m_.cols()) throw NumericError("density matrix is not square");
    if (!is_power_of_two(m_.rows())) throw NumericError("density matrix dimension is not a power of two");
    if (!m_.allFinite()) throw NumericError("density matrix has non-finite entries");
    if (const double h = hermitian_residual(m_); h > tol::hermitian)
      throw NumericError("density matrix not Hermitian (residual " + std::to_string(h) + ")");
    if (const double tr = m_.trace().real(); std::abs(tr - 1.0) > tol::trace)
      throw NumericError("density matrix trace " + std::to_string(tr) + " != 1");
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
    if (m_.rows() <= kSpectralCheckDim) {
      if (const double ev = min_eigenvalue(); ev < tol::min_eigenvalue)
        throw NumericError("density matrix not positive semidefinite (min eigenvalue " + std::to_string(ev) + ")");
    }
  }

  Matrix m_;
};

// ---------------------------------------------------------------------------
// Tensor products

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Ordered tensor product of square factors.
inline Matrix kron(std::span<const Matrix> factors) {
  if (factors.empty()) throw ValidationError("kron: empty factor list");
  for (const auto& f : factors)
    if (f.rows() != f.cols()) throw ValidationError("kron: factor is not square");
  Matrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

inline Matrix kron(std::initializer_list<Matrix> factors) {
  return kron(std::span<const Matrix>(factors.begin(), factors.size()));
}

inline DensityMatrix kron(std::span<const DensityMatrix> factors) {
  std::vector<Matrix> ms;
  ms.reserve(factors.size());
  for (const auto& f : factors) ms.push_back(f.matrix());
  return DensityMatrix::unchecked(kron(std::span<const Matrix>(ms)));
}

/// Single-qubit operator `op` acting on slot k (1-based) of n qubits.
inline Matrix embed(const Matrix& op, int k, int n) {
  if (k < 1 || k > n) throw ValidationError("embed: qubit index out of range");
  std::vector<Matrix> fs(static_cast<std::size_t>(n), Matrix::Identity(2, 2));
  fs[static_cast<std::size_t>(k - 1)] = op;
  return kron(std::span<const Matrix>(fs));
}

// ---------------------------------------------------------------------------
// Partial trace

namespace detail {

inline std::size_t bit_of(int qubit, int n) { return static_cast<std::size_t>(n - qubit); }

inline std::vector<Eigen::Index> offsets(const std::vector<int>& qubits, int n) {
  const std::size_t m = qubits.size();
  std::vector<Eigen::Index> out(std::size_t{1} << m, 0);
  for (std::size_t a = 0; a < out.size(); ++a) {
    Eigen::Index idx = 0;
    for (std::size_t i = 0; i < m; ++i)
      if ((a >> (m - 1 - i)) & 1U) idx |= Eigen::Index{1} << bit_of(qubits[i], n);
    out[a] = idx;
  }
  return out;
}

}  // namespace detail

/// Reduced operator on the qubits in `keep` (1-based, any order; output is in
/// ascending qubit order).
inline Matrix partial_trace(const Matrix& m, std::span<const int> keep, int n) {
  if (n < 1 || m.rows() != (Eigen::Index{1} << n) || m.cols() != m.rows())
    throw ValidationError("partial_trace: matrix dimension does not match qubit count");
  if (keep.empty()) throw ValidationError("partial_trace: empty keep set");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw ValidationError("partial_trace: duplicate qubit index");
  if (kept.front() < 1 || kept.back() > n) throw ValidationError("partial_trace: qubit index out of range");

  std::vector<int> traced;
  for (int q = 1; q <= n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  const auto ko = detail::offsets(kept, n);
  const auto to = detail::offsets(traced, n);
  const auto dk = static_cast<Eigen::Index>(ko.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      Complex acc = 0.0;
      for (const auto e : to) acc += m(ko[static_cast<std::size_t>(a)] + e, ko[static_cast<std::size_t>(b)] + e);
      out(a, b) = acc;
    }
  return out;
}

inline Matrix partial_trace(const Matrix& m, std::initializer_list<int> keep, int n) {
  return partial_trace(m, std::span<const int>(keep.begin(), keep.size()), n);
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep, int n) {
  return DensityMatrix::unchecked(partial_trace(rho.matrix(), keep, n));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep, int n) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()), n);
}

/// One-qubit marginal of slot k; O(2^n) specialization of partial_trace.
inline Matrix marginal(const Matrix& m, int k, int n) {
  if (k < 1 || k > n) throw ValidationError("marginal: qubit index out of range");
  if (m.rows() != (Eigen::Index{1} << n)) throw ValidationError("marginal: dimension mismatch");
  const Eigen::Index bit = Eigen::Index{1} << detail::bit_of(k, n);
  Matrix out = Matrix::Zero(2, 2);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i & bit) continue;
    out(0, 0) += m(i, i);
    out(0, 1) += m(i, i | bit);
    out(1, 0) += m(i | bit, i);
    out(1, 1) += m(i | bit, i | bit);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bloch coordinates

inline BlochVector bloch_from_density(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw ValidationError("bloch_from_density: state is not a single qubit");
  const Matrix& m = rho.matrix();
  const double x = 2.0 * m(1, 0).real();
  const double y = 2.0 * m(1, 0).imag();
  const double z = (m(0, 0) - m(1, 1)).real();
  const Real3 r(x, y, z);
  // Round-off on a pure state may push the norm a hair past one.
  return BlochVector(r.norm() > 1.0 ? Real3(r / r.norm()) : r);
}

inline Matrix bloch_matrix(const Real3& r) {
  Matrix m(2, 2);
  m << 0.5 * (1.0 + r.z()), 0.5 * Complex(r.x(), -r.y()), 0.5 * Complex(r.x(), r.y()), 0.5 * (1.0 - r.z());
  return m;
}

inline DensityMatrix density_from_bloch(const BlochVector& r) { return DensityMatrix::unchecked(bloch_matrix(r.vec())); }

// ---------------------------------------------------------------------------
// Norms and entropies

/// Sum of singular values.
inline double trace_norm(const Matrix& m) {
  if (hermitian_residual(m) < 1e-13) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) { return trace_norm(a.matrix() - b.matrix()); }

inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (const double ev : es.eigenvalues())
    if (ev > 1e-300) s -= ev * std::log(ev);
  return s;
}

// ---------------------------------------------------------------------------
// Unitary propagation

/// exp(-iHt) through one Hermitian eigendecomposition, reusable over many t.
/// Diagonal Hamiltonians skip the decomposition and conjugate elementwise.
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const Matrix& h) {
    if (h.rows() != h.cols()) throw ValidationError("Hamiltonian is not square");
    if (const double r = hermitian_residual(h); r > tol::hamiltonian_hermitian)
      throw ValidationError("Hamiltonian is not Hermitian (residual " + std::to_string(r) + ")");
    const Matrix hs = 0.5 * (h + h.adjoint());
    Matrix off = hs;
    off.diagonal().setZero();
    diagonal_ = off.cwiseAbs().maxCoeff() == 0.0;
    if (diagonal_) {
      energies_ = hs.diagonal().real();
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hs);
      energies_ = es.eigenvalues();
      vectors_ = es.eigenvectors();
    }
  }

  Eigen::Index dim() const { return energies_.size(); }
  bool diagonal() const { return diagonal_; }
  const Eigen::VectorXd& energies() const { return energies_; }

  Matrix unitary(double t) const {
    const Vector phases = phase_vector(t);
    if (diagonal_) return phases.asDiagonal();
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

  Matrix evolve(const Matrix& rho, double t) const {
    check_dim(rho.rows());
    if (t == 0.0) return rho;
    const Vector ph = phase_vector(t);
    if (diagonal_) {
      Matrix out(rho.rows(), rho.cols());
      for (Eigen::Index j = 0; j < rho.cols(); ++j)
        for (Eigen::Index i = 0; i < rho.rows(); ++i) out(i, j) = ph[i] * rho(i, j) * std::conj(ph[j]);
      return out;
    }
    // Rotate into the eigenbasis, apply phases, rotate back.
    Matrix r = vectors_.adjoint() * rho * vectors_;
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, j) *= ph[i] * std::conj(ph[j]);
    return vectors_ * r * vectors_.adjoint();
  }

  DensityMatrix evolve(const DensityMatrix& rho, double t) const { return DensityMatrix::unchecked(evolve(rho.matrix(), t)); }

  Vector evolve_state(const Vector& psi, double t) const {
    check_dim(psi.size());
    const Vector ph = phase_vector(t);
    if (diagonal_) return ph.cwiseProduct(psi);
    return vectors_ * ph.cwiseProduct(vectors_.adjoint() * psi);
  }

 private:
  Vector phase_vector(double t) const {
    Vector ph(energies_.size());
    for (Eigen::Index i = 0; i < energies_.size(); ++i) ph[i] = std::exp(-kI * energies_[i] * t);
    return ph;
  }

  void check_dim(Eigen::Index d) const {
    if (d != dim()) throw ValidationError("state dimension does not match Hamiltonian");
  }

  bool diagonal_ = false;
  Eigen::VectorXd energies_;
  Matrix vectors_;
};

/// U rho U^dagger with U = exp(-iHt).
inline DensityMatrix evolve_unitary(const DensityMatrix& rho, const Matrix& h, double t) {
  return HermitianPropagator(h).evolve(rho, t);
}

}  // namespace cgdyn
