#pragma once

// Effective dynamics Gamma_t = C o V_t o A: assign a maximum-entropy product
// state, propagate it unitarily, coarse-grain back to one qubit.
//
// Three propagation routes:
//   Dense       full 2^n density matrix, one eigendecomposition of H
//   Factorized  closed-form one-qubit marginals for Hamiltonians that are
//               diagonal in sigma^z (field, g = 0 Ising, local z); any n
//   StateVector pure product inputs, 2^n amplitudes

#include "cgdyn/coarse_grain.hpp"
#include "cgdyn/hamiltonian.hpp"
#include "cgdyn/maxent.hpp"

#include <cmath>
#include <memory>
#include <mutex>

namespace cgdyn {

enum class Route { Auto, Dense, Factorized, StateVector };

inline const char* to_string(Route r) {
  switch (r) {
    case Route::Auto: return "auto";
    case Route::Dense: return "dense";
    case Route::Factorized: return "factorized";
    case Route::StateVector: return "state-vector";
  }
  return "?";
}

inline constexpr int kMaxMixedIsingQubits = 8;
inline constexpr int kMaxStateVectorQubits = 24;

struct Trajectory {
  std::vector<double> times;
  std::vector<BlochVector> bloch;
  std::vector<double> purity;
  std::vector<double> probs;
  std::string model;
  Route route = Route::Auto;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return times.size(); }
};

namespace detail {

/// <exp(i a sigma^z)> on a qubit with Bloch z-component zbar.
inline Complex z_phase_average(double a, double zbar) { return {std::cos(a), zbar * std::sin(a)}; }

inline Matrix scale_coherence(const Matrix& rho, Complex factor) {
  Matrix out = rho;
  out(0, 1) = rho(0, 1) * factor;
  out(1, 0) = std::conj(out(0, 1));
  return out;
}

/// Products over all j != k of v_j, robust to zero entries.
inline std::vector<double> products_excluding_each(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> prefix(n + 1, 1.0), suffix(n + 1, 1.0), out(n);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * v[i];
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] * v[i];
  for (std::size_t i = 0; i < n; ++i) out[i] = prefix[i] * suffix[i + 1];
  return out;
}

inline Matrix marginal_from_state(const Vector& psi, int k, int n) {
  const Eigen::Index bit = Eigen::Index{1} << (n - k);
  Matrix out = Matrix::Zero(2, 2);
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (i & bit) continue;
    const Complex a = psi[i], b = psi[i | bit];
    out(0, 0) += std::norm(a);
    out(0, 1) += a * std::conj(b);
    out(1, 1) += std::norm(b);
  }
  out(1, 0) = std::conj(out(0, 1));
  return out;
}

/// exp(-iHt) psi for the Ising chain without forming H: Chebyshev expansion
/// of the matrix-free action.
inline Vector ising_chebyshev_evolve(const IsingChain& c, const Vector& psi, double t) {
  if (t == 0.0) return psi;
  const int n = c.n;
  const Eigen::VectorXd diag = ising_diagonal(c);
  const double half_width = std::abs(c.J) * static_cast<double>(c.bonds().size()) + std::abs(c.g) * n + 1e-12;
  auto apply = [&](const Vector& v) {
    Vector out = diag.cast<Complex>().cwiseProduct(v);
    if (c.g != 0.0)
      for (Eigen::Index i = 0; i < v.size(); ++i)
        for (int k = 1; k <= n; ++k) out[i] -= c.g * v[i ^ (Eigen::Index{1} << (n - k))];
    return Vector(out / half_width);
  };
  const double x = half_width * t;
  const auto sign = x < 0 ? -1.0 : 1.0;
  const double ax = std::abs(x);
  // exp(-i x h) = J0(x) + 2 sum_k (-i)^k J_k(x) T_k(h), with J_k(-x) = (-1)^k J_k(x).
  Vector t_prev = psi;
  Vector t_cur = apply(psi);
  Vector out = std::cyl_bessel_j(0.0, ax) * psi;
  Complex phase = -kI;
  int quiet = 0;
  for (int k = 1; k < 1000000; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), ax) * (k % 2 && sign < 0 ? -1.0 : 1.0);
    out += 2.0 * phase * jk * t_cur;
    if (k > ax && std::abs(jk) < 1e-17) {
      if (++quiet > 3) break;
    }
    Vector t_next = 2.0 * apply(t_cur) - t_prev;
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
    phase *= -kI;
  }
  return out;
}

}  // namespace detail

/// One-qubit marginals after exp(-iHt) acts on a product state, without the
/// 2^n space. Supported: FieldAllToAll, IsingChain with g = 0, LocalZSecond.
inline std::vector<DensityMatrix> evolve_product_fast(const std::vector<DensityMatrix>& factors, const HamiltonianSpec& spec,
                                                      double t) {
  const int n = spec.n();
  if (static_cast<int>(factors.size()) != n) throw ValidationError("evolve_product_fast: factor count does not match model");
  for (const auto& f : factors)
    if (f.dim() != 2) throw ValidationError("evolve_product_fast: factors must be single qubits");

  std::vector<double> zbar;
  zbar.reserve(factors.size());
  for (const auto& f : factors) zbar.push_back((f.matrix()(0, 0) - f.matrix()(1, 1)).real());

  std::vector<Complex> coherence(static_cast<std::size_t>(n), Complex(1.0));

  if (const auto* m = spec.get<FieldAllToAll>()) {
    // sigma^z-diagonal: rho_01 picks up exp(-2 i omega_k t); the parity term
    // contributes <exp(-2 i t Z_rest)> = cos 2t - i sin 2t prod_{j!=k} zbar_j.
    const auto rest = detail::products_excluding_each(zbar);
    for (int k = 0; k < n; ++k) {
      Complex c = std::exp(-2.0 * kI * m->omegas[static_cast<std::size_t>(k)] * t);
      if (m->include_interaction) c *= Complex(std::cos(2.0 * t), -std::sin(2.0 * t) * rest[static_cast<std::size_t>(k)]);
      coherence[static_cast<std::size_t>(k)] = c;
    }
  } else if (const auto* ising = spec.get<IsingChain>()) {
    if (ising->g != 0.0) throw ValidationError("evolve_product_fast: Ising chain with transverse field is not factorizable");
    // Flipping spin k shifts the energy by -2J sum_j m_kj z_j over its bonds;
    // each neighbour contributes an independent phase average.
    std::vector<std::vector<int>> multiplicity(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    for (const auto& [a, b] : ising->bonds()) {
      ++multiplicity[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)];
      ++multiplicity[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(a - 1)];
    }
    for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k)
      for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j)
        if (multiplicity[k][j] > 0) coherence[k] *= detail::z_phase_average(2.0 * ising->J * multiplicity[k][j] * t, zbar[j]);
  } else if (const auto* lz = spec.get<LocalZSecond>()) {
    coherence[1] = std::exp(-kI * lz->omega * t);
  } else {
    throw ValidationError("evolve_product_fast: model '" + spec.name() + "' has no factorized marginal evolution");
  }

  std::vector<DensityMatrix> out;
  out.reserve(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k)
    out.push_back(DensityMatrix::unchecked(detail::scale_coherence(factors[k].matrix(), coherence[k])));
  return out;
}

/// Gamma_t for a fixed coarse graining and Hamiltonian. Copies share one
/// lazily built eigendecomposition; safe to call from many threads.
class EffectiveDynamics {
 public:
  EffectiveDynamics(CoarseGraining cg, HamiltonianSpec spec, Route route = Route::Auto)
      : cg_(std::move(cg)), spec_(std::move(spec)), route_(route), lazy_(std::make_shared<Lazy>()) {
    if (cg_.n() != spec_.n())
      throw ValidationError("coarse graining has " + std::to_string(cg_.n()) + " particles but the model has " +
                            std::to_string(spec_.n()));
  }

  const CoarseGraining& coarse_graining() const { return cg_; }
  const HamiltonianSpec& spec() const { return spec_; }

  /// Route actually used for a given assigned state.
  Route resolve(const AssignedState& s) const {
    const int n = spec_.n();
    Route r = route_;
    if (r == Route::Auto) {
      if (spec_.get<FieldAllToAll>() || spec_.get<LocalZSecond>()) {
        r = Route::Factorized;
      } else if (const auto* ising = spec_.get<IsingChain>()) {
        if (ising->g == 0.0) r = Route::Factorized;
        else if (s.solution.pure) r = Route::StateVector;
        else {
          if (n > kMaxMixedIsingQubits)
            throw ValidationError("mixed effective states for the transverse-field Ising chain are limited to N <= " +
                                  std::to_string(kMaxMixedIsingQubits));
          r = Route::Dense;
        }
      } else {
        r = Route::Dense;
      }
    }
    if (r == Route::Dense && n > kMaxDenseQubits)
      throw ValidationError("dense route limited to " + std::to_string(kMaxDenseQubits) + " qubits");
    if (r == Route::StateVector) {
      if (!s.solution.pure) throw ValidationError("state-vector route needs a pure effective state");
      if (n > kMaxStateVectorQubits) throw ValidationError("state-vector route limited to " + std::to_string(kMaxStateVectorQubits) + " qubits");
      if (n > kMaxDenseQubits && !spec_.get<IsingChain>())
        throw ValidationError("matrix-free state-vector evolution is only available for the Ising chain");
    }
    return r;
  }

  DensityMatrix operator()(const DensityMatrix& rho_eff, double t) const {
    const AssignedState s = assign(rho_eff, cg_);
    return Prepared(*this, s).at(t);
  }

  Trajectory trajectory(const DensityMatrix& rho_eff, std::span<const double> times) const {
    if (times.empty()) throw ValidationError("trajectory: empty time grid");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1])) throw ValidationError("trajectory: time grid must be strictly increasing");
    const AssignedState s = assign(rho_eff, cg_);
    const Prepared prep(*this, s);
    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.probs = cg_.probs();
    traj.model = spec_.name();
    traj.route = prep.route;
    if (const auto* f = spec_.get<FieldAllToAll>()) traj.seed = f->seed;
    for (const double t : times) {
      const DensityMatrix out = prep.at(t);
      traj.bloch.push_back(bloch_from_density(out));
      traj.purity.push_back(out.purity());
    }
    return traj;
  }

 private:
  struct Lazy {
    std::once_flag once;
    std::optional<HermitianPropagator> prop;
  };

  const HermitianPropagator& propagator() const {
    std::call_once(lazy_->once, [this] { lazy_->prop.emplace(build_hamiltonian(spec_)); });
    return *lazy_->prop;
  }

  static DensityMatrix finalize(Matrix m) {
    m = 0.5 * (m + m.adjoint()).eval();
    return DensityMatrix(std::move(m));
  }

  // Per-initial-state data reused across every sample time.
  struct Prepared {
    Prepared(const EffectiveDynamics& d, const AssignedState& s) : dyn(d), state(s), route(d.resolve(s)) {
      if (route == Route::Dense) {
        product = s.product().matrix();
        dyn.propagator();
      } else if (route == Route::StateVector) {
        psi = Vector::Ones(1);
        for (const auto& f : s.factors) {
          Eigen::SelfAdjointEigenSolver<Matrix> es(f.matrix());
          psi = kron(Matrix(psi), Matrix(es.eigenvectors().col(1))).col(0);
        }
        if (dyn.spec_.n() <= kMaxDenseQubits) dyn.propagator();
      }
    }

    DensityMatrix at(double t) const {
      const CoarseGraining& cg = dyn.cg_;
      const int n = cg.n();
      switch (route) {
        case Route::Dense:
          return finalize(apply_cg(dyn.propagator().evolve(product, t), cg));
        case Route::StateVector: {
          const Vector out = n <= kMaxDenseQubits ? dyn.propagator().evolve_state(psi, t)
                                                  : detail::ising_chebyshev_evolve(*dyn.spec_.get<IsingChain>(), psi, t);
          Matrix m = Matrix::Zero(2, 2);
          for (int k = 1; k <= n; ++k)
            if (cg.p(k) != 0.0) m += cg.p(k) * detail::marginal_from_state(out, k, n);
          return finalize(m);
        }
        case Route::Factorized: {
          const auto marginals = evolve_product_fast(state.factors, dyn.spec_, t);
          Matrix m = Matrix::Zero(2, 2);
          for (int k = 1; k <= n; ++k) m += cg.p(k) * marginals[static_cast<std::size_t>(k - 1)].matrix();
          return finalize(m);
        }
        case Route::Auto: break;
      }
      throw Error("unresolved route");
    }

    const EffectiveDynamics& dyn;
    const AssignedState& state;
    Route route;
    Matrix product;
    Vector psi;
  };

  CoarseGraining cg_;
  HamiltonianSpec spec_;
  Route route_;
  std::shared_ptr<Lazy> lazy_;
};

inline DensityMatrix gamma_t(const DensityMatrix& rho_eff, const CoarseGraining& cg, const HamiltonianSpec& spec, double t,
                             Route route = Route::Auto) {
  return EffectiveDynamics(cg, spec, route)(rho_eff, t);
}

inline Trajectory trajectory(const DensityMatrix& rho_eff, const CoarseGraining& cg, const HamiltonianSpec& spec,
                             std::span<const double> times, Route route = Route::Auto) {
  return EffectiveDynamics(cg, spec, route).trajectory(rho_eff, times);
}

/// Inclusive grid t_max * i / steps, i = 0..steps.
inline std::vector<double> time_grid(double t_max, int steps) {
  if (steps < 1) throw ValidationError("time grid needs at least one step");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive and finite");
  std::vector<double> g(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) g[static_cast<std::size_t>(i)] = t_max * i / steps;
  return g;
}

}  // namespace cgdyn
