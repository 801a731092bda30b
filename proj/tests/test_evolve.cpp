#include "support.hpp"

#include <numbers>

using namespace cgdyn;
using namespace cgdyn::testing;

namespace {

constexpr double kPi = std::numbers::pi;

/// Distance between unitaries modulo a global phase.
double phase_free_distance(const Matrix& u, const Matrix& v) {
  const Complex overlap = (v.adjoint() * u).trace();
  const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0);
  return max_abs(u - phase * v);
}

Matrix textbook_swap() {
  Matrix s = Matrix::Zero(4, 4);
  s(0, 0) = s(3, 3) = s(1, 2) = s(2, 1) = 1.0;
  return s;
}

Matrix textbook_cnot() {
  Matrix c = Matrix::Zero(4, 4);
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

std::vector<Matrix> dense_marginals(const std::vector<DensityMatrix>& factors, const HamiltonianSpec& spec, double t) {
  const Matrix out = HermitianPropagator(build_hamiltonian(spec)).evolve(kron(std::span<const DensityMatrix>(factors)).matrix(), t);
  std::vector<Matrix> m;
  for (int k = 1; k <= spec.n(); ++k) m.push_back(marginal(out, k, spec.n()));
  return m;
}

std::vector<DensityMatrix> random_factors(int n, Rng& rng) {
  std::vector<DensityMatrix> f;
  for (int k = 0; k < n; ++k) f.push_back(random_qubit(rng));
  return f;
}

}  // namespace

TEST(BuildHamiltonian, SwapAndCnotGates) {
  const HermitianPropagator swap(build_hamiltonian(SwapModel{2.0}));
  EXPECT_LT(phase_free_distance(swap.unitary(kPi / 4), textbook_swap()), 1e-10);
  const HermitianPropagator cnot(build_hamiltonian(CnotModel{1.0}));
  EXPECT_LT(phase_free_distance(cnot.unitary(kPi / 2), textbook_cnot()), 1e-10);
}

TEST(BuildHamiltonian, IsingWithoutFieldIsDiagonal) {
  const Matrix h = build_hamiltonian(IsingChain{3, 1.0, 0.0, Boundary::Closed});
  EXPECT_EQ(max_abs(h - Matrix(h.diagonal().asDiagonal())), 0.0);
  // |000>: three satisfied bonds.
  EXPECT_DOUBLE_EQ(h(0, 0).real(), -3.0);
}

TEST(BuildHamiltonian, IsingTransverseFieldHermitian) {
  const Matrix h = build_hamiltonian(IsingChain{4, 1.0, 0.5, Boundary::Open});
  EXPECT_EQ(hermitian_residual(h), 0.0);
  EXPECT_DOUBLE_EQ(h(0, 1).real(), -0.5);
}

TEST(BuildHamiltonian, Limits) {
  EXPECT_THROW(build_hamiltonian(IsingChain{13, 1.0, 0.0, Boundary::Closed}), ValidationError);
  EXPECT_THROW(HamiltonianSpec(IsingChain{1, 1.0, 0.0, Boundary::Closed}), ValidationError);
  EXPECT_THROW(HamiltonianSpec(SwapModel{std::nan("")}), ValidationError);
  EXPECT_THROW(HamiltonianSpec(FieldAllToAll{{1.0}, false, {}, {}}), ValidationError);
}

TEST(BuildHamiltonian, FieldSamplingIsSeeded) {
  const FieldAllToAll a = sample_field(20, 1.5, 0.2, 7, false), b = sample_field(20, 1.5, 0.2, 7, false);
  EXPECT_EQ(a.omegas, b.omegas);
  EXPECT_NE(a.omegas, sample_field(20, 1.5, 0.2, 8, false).omegas);
  EXPECT_NEAR(a.decoherence_time(), 2 * kPi / 0.2, 1e-12);
}

TEST(GammaT, IdentityAtTimeZero) {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const DensityMatrix rho = random_qubit(rng, 0.99);
    const CoarseGraining cg(random_probabilities(2, rng));
    for (const HamiltonianSpec& spec : {HamiltonianSpec(SwapModel{1.0}), HamiltonianSpec(CnotModel{1.0}),
                                        HamiltonianSpec(LocalZSecond{0.7}), HamiltonianSpec(IsingChain{2, 1.0, 0.4, Boundary::Open})})
      EXPECT_TRUE(matrices_near(gamma_t(rho, cg, spec, 0.0).matrix(), rho.matrix(), 1e-10)) << spec.name();
  }
}

TEST(GammaT, SwapNonPreferentialIsFrozen) {
  Rng rng(42);
  const CoarseGraining cg = make_distribution(NonPreferential{}, 2);
  for (int i = 0; i < 20; ++i) {
    const DensityMatrix rho = random_qubit(rng);
    EXPECT_TRUE(matrices_near(gamma_t(rho, cg, SwapModel{1.0}, uniform(rng, 0, 10)).matrix(), rho.matrix(), 1e-12));
  }
}

TEST(GammaT, SwapPreferentialMatchesKappa) {
  const CoarseGraining cg = make_distribution(Preferential{0.7}, 2);
  const DensityMatrix rho = density_from_bloch(BlochVector(Real3(0.3, -0.2, 0.5)));
  const SwapParameters sp = swap_parameters(rho, cg, 1.0);
  const DensityMatrix out = gamma_t(rho, cg, SwapModel{1.0}, kPi / 2);
  EXPECT_LT(trace_distance(out, swap_effective(rho, sp, kPi / 2)), 1e-10);
  EXPECT_LT(kappa_swap(sp, kPi / 2), 1.0);
}

TEST(GammaT, ModelSizeMismatch) {
  EXPECT_THROW(EffectiveDynamics(CoarseGraining({0.2, 0.3, 0.5}), SwapModel{1.0}), ValidationError);
  EXPECT_THROW(gamma_t(DensityMatrix::maximally_mixed(2), CoarseGraining({0.5, 0.5}), SwapModel{1.0}, 1.0, Route::Factorized),
               ValidationError);
}

TEST(GammaT, PropagatesAssignmentErrors) {
  Vector up(2);
  up << 1, 0;
  EXPECT_THROW(gamma_t(DensityMatrix::pure(up), CoarseGraining({1.0, 0.0}), SwapModel{1.0}, 1.0), ValidationError);
}

TEST(GammaT, TracePreservingAndPositiveOnRandomTuples) {
  Rng rng(43);
  for (int i = 0; i < 1000; ++i) {
    const int kind = i % 6;
    const int n = kind >= 3 ? 2 + (i / 6) % 4 : 2;
    const CoarseGraining cg(random_probabilities(n, rng));
    const DensityMatrix rho = random_qubit(rng, 0.999);
    const double t = uniform(rng, 0, 10);
    HamiltonianSpec spec = SwapModel{uniform(rng, 0.1, 2)};
    switch (kind) {
      case 1: spec = CnotModel{uniform(rng, 0.1, 2)}; break;
      case 2: spec = LocalZSecond{uniform(rng, 0.1, 2)}; break;
      case 3: spec = sample_field(n, 1.5, 0.2, rng(), i % 2 == 0); break;
      case 4: spec = IsingChain{n, 1.0, 0.0, Boundary::Closed}; break;
      case 5: spec = IsingChain{n, 1.0, 0.5, Boundary::Open}; break;
      default: break;
    }
    const DensityMatrix out = gamma_t(rho, cg, spec, t);
    EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_GE(out.min_eigenvalue(), -1e-10);
  }
}

TEST(Trajectory, SwapNonPreferentialConstant) {
  const DensityMatrix rho = density_from_bloch(BlochVector(Real3(0.2, 0.4, -0.3)));
  const auto grid = time_grid(2 * kPi, 40);
  const Trajectory tr = trajectory(rho, make_distribution(NonPreferential{}, 2), SwapModel{1.0}, grid);
  ASSERT_EQ(tr.size(), 41u);
  for (const auto& b : tr.bloch) EXPECT_TRUE(vectors_near(b.vec(), Real3(0.2, 0.4, -0.3), 1e-12));
  EXPECT_EQ(tr.model, "swap");
  EXPECT_EQ(tr.route, Route::Dense);
}

TEST(Trajectory, FieldConservesZ) {
  const DensityMatrix rho = density_from_bloch(BlochVector(Real3(0.5, 0.1, 0.4)));
  const HamiltonianSpec spec = sample_field(6, 1.5, 0.2, 3, false);
  const Trajectory tr = trajectory(rho, make_distribution(NonPreferential{}, 6), spec, time_grid(20, 50));
  for (const auto& b : tr.bloch) EXPECT_NEAR(b.z(), 0.4, 1e-12);
  EXPECT_EQ(tr.seed, std::optional<std::uint64_t>(3));
}

TEST(Trajectory, LocalZSecondTracesCircle) {
  const Real3 r(0.6, -0.3, 0.2);
  const DensityMatrix rho = density_from_bloch(BlochVector(r));
  const Trajectory tr = trajectory(rho, make_distribution(NonPreferential{}, 2), LocalZSecond{1.3}, time_grid(10, 60));
  const CircleParams circle = circle_params(r);
  for (const auto& b : tr.bloch) {
    EXPECT_NEAR(b.z(), r.z(), 1e-12);
    EXPECT_NEAR((b.vec() - circle.center).head<2>().norm(), circle.radius, 1e-12);
  }
}

TEST(Trajectory, GridValidation) {
  const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  const EffectiveDynamics dyn(CoarseGraining({0.5, 0.5}), SwapModel{1.0});
  const std::vector<double> bad{0.0, 1.0, 1.0};
  EXPECT_THROW(dyn.trajectory(rho, bad), ValidationError);
  EXPECT_THROW(dyn.trajectory(rho, std::vector<double>{}), ValidationError);
  EXPECT_THROW(time_grid(1.0, 0), ValidationError);
  EXPECT_EQ(time_grid(2.0, 4), (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
}

TEST(FastPath, FieldMatchesDense) {
  Rng rng(44);
  for (const bool interaction : {false, true})
    for (int n = 2; n <= 6; ++n) {
      const HamiltonianSpec spec = sample_field(n, 1.5, 0.4, rng(), interaction);
      const auto factors = random_factors(n, rng);
      const double t = uniform(rng, 0, 8);
      const auto fast = evolve_product_fast(factors, spec, t);
      const auto dense = dense_marginals(factors, spec, t);
      for (int k = 0; k < n; ++k) EXPECT_TRUE(matrices_near(fast[static_cast<std::size_t>(k)].matrix(), dense[static_cast<std::size_t>(k)], 1e-10));
    }
}

TEST(FastPath, IsingWithoutFieldMatchesDenseIncludingTwoSiteRing) {
  Rng rng(45);
  for (const Boundary b : {Boundary::Closed, Boundary::Open})
    for (int n = 2; n <= 6; ++n) {
      const HamiltonianSpec spec = IsingChain{n, uniform(rng, 0.5, 1.5), 0.0, b};
      const auto factors = random_factors(n, rng);
      const double t = uniform(rng, 0, 3);
      const auto fast = evolve_product_fast(factors, spec, t);
      const auto dense = dense_marginals(factors, spec, t);
      for (int k = 0; k < n; ++k) EXPECT_TRUE(matrices_near(fast[static_cast<std::size_t>(k)].matrix(), dense[static_cast<std::size_t>(k)], 1e-10)) << n;
    }
}

TEST(FastPath, TwoSiteClosedRingDoublesTheBond) {
  // H = -2J z1 z2: the coherence factor of a spin is cos(4Jt) + i zbar sin(4Jt).
  const double J = 1.0, t = 0.3, theta = kPi / 3;
  const Real3 r(std::sin(theta), 0, std::cos(theta));
  const std::vector<DensityMatrix> f(2, density_from_bloch(BlochVector(r)));
  const auto out = evolve_product_fast(f, IsingChain{2, J, 0.0, Boundary::Closed}, t);
  const Complex factor = out[0].matrix()(0, 1) / f[0].matrix()(0, 1);
  EXPECT_NEAR(std::abs(factor - Complex(std::cos(4 * J * t), std::cos(theta) * std::sin(4 * J * t))), 0.0, 1e-14);
}

TEST(FastPath, LocalZSecondMatchesDense) {
  Rng rng(46);
  const auto factors = random_factors(2, rng);
  const auto fast = evolve_product_fast(factors, LocalZSecond{0.8}, 2.1);
  const auto dense = dense_marginals(factors, LocalZSecond{0.8}, 2.1);
  for (int k = 0; k < 2; ++k) EXPECT_TRUE(matrices_near(fast[static_cast<std::size_t>(k)].matrix(), dense[static_cast<std::size_t>(k)], 1e-12));
}

TEST(FastPath, UnsupportedModels) {
  const std::vector<DensityMatrix> f(2, DensityMatrix::maximally_mixed(2));
  EXPECT_THROW(evolve_product_fast(f, SwapModel{1.0}, 1.0), ValidationError);
  EXPECT_THROW(evolve_product_fast(f, IsingChain{2, 1.0, 0.1, Boundary::Open}, 1.0), ValidationError);
}

TEST(FastPath, LargeFieldMatchesPerFactorRotation) {
  const int n = 500;
  const HamiltonianSpec spec = sample_field(n, 1.5, 0.2, 99, false);
  const auto& omegas = spec.get<FieldAllToAll>()->omegas;
  const CoarseGraining cg = make_distribution(Preferential{0.5}, n);
  const DensityMatrix rho = density_from_bloch(BlochVector(Real3(0.7, 0.2, 0.3)));
  const AssignedState s = assign(rho, cg);
  const double t = 13.7;
  Real3 expect = Real3::Zero();
  for (int k = 1; k <= n; ++k) {
    const Real3 b = s.bloch(k);
    const double a = 2 * omegas[static_cast<std::size_t>(k - 1)] * t;
    expect += cg.p(k) * Real3(b.x() * std::cos(a) - b.y() * std::sin(a), b.x() * std::sin(a) + b.y() * std::cos(a), b.z());
  }
  EXPECT_TRUE(vectors_near(bloch_from_density(gamma_t(rho, cg, spec, t)).vec(), expect, 1e-12));
}

TEST(StateVector, MatchesDenseForTransverseField) {
  Rng rng(47);
  const CoarseGraining cg(random_probabilities(4, rng));
  const DensityMatrix phi = random_pure_state(2, rng);
  const HamiltonianSpec spec = IsingChain{4, 1.0, 0.5, Boundary::Closed};
  for (const double t : {0.3, 0.9, 2.5})
    EXPECT_TRUE(matrices_near(gamma_t(phi, cg, spec, t, Route::StateVector).matrix(), gamma_t(phi, cg, spec, t, Route::Dense).matrix(),
                              1e-10));
  const AssignedState s = assign(phi, cg);
  EXPECT_EQ(EffectiveDynamics(cg, spec).resolve(s), Route::StateVector);
}

TEST(StateVector, ChebyshevMatchesEigendecomposition) {
  Rng rng(48);
  for (const Boundary b : {Boundary::Closed, Boundary::Open}) {
    const IsingChain chain{6, 0.8, 0.6, b};
    const Vector psi = random_state_vector(64, rng);
    const HermitianPropagator prop(build_hamiltonian(chain));
    for (const double t : {0.0, 0.4, 3.0, -1.2}) {
      const Vector a = detail::ising_chebyshev_evolve(chain, psi, t);
      const Vector e = prop.evolve_state(psi, t);
      EXPECT_LT((a - e).cwiseAbs().maxCoeff(), 1e-11) << t;
    }
  }
}

TEST(StateVector, LargeChainRunsMatrixFree) {
  const CoarseGraining cg = make_distribution(NonPreferential{}, 14);
  const DensityMatrix phi = density_from_bloch(BlochVector(Real3(1, 0, 0)));
  const DensityMatrix out = gamma_t(phi, cg, IsingChain{14, 1.0, 0.5, Boundary::Closed}, 0.5);
  EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_GE(out.min_eigenvalue(), -1e-10);
}

TEST(StateVector, MixedTransverseFieldLimits) {
  const DensityMatrix rho = density_from_bloch(BlochVector(Real3(0.3, 0, 0)));
  EXPECT_THROW(gamma_t(rho, make_distribution(NonPreferential{}, 9), IsingChain{9, 1.0, 0.5, Boundary::Closed}, 0.1),
               ValidationError);
  EXPECT_THROW(gamma_t(rho, make_distribution(NonPreferential{}, 3), IsingChain{3, 1.0, 0.5, Boundary::Closed}, 0.1,
                       Route::StateVector),
               ValidationError);
}

TEST(Ising, IndependentOfDistributionForPureInputs) {
  Rng rng(49);
  const DensityMatrix phi = random_pure_state(2, rng);
  const HamiltonianSpec spec = IsingChain{4, 1.0, 0.5, Boundary::Closed};
  for (int i = 0; i < 5; ++i) {
    const CoarseGraining a(random_probabilities(4, rng)), b(random_probabilities(4, rng));
    const double t = uniform(rng, 0, 2);
    EXPECT_TRUE(matrices_near(gamma_t(phi, a, spec, t).matrix(), gamma_t(phi, b, spec, t).matrix(), 1e-10));
  }
}

TEST(Ising, IndependentOfSizeWithoutField) {
  const DensityMatrix phi = density_from_bloch(BlochVector(Real3(std::sin(1.0), 0, std::cos(1.0))));
  for (const double t : {0.2, 0.7, 1.9}) {
    const Matrix ref = gamma_t(phi, make_distribution(NonPreferential{}, 3), IsingChain{3, 1.0, 0.0, Boundary::Closed}, t).matrix();
    for (int n = 4; n <= 6; ++n)
      EXPECT_TRUE(matrices_near(gamma_t(phi, make_distribution(NonPreferential{}, n), IsingChain{n, 1.0, 0.0, Boundary::Closed}, t).matrix(),
                                ref, 1e-10));
  }
}

TEST(Routes, DenseAndFactorizedAgree) {
  Rng rng(50);
  for (int i = 0; i < 30; ++i) {
    const int n = 2 + i % 5;
    const CoarseGraining cg(random_probabilities(n, rng));
    const DensityMatrix rho = random_qubit(rng, 0.98);
    HamiltonianSpec spec = sample_field(n, 1.5, 0.3, rng(), i % 2 == 1);
    if (i % 3 == 0) spec = IsingChain{n, 1.0, 0.0, i % 2 ? Boundary::Open : Boundary::Closed};
    const double t = uniform(rng, 0, 5);
    EXPECT_TRUE(matrices_near(gamma_t(rho, cg, spec, t, Route::Dense).matrix(), gamma_t(rho, cg, spec, t, Route::Factorized).matrix(),
                              1e-10))
        << spec.name() << " n=" << n;
  }
}
