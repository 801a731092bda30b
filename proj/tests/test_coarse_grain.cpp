#include "support.hpp"

using namespace cgdyn;
using namespace cgdyn::testing;

TEST(Distribution, NonPreferentialIsUniform) {
  const CoarseGraining cg = make_distribution(NonPreferential{}, 4);
  for (int k = 1; k <= 4; ++k) EXPECT_DOUBLE_EQ(cg.p(k), 0.25);
}

TEST(Distribution, PreferentialSpreadsRemainderUniformly) {
  const CoarseGraining cg = make_distribution(Preferential{0.5}, 10);
  EXPECT_DOUBLE_EQ(cg.p(1), 0.5);
  for (int k = 2; k <= 10; ++k) EXPECT_NEAR(cg.p(k), 0.5 / 9, 1e-16);
  const CoarseGraining one = make_distribution(Preferential{1.0}, 3);
  EXPECT_EQ(one.probs(), (std::vector<double>{1, 0, 0}));
  EXPECT_FALSE(one.strictly_positive());
}

TEST(Distribution, Errors) {
  EXPECT_THROW(make_distribution(Preferential{0.0}, 3), ValidationError);
  EXPECT_THROW(make_distribution(Preferential{1.2}, 3), ValidationError);
  EXPECT_THROW(make_distribution(NonPreferential{}, 1), ValidationError);
  EXPECT_THROW(make_distribution(CustomDistribution{{0.5, 0.6}}, 2), ValidationError);
  EXPECT_THROW(make_distribution(CustomDistribution{{1.5, -0.5}}, 2), ValidationError);
  EXPECT_THROW(make_distribution(CustomDistribution{{0.5, 0.5}}, 3), ValidationError);
  EXPECT_NO_THROW(make_distribution(CustomDistribution{{0.0, 1.0}}, 2));
}

TEST(SwapPermutation, TwoQubitSwap) {
  const Matrix p = swap_permutation(2, 2);
  EXPECT_TRUE(matrices_near(p * basis_state(0b01, 2), basis_state(0b10, 2), 0.0));
  EXPECT_TRUE(matrices_near(swap_permutation(3, 1), Matrix::Identity(8, 8), 0.0));
}

TEST(SwapPermutation, InvolutionAndHermitian) {
  Rng rng(2);
  for (int n = 2; n <= 6; ++n) {
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const Matrix p = swap_permutation(n, k);
    const Eigen::Index dim = p.rows();
    EXPECT_TRUE(matrices_near(p * p, Matrix::Identity(dim, dim), 0.0));
    EXPECT_TRUE(matrices_near(p, p.adjoint(), 0.0));
  }
  EXPECT_THROW(swap_permutation(3, 4), ValidationError);
}

TEST(SwapPermutation, ExchangesFirstAndThirdFactors) {
  Rng rng(4);
  const Matrix a = random_mixed_state(2, rng).matrix(), b = random_mixed_state(2, rng).matrix(),
               c = random_mixed_state(2, rng).matrix();
  const Matrix p = swap_permutation(3, 3);
  EXPECT_TRUE(matrices_near(p * kron({a, b, c}) * p.adjoint(), kron({c, b, a}), 1e-15));
}

TEST(ApplyCg, TwoQubitProductIsConvexCombination) {
  Rng rng(6);
  const DensityMatrix a = random_mixed_state(2, rng), b = random_mixed_state(2, rng);
  const CoarseGraining cg({0.3, 0.7});
  EXPECT_TRUE(matrices_near(apply_cg(kron(a.matrix(), b.matrix()), cg), 0.3 * a.matrix() + 0.7 * b.matrix(), 1e-15));
}

TEST(ApplyCg, MatchesPermutationDefinition) {
  Rng rng(7);
  for (int n = 2; n <= 4; ++n) {
    const CoarseGraining cg(random_probabilities(n, rng));
    const Matrix rho = random_mixed_state(Eigen::Index{1} << n, rng).matrix();
    Matrix mix = Matrix::Zero(rho.rows(), rho.cols());
    for (int k = 1; k <= n; ++k) {
      const Matrix p = swap_permutation(n, k);
      mix += cg.p(k) * p * rho * p.adjoint();
    }
    EXPECT_TRUE(matrices_near(apply_cg(rho, cg), partial_trace(mix, {1}, n), 1e-14));
  }
}

TEST(ApplyCg, NonPreferentialAveragesMarginals) {
  Rng rng(8);
  const Matrix rho = random_mixed_state(8, rng).matrix();
  Matrix avg = Matrix::Zero(2, 2);
  for (int k = 1; k <= 3; ++k) avg += partial_trace(rho, {k}, 3) / 3.0;
  EXPECT_TRUE(matrices_near(apply_cg(rho, make_distribution(NonPreferential{}, 3)), avg, 1e-15));
}

TEST(ApplyCg, SymmetricProductIsFixed) {
  Rng rng(9);
  const Matrix phi = random_pure_state(2, rng).matrix();
  const CoarseGraining cg(random_probabilities(4, rng));
  EXPECT_TRUE(matrices_near(apply_cg(kron({phi, phi, phi, phi}), cg), phi, 1e-14));
}

TEST(ApplyCg, DimensionMismatch) {
  EXPECT_THROW(apply_cg(Matrix::Identity(8, 8) / 8.0, CoarseGraining({0.5, 0.5})), ValidationError);
}

TEST(ApplyCg, PositiveAndTracePreservingOnRandomInputs) {
  Rng rng(10);
  for (int i = 0; i < 500; ++i) {
    const int n = 2 + i % 3;
    const CoarseGraining cg(random_probabilities(n, rng));
    const Matrix out = apply_cg(random_mixed_state(Eigen::Index{1} << n, rng).matrix(), cg);
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(out).eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(ApplyCg, CompletelyPositiveOnExtendedInputs) {
  // (C (x) id) on states of n system qubits plus one ancilla qubit.
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const int n = 2 + i % 2;
    const CoarseGraining cg(random_probabilities(n, rng));
    const Eigen::Index dsys = Eigen::Index{1} << n;
    const Matrix joint = random_mixed_state(dsys * 2, rng).matrix();
    Matrix out = Matrix::Zero(4, 4);
    for (Eigen::Index a = 0; a < 2; ++a)
      for (Eigen::Index b = 0; b < 2; ++b) {
        Matrix block(dsys, dsys);
        for (Eigen::Index r = 0; r < dsys; ++r)
          for (Eigen::Index c = 0; c < dsys; ++c) block(r, c) = joint(r * 2 + a, c * 2 + b);
        const Matrix reduced = apply_cg(block, cg);
        for (Eigen::Index r = 0; r < 2; ++r)
          for (Eigen::Index c = 0; c < 2; ++c) out(r * 2 + a, c * 2 + b) = reduced(r, c);
      }
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(out).eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(ApplyCg, NonPreferentialPermutationInvariance) {
  Rng rng(13);
  const CoarseGraining cg = make_distribution(NonPreferential{}, 4);
  for (int k = 1; k <= 4; ++k) {
    const Matrix rho = random_mixed_state(16, rng).matrix();
    const Matrix p = swap_permutation(4, k);
    EXPECT_TRUE(matrices_near(apply_cg(Matrix(p * rho * p.adjoint()), cg), apply_cg(rho, cg), 1e-14));
  }
}

TEST(FuzzyOperator, TwoQubitUniformZ) {
  const Matrix z = pauli(Pauli::Z), id = Matrix::Identity(2, 2);
  const Matrix expected = (kron(z, id) + kron(id, z)) / 2.0;
  EXPECT_TRUE(matrices_near(fuzzy_operator(Pauli::Z, CoarseGraining({0.5, 0.5})), expected, 0.0));
  EXPECT_THROW(fuzzy_operator(Pauli::I, CoarseGraining({0.5, 0.5})), ValidationError);
}

TEST(FuzzyOperator, AllUpExpectation) {
  const Matrix all_up = DensityMatrix::pure(basis_state(0, 3)).matrix();
  EXPECT_NEAR((fuzzy_operator(Pauli::Z, make_distribution(NonPreferential{}, 3)) * all_up).trace().real(), 1.0, 1e-15);
}

TEST(FuzzyOperator, TraceIdentityOnRandomStates) {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + i % 3;
    const CoarseGraining cg(random_probabilities(n, rng));
    const DensityMatrix rho = random_mixed_state(Eigen::Index{1} << n, rng);
    EXPECT_LT(fuzzy_identity_check(rho, cg), 1e-12);
  }
}
