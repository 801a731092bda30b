#pragma once

// Fuzzy-measurement coarse graining: a device that means to read qubit 1 but
// reads qubit k with probability p_k. The effective one-qubit state is the
// p-weighted mixture of all single-qubit marginals.

#include "cgdyn/qcore.hpp"

#include <numeric>
#include <string>
#include <variant>
#include <vector>

namespace cgdyn {

class CoarseGraining {
 public:
  explicit CoarseGraining(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw ValidationError("coarse graining needs at least 2 particles");
    double s = 0.0;
    for (const double p : probs_) {
      if (!(p >= 0.0)) throw ValidationError("coarse-graining probabilities must be nonnegative");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw ValidationError("coarse-graining probabilities sum to " + std::to_string(s));
  }

  int n() const { return static_cast<int>(probs_.size()); }
  double p(int k) const { return probs_.at(static_cast<std::size_t>(k - 1)); }  // 1-based
  const std::vector<double>& probs() const { return probs_; }
  bool strictly_positive() const {
    return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; });
  }

 private:
  std::vector<double> probs_;
};

struct NonPreferential {};
struct Preferential {
  double p1;
};
struct CustomDistribution {
  std::vector<double> probs;
};
using DistributionKind = std::variant<NonPreferential, Preferential, CustomDistribution>;

inline CoarseGraining make_distribution(const DistributionKind& kind, int n) {
  if (n < 2) throw ValidationError("distribution needs n >= 2");
  const auto un = static_cast<std::size_t>(n);
  return std::visit(
      [&](const auto& k) -> CoarseGraining {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NonPreferential>) {
          return CoarseGraining(std::vector<double>(un, 1.0 / n));
        } else if constexpr (std::is_same_v<K, Preferential>) {
          if (!(k.p1 > 0.0 && k.p1 <= 1.0)) throw ValidationError("preferential p1 must lie in (0, 1]");
          std::vector<double> p(un, (1.0 - k.p1) / (n - 1));
          p[0] = k.p1;
          return CoarseGraining(std::move(p));
        } else {
          if (k.probs.size() != un) throw ValidationError("custom distribution length does not match n");
          return CoarseGraining(k.probs);
        }
      },
      kind);
}

/// Permutation matrix exchanging tensor slots 1 and k; identity for k = 1.
inline Matrix swap_permutation(int n, int k) {
  if (n < 1 || k < 1 || k > n) throw ValidationError("swap_permutation: index out of range");
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Eigen::Index b1 = Eigen::Index{1} << (n - 1);
  const Eigen::Index bk = Eigen::Index{1} << (n - k);
  Matrix p = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const bool s1 = i & b1;
    const bool sk = i & bk;
    Eigen::Index j = i;
    if (s1 != sk) j ^= (b1 | bk);
    p(j, i) = 1.0;
  }
  return p;
}

/// C(rho) = sum_k p_k Tr_{not k}(rho): the operator form, also valid for
/// non-state inputs such as commutators.
inline Matrix apply_cg(const Matrix& rho, const CoarseGraining& cg) {
  const int n = cg.n();
  if (rho.rows() != (Eigen::Index{1} << n)) throw ValidationError("apply_cg: state dimension does not match coarse graining");
  Matrix out = Matrix::Zero(2, 2);
  for (int k = 1; k <= n; ++k)
    if (cg.p(k) != 0.0) out += cg.p(k) * marginal(rho, k, n);
  return out;
}

inline DensityMatrix apply_cg(const DensityMatrix& rho, const CoarseGraining& cg) {
  return DensityMatrix::unchecked(apply_cg(rho.matrix(), cg));
}

/// G^alpha = sum_k p_k sigma^alpha_k.
inline Matrix fuzzy_operator(Pauli axis, const CoarseGraining& cg) {
  if (axis == Pauli::I) throw ValidationError("fuzzy_operator: identity is not a tomographic constraint");
  const int n = cg.n();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix g = Matrix::Zero(dim, dim);
  const Matrix s = pauli(axis);
  for (int k = 1; k <= n; ++k)
    if (cg.p(k) != 0.0) g += cg.p(k) * embed(s, k, n);
  return g;
}

}  // namespace cgdyn
