#pragma once

// Model-independent probes of an effective map: linearity, the semigroup
// property, Bloch-norm decay rates, and the identities that make the
// coarse-graining framework consistent. All distances are trace norms and
// every randomized probe is reproducible from its root seed.

#include "cgdyn/coarse_grain.hpp"
#include "cgdyn/maxent.hpp"
#include "cgdyn/parallel.hpp"
#include "cgdyn/random.hpp"

#include <functional>
#include <optional>
#include <limits>

namespace cgdyn {

/// rho_eff, t -> Gamma_t(rho_eff).
using EffectiveMap = std::function<DensityMatrix(const DensityMatrix&, double)>;
/// Linear map on n-qubit operators.
using MicroChannel = std::function<Matrix(const Matrix&)>;

// ---------------------------------------------------------------------------
// Linearity

struct LinearityWitness {
  DensityMatrix rho_a;
  DensityMatrix rho_b;
  double weight = 0.0;
  double t = 0.0;
  double violation = 0.0;
  std::size_t sample = 0;
};

struct LinearityReport {
  double max_violation = 0.0;
  std::optional<LinearityWitness> witness;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// || Gamma(a rho_a + (1-a) rho_b) - a Gamma(rho_a) - (1-a) Gamma(rho_b) ||_1.
inline double linearity_violation(const EffectiveMap& dyn, const DensityMatrix& a, const DensityMatrix& b, double w, double t) {
  const DensityMatrix mix = DensityMatrix::unchecked(w * a.matrix() + (1.0 - w) * b.matrix());
  return trace_norm(dyn(mix, t).matrix() - w * dyn(a, t).matrix() - (1.0 - w) * dyn(b, t).matrix());
}

inline double replay(const LinearityWitness& w, const EffectiveMap& dyn) {
  return linearity_violation(dyn, w.rho_a, w.rho_b, w.weight, w.t);
}

inline LinearityReport linearity_probe(const EffectiveMap& dyn, double t, int samples, std::uint64_t seed) {
  if (samples < 1) throw ValidationError("linearity_probe: samples must be >= 1");
  std::vector<LinearityWitness> results(static_cast<std::size_t>(samples),
                                        LinearityWitness{DensityMatrix(), DensityMatrix(), 0.0, t, 0.0, 0});
  parallel_for(results.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    LinearityWitness w{random_mixed_state(2, rng), random_mixed_state(2, rng), 0.0, t, 0.0, i};
    w.weight = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    w.violation = linearity_violation(dyn, w.rho_a, w.rho_b, w.weight, t);
    results[i] = std::move(w);
  });
  LinearityReport rep;
  rep.samples = samples;
  rep.seed = seed;
  for (auto& w : results)
    if (!rep.witness || w.violation > rep.max_violation) {
      rep.max_violation = w.violation;
      rep.witness = w;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Markovianity

struct Interval {
  double begin;
  double end;
};

struct MarkovReport {
  double semigroup_gap = 0.0;  ///< sup ||Gamma_{t+s}(rho) - Gamma_t(Gamma_s(rho))||_1
  double argmax_t = 0.0;
  double argmax_s = 0.0;
  std::size_t argmax_probe = 0;
  /// Where d ln|r(t)|/dt of the first probe is negative (contraction) or
  /// positive (re-expansion, a memory effect).
  std::vector<Interval> negative_rate_intervals;
  std::vector<Interval> positive_rate_intervals;
};

namespace detail {

inline std::vector<Interval> sign_intervals(const std::vector<double>& times, const std::vector<double>& rate, int sign) {
  std::vector<Interval> out;
  bool open = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const bool in = sign * rate[i] > 1e-12;
    if (in && !open) out.push_back({times[i], times[i]});
    if (in) out.back().end = times[i];
    open = in;
  }
  return out;
}

}  // namespace detail

inline MarkovReport semigroup_gap(const EffectiveMap& dyn, std::span<const double> t_grid, std::span<const double> s_grid,
                                  std::span<const DensityMatrix> probes) {
  if (t_grid.empty() || s_grid.empty() || probes.empty()) throw ValidationError("semigroup_gap: empty grid or probe set");
  MarkovReport rep;
  for (std::size_t p = 0; p < probes.size(); ++p)
    for (const double s : s_grid) {
      const DensityMatrix after_s = dyn(probes[p], s);
      for (const double t : t_grid) {
        const double gap = trace_distance(dyn(probes[p], t + s), dyn(after_s, t));
        if (gap > rep.semigroup_gap) {
          rep.semigroup_gap = gap;
          rep.argmax_t = t;
          rep.argmax_s = s;
          rep.argmax_probe = p;
        }
      }
    }

  // Bloch-norm log-derivative of the first probe along t_grid.
  const double r0 = bloch_from_density(probes[0]).norm();
  if (r0 > 0.0 && t_grid.size() >= 3) {
    std::vector<double> times(t_grid.begin(), t_grid.end()), lnk, rate(times.size());
    for (const double t : times) lnk.push_back(std::log(std::max(bloch_from_density(dyn(probes[0], t)).norm(), 1e-300) / r0));
    for (std::size_t i = 0; i < times.size(); ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == times.size() ? i : i + 1;
      rate[i] = (lnk[hi] - lnk[lo]) / (times[hi] - times[lo]);
    }
    rep.negative_rate_intervals = detail::sign_intervals(times, rate, -1);
    rep.positive_rate_intervals = detail::sign_intervals(times, rate, +1);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Channels acting equally on every marginal

/// Affine map on Bloch vectors, r -> linear r + offset.
struct AffineQubitMap {
  Eigen::Matrix3d linear = Eigen::Matrix3d::Identity();
  Real3 offset = Real3::Zero();

  Real3 apply(const Real3& r) const { return linear * r + offset; }
  Matrix apply(const Matrix& rho) const {
    const Real3 r(2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real());
    return bloch_matrix(apply(r)) * rho.trace().real();
  }
};

struct EqualActionReport {
  bool holds = false;
  double max_deviation = 0.0;  ///< worst of: slot maps differ, marginal action, C o E vs E1 o C
  AffineQubitMap induced;      ///< the single-qubit map E1 seen on slot 1
  int samples = 0;
};

namespace detail {

inline Real3 bloch_of(const Matrix& m) { return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()}; }

/// E1 on slot k, read off inputs I/2 (x) .. rho .. (x) I/2.
inline AffineQubitMap induced_map(const MicroChannel& ch, int k, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  auto slot_input = [&](const Matrix& rho) {
    // Place rho on slot k by permuting the tensor product.
    Matrix in = Matrix::Zero(dim, dim);
    const Eigen::Index bit = Eigen::Index{1} << (n - k);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) {
        if ((i & ~bit) != (j & ~bit)) continue;
        in(i, j) = rho((i & bit) ? 1 : 0, (j & bit) ? 1 : 0) / static_cast<double>(dim / 2);
      }
    return in;
  };
  AffineQubitMap m;
  m.offset = bloch_of(marginal(ch(slot_input(Matrix::Identity(2, 2) * 0.5)), k, n));
  for (int a = 0; a < 3; ++a) {
    const Matrix rho = bloch_matrix(Real3::Unit(a));
    m.linear.col(a) = bloch_of(marginal(ch(slot_input(rho)), k, n)) - m.offset;
  }
  return m;
}

}  // namespace detail

/// Does `ch` act on every one-qubit marginal through the same map E1? When it
/// does, C o E = E1 o C for every coarse graining and the effective dynamics
/// C o E o A is linear.
inline EqualActionReport equal_marginal_check(const MicroChannel& ch, int n, int samples, std::uint64_t seed,
                                              double tolerance = 1e-10) {
  if (n < 2) throw ValidationError("equal_marginal_check: needs n >= 2");
  EqualActionReport rep;
  rep.samples = samples;
  rep.induced = detail::induced_map(ch, 1, n);
  double dev = 0.0;
  for (int k = 2; k <= n; ++k) {
    const AffineQubitMap mk = detail::induced_map(ch, k, n);
    dev = std::max(dev, (mk.linear - rep.induced.linear).cwiseAbs().maxCoeff());
    dev = std::max(dev, (mk.offset - rep.induced.offset).cwiseAbs().maxCoeff());
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  for (int i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const Matrix rho = random_mixed_state(dim, rng).matrix();
    const Matrix out = ch(rho);
    for (int k = 1; k <= n; ++k) dev = std::max(dev, trace_norm(marginal(out, k, n) - rep.induced.apply(marginal(rho, k, n))));
    const CoarseGraining cg(random_probabilities(n, rng));
    dev = std::max(dev, trace_norm(apply_cg(out, cg) - rep.induced.apply(apply_cg(rho, cg))));
  }
  rep.max_deviation = dev;
  rep.holds = dev < tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Odd Dyson terms of the all-to-all interaction

struct DysonPoint {
  int n = 0;
  double norm = 0.0;            ///< ||C([(sigma^z)^{(x)n}, A(rho_eff)])||_1
  double z_product = 0.0;       ///< prod_j Tr(rho_j sigma^z)
};

/// C([Z^{(x)n}, (x)_j rho_j]) = sum_k p_k [Z, rho_k] prod_{j != k} Tr(rho_j Z).
inline Matrix dyson_commutator(const AssignedState& s, const CoarseGraining& cg) {
  const Matrix z = pauli(Pauli::Z);
  const int n = s.n();
  std::vector<double> zbar;
  for (const auto& f : s.factors) zbar.push_back((z * f.matrix()).trace().real());
  Matrix out = Matrix::Zero(2, 2);
  for (int k = 1; k <= n; ++k) {
    double rest = 1.0;
    for (int j = 1; j <= n; ++j)
      if (j != k) rest *= zbar[static_cast<std::size_t>(j - 1)];
    const Matrix& rk = s.factors[static_cast<std::size_t>(k - 1)].matrix();
    out += cg.p(k) * rest * (z * rk - rk * z);
  }
  return out;
}

/// Same quantity through the full 2^n operator; n <= kMaxDenseQubits.
inline Matrix dyson_commutator_dense(const DensityMatrix& rho_eff, const CoarseGraining& cg) {
  const int n = cg.n();
  if (n > 12) throw ValidationError("dyson_commutator_dense: n too large");
  const Matrix prod = assign(rho_eff, cg).product().matrix();
  const Eigen::Index dim = prod.rows();
  Eigen::VectorXd parity(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    int ones = 0;
    for (Eigen::Index b = i; b; b &= b - 1) ++ones;
    parity[i] = ones % 2 ? -1.0 : 1.0;
  }
  Matrix comm(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) comm(i, j) = (parity[i] - parity[j]) * prod(i, j);
  return apply_cg(comm, cg);
}

inline std::vector<DysonPoint> dyson_decay(std::span<const int> ns, const std::function<CoarseGraining(int)>& cg_for,
                                           const DensityMatrix& rho_eff) {
  std::vector<DysonPoint> out;
  for (const int n : ns) {
    const CoarseGraining cg = cg_for(n);
    if (cg.n() != n) throw ValidationError("dyson_decay: coarse graining size mismatch");
    const AssignedState s = assign(rho_eff, cg);
    DysonPoint pt;
    pt.n = n;
    pt.z_product = 1.0;
    for (const auto& f : s.factors) pt.z_product *= (pauli(Pauli::Z) * f.matrix()).trace().real();
    pt.norm = trace_norm(dyson_commutator(s, cg));
    out.push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------

/// max over alpha of |Tr[sigma^alpha C(rho)] - Tr[G^alpha rho]|.
inline double fuzzy_identity_check(const DensityMatrix& rho, const CoarseGraining& cg) {
  const Matrix eff = apply_cg(rho.matrix(), cg);
  double dev = 0.0;
  for (const Pauli a : kBlochAxes)
    dev = std::max(dev, std::abs((pauli(a) * eff).trace() - (fuzzy_operator(a, cg) * rho.matrix()).trace()));
  return dev;
}

}  // namespace cgdyn
