#pragma once

// Model Hamiltonians (hbar = 1) and their dense matrices on n qubits.

#include "cgdyn/qcore.hpp"
#include "cgdyn/random.hpp"

#include <numbers>
#include <optional>
#include <utility>
#include <variant>

namespace cgdyn {

inline constexpr int kMaxDenseQubits = 12;

/// (omega/2) sum_alpha sigma^alpha (x) sigma^alpha; SWAP at t = pi/(2 omega).
struct SwapModel {
  double omega = 1.0;
};

/// -(omega/2)(sigma^z (x) I + I (x) sigma^x - sigma^z (x) sigma^x); CNOT
/// (control 1, target 2) at t = pi/(2 omega).
struct CnotModel {
  double omega = 1.0;
};

/// (omega/2) sigma^z (x) sigma^x, the interaction part of CnotModel.
struct ZXInteraction {
  double omega = 1.0;
};

/// sum_k omega_k sigma^z_k (+ (sigma^z)^{(x)n} when include_interaction).
struct FieldAllToAll {
  std::vector<double> omegas;
  bool include_interaction = false;
  /// Nominal spread of the sampled frequencies, when known.
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;

  /// t_c = 2 pi / sigma: past it the local phases have decohered.
  double decoherence_time() const {
    double s = 0.0;
    if (sigma) {
      s = *sigma;
    } else {
      double mean = 0.0;
      for (const double w : omegas) mean += w;
      mean /= static_cast<double>(omegas.size());
      for (const double w : omegas) s += (w - mean) * (w - mean);
      s = std::sqrt(s / static_cast<double>(omegas.size()));
    }
    if (!(s > 0.0)) throw ValidationError("decoherence time undefined for zero frequency spread");
    return 2.0 * std::numbers::pi / s;
  }
};

enum class Boundary { Closed, Open };

inline const char* to_string(Boundary b) { return b == Boundary::Closed ? "closed" : "open"; }

/// -J sum_j sigma^z_j sigma^z_{j+1} - g sum_j sigma^x_j.
struct IsingChain {
  int n = 4;
  double J = 1.0;
  double g = 0.0;
  Boundary boundary = Boundary::Closed;

  /// Bond list (1-based pairs). A closed ring of two spins counts the bond
  /// twice, as the periodic sum does.
  std::vector<std::pair<int, int>> bonds() const {
    std::vector<std::pair<int, int>> b;
    for (int j = 1; j < n; ++j) b.emplace_back(j, j + 1);
    if (boundary == Boundary::Closed) b.emplace_back(n, 1);
    return b;
  }
};

/// (omega/2)(I (x) sigma^z): only the second qubit precesses.
struct LocalZSecond {
  double omega = 1.0;
};

class HamiltonianSpec {
 public:
  using Model = std::variant<SwapModel, CnotModel, ZXInteraction, FieldAllToAll, IsingChain, LocalZSecond>;

  HamiltonianSpec(Model m) : model_(std::move(m)) { validate(); }  // NOLINT(google-explicit-constructor)
  template <class M>
    requires std::is_constructible_v<Model, M> && (!std::is_same_v<std::decay_t<M>, Model>)
  HamiltonianSpec(M m) : HamiltonianSpec(Model(std::move(m))) {}  // NOLINT(google-explicit-constructor)

  const Model& model() const { return model_; }

  int n() const {
    return std::visit(
        [](const auto& m) -> int {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, FieldAllToAll>) return static_cast<int>(m.omegas.size());
          else if constexpr (std::is_same_v<M, IsingChain>) return m.n;
          else return 2;
        },
        model_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& m) -> std::string {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, SwapModel>) return "swap";
          else if constexpr (std::is_same_v<M, CnotModel>) return "cnot";
          else if constexpr (std::is_same_v<M, ZXInteraction>) return "zx-interaction";
          else if constexpr (std::is_same_v<M, FieldAllToAll>) return "field-all-to-all";
          else if constexpr (std::is_same_v<M, IsingChain>) return "ising-chain";
          else return "local-z-second";
        },
        model_);
  }

  template <class M>
  const M* get() const {
    return std::get_if<M>(&model_);
  }

 private:
  void validate() const {
    auto finite = [](double v, const char* what) {
      if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
    };
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, FieldAllToAll>) {
            if (m.omegas.size() < 2) throw ValidationError("field model needs at least 2 frequencies");
            for (const double w : m.omegas) finite(w, "field frequency");
          } else if constexpr (std::is_same_v<M, IsingChain>) {
            if (m.n < 2) throw ValidationError("Ising chain needs N >= 2");
            finite(m.J, "J");
            finite(m.g, "g");
          } else {
            finite(m.omega, "omega");
          }
        },
        model_);
  }

  Model model_;
};

/// omega_k ~ normal(mu, sigma), reproducible from the seed.
inline FieldAllToAll sample_field(int n, double mu, double sigma, std::uint64_t seed, bool include_interaction) {
  if (n < 2) throw ValidationError("field model needs n >= 2");
  if (!(sigma > 0.0)) throw ValidationError("frequency spread sigma must be positive");
  Rng rng(seed);
  std::normal_distribution<double> dist(mu, sigma);
  FieldAllToAll f;
  f.omegas.resize(static_cast<std::size_t>(n));
  for (auto& w : f.omegas) w = dist(rng);
  f.include_interaction = include_interaction;
  f.sigma = sigma;
  f.seed = seed;
  return f;
}

namespace detail {

inline double z_sign(Eigen::Index index, int qubit, int n) { return (index >> (n - qubit)) & 1 ? -1.0 : 1.0; }

/// Diagonal of the Ising ZZ part.
inline Eigen::VectorXd ising_diagonal(const IsingChain& c) {
  const Eigen::Index dim = Eigen::Index{1} << c.n;
  const auto bonds = c.bonds();
  Eigen::VectorXd d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    double e = 0.0;
    for (const auto& [a, b] : bonds) e -= c.J * z_sign(i, a, c.n) * z_sign(i, b, c.n);
    d[i] = e;
  }
  return d;
}

}  // namespace detail

inline Matrix build_hamiltonian(const HamiltonianSpec& spec) {
  const int n = spec.n();
  if (n > kMaxDenseQubits)
    throw ValidationError("dense Hamiltonian limited to " + std::to_string(kMaxDenseQubits) + " qubits");
  const Matrix x = pauli(Pauli::X), y = pauli(Pauli::Y), z = pauli(Pauli::Z), id = Matrix::Identity(2, 2);
  const Eigen::Index dim = Eigen::Index{1} << n;

  return std::visit(
      [&](const auto& m) -> Matrix {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SwapModel>) {
          return 0.5 * m.omega * (kron(x, x) + kron(y, y) + kron(z, z));
        } else if constexpr (std::is_same_v<M, CnotModel>) {
          return -0.5 * m.omega * (kron(z, id) + kron(id, x) - kron(z, x));
        } else if constexpr (std::is_same_v<M, ZXInteraction>) {
          return 0.5 * m.omega * kron(z, x);
        } else if constexpr (std::is_same_v<M, LocalZSecond>) {
          return 0.5 * m.omega * kron(id, z);
        } else if constexpr (std::is_same_v<M, FieldAllToAll>) {
          Matrix h = Matrix::Zero(dim, dim);
          for (Eigen::Index i = 0; i < dim; ++i) {
            double e = 0.0;
            double parity = 1.0;
            for (int k = 1; k <= n; ++k) {
              const double s = detail::z_sign(i, k, n);
              e += m.omegas[static_cast<std::size_t>(k - 1)] * s;
              parity *= s;
            }
            h(i, i) = e + (m.include_interaction ? parity : 0.0);
          }
          return h;
        } else {
          Matrix h = Matrix::Zero(dim, dim);
          h.diagonal() = detail::ising_diagonal(m).template cast<Complex>();
          if (m.g != 0.0)
            for (Eigen::Index i = 0; i < dim; ++i)
              for (int k = 1; k <= n; ++k) h(i ^ (Eigen::Index{1} << (n - k)), i) -= m.g;
          return h;
        }
      },
      spec.model());
}

}  // namespace cgdyn
