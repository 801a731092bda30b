#pragma once

// Experiment configuration and dataset generation behind the command-line
// tool. Output is a trajectory CSV plus a JSON metadata document; both are
// byte-identical for identical configurations.

#include "cgdyn/channels.hpp"
#include "cgdyn/diagnostics.hpp"
#include "cgdyn/evolve.hpp"
#include "cgdyn/version.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace cgdyn {

enum class Experiment { SwapKappa, Cnot, Field, Ising, LinearNm, Diagnostics };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::SwapKappa: return "swap-kappa";
    case Experiment::Cnot: return "cnot";
    case Experiment::Field: return "field";
    case Experiment::Ising: return "ising";
    case Experiment::LinearNm: return "linear-nm";
    case Experiment::Diagnostics: return "diagnostics";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  for (const Experiment e : {Experiment::SwapKappa, Experiment::Cnot, Experiment::Field, Experiment::Ising,
                             Experiment::LinearNm, Experiment::Diagnostics})
    if (s == to_string(e)) return e;
  throw ValidationError("unknown experiment '" + s + "'");
}

/// A time value, optionally in units of the decoherence time t_c ("4tc").
struct TimeSpec {
  double value = 0.0;
  bool in_tc = false;
};

inline TimeSpec parse_time_spec(std::string s) {
  TimeSpec ts;
  if (s.size() > 2 && s.compare(s.size() - 2, 2, "tc") == 0) {
    ts.in_tc = true;
    s.resize(s.size() - 2);
  }
  std::size_t used = 0;
  try {
    ts.value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(ts.value))
    throw ValidationError("cannot parse time '" + s + (ts.in_tc ? "tc" : "") + "'; expected a number or <number>tc");
  return ts;
}

inline Route parse_route(const std::string& s) {
  for (const Route r : {Route::Auto, Route::Dense, Route::Factorized, Route::StateVector})
    if (s == to_string(r)) return r;
  throw ValidationError("unknown route '" + s + "'; expected auto, dense, factorized or state-vector");
}

inline const Real3 kDefaultBloch{0.6, 0.0, 0.6};

struct ExperimentConfig {
  Experiment experiment = Experiment::SwapKappa;
  std::optional<int> n;
  /// auto | nonpreferential | preferential | custom
  std::string distribution = "auto";
  std::optional<double> p1;
  std::vector<double> probs;

  double omega = 1.0;
  double J = 1.0;
  double g = 0.0;
  double mu = 1.5;
  double sigma = 0.2;
  Boundary boundary = Boundary::Closed;
  bool interaction = false;
  /// Model probed by the diagnostics experiment: swap | cnot | linear-nm.
  std::string model = "swap";

  std::optional<TimeSpec> t_max;
  int steps = 200;
  std::optional<double> t;  ///< single sample time, overrides the grid

  /// Initial effective state: a Bloch vector, or pure angles (theta, phi).
  /// With neither, Ising runs start from theta = pi/2 and the rest from
  /// kDefaultBloch.
  std::optional<Real3> bloch;
  std::optional<double> theta;
  double phi = 0.0;

  std::uint64_t seed = 1;
  int samples = 100;  ///< diagnostics probe count
  Route route = Route::Auto;
};

namespace detail {

inline int default_n(Experiment e) {
  switch (e) {
    case Experiment::Field: return 10;
    case Experiment::Ising: return 4;
    default: return 2;
  }
}

inline bool two_qubit(const ExperimentConfig& c) {
  return c.experiment == Experiment::SwapKappa || c.experiment == Experiment::Cnot ||
         c.experiment == Experiment::LinearNm || c.experiment == Experiment::Diagnostics;
}

}  // namespace detail

/// Fills experiment-dependent defaults and enforces every downstream
/// precondition, so that a bad configuration fails before any work is done.
inline ExperimentConfig resolve(ExperimentConfig c) {
  if (!c.n) c.n = detail::default_n(c.experiment);
  if (detail::two_qubit(c) && *c.n != 2)
    throw ValidationError(std::string(to_string(c.experiment)) + " is a two-qubit model; got n = " + std::to_string(*c.n));
  if (*c.n < 2) throw ValidationError("n must be >= 2");

  if (c.distribution == "auto") {
    if (!c.probs.empty()) c.distribution = "custom";
    else if (c.p1) c.distribution = "preferential";
    else if (c.experiment == Experiment::Ising || c.experiment == Experiment::LinearNm) c.distribution = "nonpreferential";
    else c.distribution = "preferential";
  }
  if (c.distribution == "preferential") {
    if (!c.p1) c.p1 = c.experiment == Experiment::Field ? 0.5 : 0.7;
    if (!(*c.p1 > 0.0 && *c.p1 <= 1.0)) throw ValidationError("--p1 must lie in (0, 1]; got " + std::to_string(*c.p1));
  } else if (c.distribution == "custom") {
    if (c.probs.size() != static_cast<std::size_t>(*c.n))
      throw ValidationError("--probs needs exactly n = " + std::to_string(*c.n) + " entries");
  } else if (c.distribution != "nonpreferential") {
    throw ValidationError("unknown distribution '" + c.distribution + "'; expected nonpreferential, preferential or custom");
  }

  for (const auto& [v, what] : {std::pair{c.omega, "omega"}, {c.J, "J"}, {c.g, "g"}, {c.mu, "mu"}, {c.sigma, "sigma"}})
    if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
  if (c.experiment == Experiment::Field && !(c.sigma > 0.0)) throw ValidationError("--sigma must be positive");
  if (c.experiment == Experiment::Diagnostics && c.model != "swap" && c.model != "cnot" && c.model != "linear-nm")
    throw ValidationError("--model must be swap, cnot or linear-nm");
  if (c.experiment == Experiment::Diagnostics && c.samples < 1) throw ValidationError("--samples must be >= 1");

  if (!c.t_max) {
    switch (c.experiment) {
      case Experiment::Field: c.t_max = TimeSpec{4.0, true}; break;
      case Experiment::Ising: c.t_max = TimeSpec{2.0, false}; break;
      default: c.t_max = TimeSpec{2.0 * std::numbers::pi / std::abs(c.omega == 0.0 ? 1.0 : c.omega), false};
    }
  }
  if (c.t_max->in_tc && c.experiment != Experiment::Field) throw ValidationError("the tc time unit only applies to field experiments");
  if (!(c.t_max->value > 0.0)) throw ValidationError("--tmax must be positive");
  if (c.steps < 1) throw ValidationError("--steps must be >= 1");
  if (c.t && !(*c.t >= 0.0 && std::isfinite(*c.t))) throw ValidationError("--t must be a finite nonnegative time");

  if (c.bloch && c.theta) throw ValidationError("give either --bloch or --theta/--phi, not both");
  if (!c.bloch && !c.theta) {
    if (c.experiment == Experiment::Ising) c.theta = std::numbers::pi / 2;
    else c.bloch = kDefaultBloch;
  }
  if (c.bloch) {
    if (!c.bloch->allFinite() || c.bloch->norm() > 1.0 + tol::bloch_norm)
      throw ValidationError("initial Bloch vector must have norm <= 1");
  } else if (!std::isfinite(*c.theta) || !std::isfinite(c.phi)) {
    throw ValidationError("--theta and --phi must be finite");
  }
  return c;
}

inline CoarseGraining coarse_graining(const ExperimentConfig& c) {
  const int n = c.n.value();
  if (c.distribution == "nonpreferential") return make_distribution(NonPreferential{}, n);
  if (c.distribution == "preferential") return make_distribution(Preferential{c.p1.value()}, n);
  return make_distribution(CustomDistribution{c.probs}, n);
}

inline HamiltonianSpec hamiltonian(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::SwapKappa: return SwapModel{c.omega};
    case Experiment::Cnot: return CnotModel{c.omega};
    case Experiment::LinearNm: return LocalZSecond{c.omega};
    case Experiment::Field: return sample_field(c.n.value(), c.mu, c.sigma, c.seed, c.interaction);
    case Experiment::Ising: return IsingChain{c.n.value(), c.J, c.g, c.boundary};
    case Experiment::Diagnostics:
      if (c.model == "cnot") return CnotModel{c.omega};
      if (c.model == "linear-nm") return LocalZSecond{c.omega};
      return SwapModel{c.omega};
  }
  throw ValidationError("unknown experiment");
}

inline Real3 pure_bloch(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

inline DensityMatrix initial_state(const ExperimentConfig& c) {
  return density_from_bloch(BlochVector(c.bloch ? *c.bloch : pure_bloch(c.theta.value(), c.phi)));
}

inline double decoherence_time(const ExperimentConfig& c) { return 2.0 * std::numbers::pi / c.sigma; }

inline std::vector<double> sample_times(const ExperimentConfig& c) {
  if (c.t) return {*c.t};
  const double scale = c.t_max->in_tc ? decoherence_time(c) : 1.0;
  return time_grid(c.t_max->value * scale, c.steps);
}

// ---------------------------------------------------------------------------
// Output

/// 17 significant digits, enough to round-trip any double.
inline std::string format_number(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v == 0.0 ? 0.0 : v);
  return buf.data();
}

struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
      os << '\n';
    }
    return os.str();
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::vector<double> col;
      for (const auto& row : rows) col.push_back(row[c]);
      j[columns[c]] = col;
    }
    return j;
  }
};

struct RunOutput {
  Dataset data;
  nlohmann::ordered_json metadata;
};

inline nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(c.experiment);
  j["n"] = c.n.value();
  j["distribution"] = c.distribution;
  if (c.p1) j["p1"] = *c.p1;
  if (!c.probs.empty()) j["probs"] = c.probs;
  switch (c.experiment) {
    case Experiment::Field:
      j["mu"] = c.mu;
      j["sigma"] = c.sigma;
      j["interaction"] = c.interaction;
      break;
    case Experiment::Ising:
      j["J"] = c.J;
      j["g"] = c.g;
      j["boundary"] = to_string(c.boundary);
      break;
    case Experiment::Diagnostics:
      j["model"] = c.model;
      j["samples"] = c.samples;
      j["omega"] = c.omega;
      break;
    default: j["omega"] = c.omega;
  }
  if (c.t) {
    j["t"] = *c.t;
  } else {
    j["tmax"] = c.t_max->value;
    j["tmax_unit"] = c.t_max->in_tc ? "tc" : "1";
    j["steps"] = c.steps;
  }
  if (c.bloch) j["bloch"] = {c.bloch->x(), c.bloch->y(), c.bloch->z()};
  else j["initial"] = {{"theta", *c.theta}, {"phi", c.phi}};
  j["seed"] = c.seed;
  j["route"] = to_string(c.route);
  return j;
}

inline nlohmann::ordered_json lagrange_json(const LagrangeSolution& s) {
  nlohmann::ordered_json j;
  j["pure"] = s.pure;
  if (s.pure) j["lambda"] = nullptr;
  else j["lambda"] = s.lambda;
  j["per_particle_r"] = s.per_particle_r;
  j["residual"] = s.residual;
  return j;
}

inline nlohmann::ordered_json report_json(const LinearityReport& r) {
  nlohmann::ordered_json j;
  j["max_violation"] = r.max_violation;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  if (r.witness) {
    const auto& w = *r.witness;
    const Real3 a = bloch_from_density(w.rho_a).vec(), b = bloch_from_density(w.rho_b).vec();
    j["witness"] = {{"bloch_a", {a.x(), a.y(), a.z()}}, {"bloch_b", {b.x(), b.y(), b.z()}}, {"weight", w.weight},
                    {"t", w.t}, {"sample", w.sample}};
  }
  return j;
}

inline nlohmann::ordered_json report_json(const MarkovReport& r) {
  auto intervals = [](const std::vector<Interval>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& i : v) a.push_back({i.begin, i.end});
    return a;
  };
  return {{"semigroup_gap", r.semigroup_gap},
          {"argmax_t", r.argmax_t},
          {"argmax_s", r.argmax_s},
          {"negative_rate_intervals", intervals(r.negative_rate_intervals)},
          {"positive_rate_intervals", intervals(r.positive_rate_intervals)}};
}

namespace detail {

inline void push_row(Dataset& d, double t, const Real3& r, double purity, std::initializer_list<double> extra = {}) {
  std::vector<double> row{t, r.x(), r.y(), r.z(), purity};
  row.insert(row.end(), extra);
  d.rows.push_back(std::move(row));
}

}  // namespace detail

inline RunOutput run(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve(raw);
  const CoarseGraining cg = coarse_graining(c);
  const HamiltonianSpec spec = hamiltonian(c);
  const DensityMatrix rho = initial_state(c);
  const std::vector<double> times = sample_times(c);
  const EffectiveDynamics dyn(cg, spec, c.route);
  const AssignedState assigned = assign(rho, cg);

  RunOutput out;
  out.data.columns = {"t", "rx", "ry", "rz", "purity"};
  const Trajectory traj = dyn.trajectory(rho, times);

  auto& meta = out.metadata;
  meta["library"] = {{"name", "cgdyn"}, {"version", kVersion}};
  meta["config"] = config_json(c);
  meta["seed"] = c.seed;
  nlohmann::ordered_json derived;
  derived["model"] = spec.name();
  derived["probs"] = cg.probs();
  derived["route"] = to_string(traj.route);
  derived["assignment"] = lagrange_json(assigned.solution);
  nlohmann::ordered_json assumptions = nlohmann::ordered_json::array();

  if (c.experiment == Experiment::SwapKappa) {
    const SwapParameters sp = swap_parameters(rho, cg, c.omega);
    out.data.columns.insert(out.data.columns.end(), {"kappa", "rate"});
    for (std::size_t i = 0; i < traj.size(); ++i)
      detail::push_row(out.data, traj.times[i], traj.bloch[i].vec(), traj.purity[i],
                       {kappa_swap(sp, traj.times[i]), swap_rate(sp, traj.times[i])});
    derived["r1"] = sp.r1;
    derived["r2"] = sp.r2;
  } else {
    for (std::size_t i = 0; i < traj.size(); ++i)
      detail::push_row(out.data, traj.times[i], traj.bloch[i].vec(), traj.purity[i]);
  }

  if (c.experiment == Experiment::Field) {
    derived["t_c"] = decoherence_time(c);
    derived["omegas"] = spec.get<FieldAllToAll>()->omegas;
    if (c.distribution == "preferential")
      assumptions.push_back("remaining probability spread uniformly over particles 2..n: p_k = (1 - p1)/(n - 1)");
    assumptions.push_back("local frequencies drawn i.i.d. from normal(mu, sigma) with the run seed");
  }
  if (c.experiment == Experiment::Ising) assumptions.push_back("times in units of hbar/J");

  if (c.experiment == Experiment::Diagnostics) {
    const EffectiveMap map = [&dyn](const DensityMatrix& r, double t) { return dyn(r, t); };
    std::vector<double> grid = time_grid(c.t_max->value, std::min(c.steps, 50));
    const std::array<DensityMatrix, 1> probes{rho};
    // Without --t the probe runs at every grid time and keeps the worst.
    LinearityReport lin = linearity_probe(map, c.t ? *c.t : grid.front(), c.samples, c.seed);
    if (!c.t)
      for (std::size_t i = 1; i < grid.size(); ++i) {
        LinearityReport r = linearity_probe(map, grid[i], c.samples, c.seed);
        if (r.max_violation > lin.max_violation) lin = std::move(r);
      }
    nlohmann::ordered_json rep;
    rep["linearity"] = report_json(lin);
    rep["markov"] = report_json(semigroup_gap(map, grid, grid, probes));
    meta["report"] = rep;
  }
  meta["derived"] = derived;
  meta["assumptions"] = assumptions;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps over pure initial states

struct SweepSpec {
  int count = 0;  ///< Fibonacci-sphere size, used when states is empty
  std::vector<std::pair<double, double>> states;  ///< explicit (theta, phi)
};

/// Points on the sphere with z = 1 - 2i/(count-1): the poles are always
/// included, and count = 3 gives poles plus one equatorial point.
inline std::vector<std::pair<double, double>> fibonacci_sphere(int count) {
  if (count < 1) throw ValidationError("sweep count must be >= 1");
  std::vector<std::pair<double, double>> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = count == 1 ? 1.0 : 1.0 - 2.0 * i / (count - 1);
    const double phi = std::remainder(golden * i, 2.0 * std::numbers::pi);
    pts.emplace_back(std::acos(std::clamp(z, -1.0, 1.0)), phi < 0.0 ? phi + 2.0 * std::numbers::pi : phi);
  }
  return pts;
}

inline RunOutput sweep(ExperimentConfig raw, const SweepSpec& grid) {
  if (raw.bloch) throw ValidationError("sweep runs over pure initial states; drop the Bloch vector from the config");
  raw.theta = 0.0;
  const ExperimentConfig c = resolve(raw);
  const auto states = grid.states.empty() ? fibonacci_sphere(grid.count) : grid.states;
  const CoarseGraining cg = coarse_graining(c);
  const EffectiveDynamics dyn(cg, hamiltonian(c), c.route);
  const std::vector<double> times = sample_times(c);

  std::vector<Trajectory> trajs(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    const auto [theta, phi] = states[i];
    trajs[i] = dyn.trajectory(density_from_bloch(BlochVector(pure_bloch(theta, phi))), times);
  });

  RunOutput out;
  out.data.columns = {"state", "theta", "phi", "t", "rx", "ry", "rz", "purity"};
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Real3 r = trajs[i].bloch[k].vec();
      out.data.rows.push_back({static_cast<double>(i), states[i].first, states[i].second, times[k], r.x(), r.y(), r.z(),
                               trajs[i].purity[k]});
    }
  out.metadata["library"] = {{"name", "cgdyn"}, {"version", kVersion}};
  out.metadata["config"] = config_json(c);
  out.metadata["seed"] = c.seed;
  out.metadata["sweep"] = {{"states", states.size()}, {"grid", grid.states.empty() ? "fibonacci" : "explicit"}};
  out.metadata["derived"] = {{"model", hamiltonian(c).name()}, {"probs", cg.probs()}};
  return out;
}

}  // namespace cgdyn
