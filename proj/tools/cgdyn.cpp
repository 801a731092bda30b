// cgdyn: datasets for coarse-grained effective dynamics.
//
// Every subcommand accepts --config FILE (INI); command-line flags override
// values from the file. Exit codes: 0 success, 1 invalid input, 2 numeric
// failure.

#include "cgdyn/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using cgdyn::ExperimentConfig;

struct Flags {
  std::optional<int> n;
  std::string distribution = "auto";
  std::optional<double> p1;
  std::vector<double> probs;
  double omega = 1.0, J = 1.0, g = 0.0, mu = 1.5, sigma = 0.2;
  std::string boundary = "closed";
  bool interaction = false;
  std::string model = "swap";
  std::optional<std::string> tmax;
  int steps = 200;
  std::optional<double> t;
  std::vector<double> bloch;
  std::optional<double> theta;
  double phi = 0.0;
  std::uint64_t seed = 1;
  int samples = 100;
  std::string route = "auto";
  std::string output = "-";
  std::string metadata;
  std::string format = "csv";
  // sweep only
  std::string experiment = "ising";
  int count = 0;
  std::vector<std::string> states;
};

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--n", f.n, "particle count");
  sub.add_option("--distribution", f.distribution, "auto | nonpreferential | preferential | custom");
  sub.add_option("--p1", f.p1, "preferred-particle probability (implies a preferential distribution)");
  sub.add_option("--probs", f.probs, "explicit probability vector p_1..p_n")->delimiter(',');
  sub.add_option("--tmax", f.tmax, "final time; field experiments accept <x>tc");
  sub.add_option("--steps", f.steps, "grid intervals (steps + 1 samples)");
  sub.add_option("--t", f.t, "single sample time, replaces the grid");
  sub.add_option("--bloch", f.bloch, "initial Bloch vector rx,ry,rz")->expected(3)->delimiter(',');
  sub.add_option("--theta", f.theta, "pure initial state polar angle");
  sub.add_option("--phi", f.phi, "pure initial state azimuth");
  sub.add_option("--seed", f.seed, "root seed");
  sub.add_option("--route", f.route, "auto | dense | factorized | state-vector");
  sub.add_option("--output,-o", f.output, "CSV path, - for stdout");
  sub.add_option("--metadata", f.metadata, "metadata JSON path (default: <output>.json)");
  sub.add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

void add_omega(CLI::App& sub, Flags& f) { sub.add_option("--omega", f.omega, "coupling frequency"); }

void add_field(CLI::App& sub, Flags& f) {
  sub.add_option("--mu", f.mu, "mean local frequency");
  sub.add_option("--sigma", f.sigma, "frequency spread");
  sub.add_flag("--interaction", f.interaction, "add the all-to-all (sigma^z)^n term");
}

void add_ising(CLI::App& sub, Flags& f) {
  sub.add_option("--J", f.J, "ZZ coupling");
  sub.add_option("--g", f.g, "transverse field");
  sub.add_option("--boundary", f.boundary, "closed | open")->check(CLI::IsMember({"closed", "open"}));
}

ExperimentConfig to_config(const Flags& f, cgdyn::Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.n = f.n;
  c.distribution = f.distribution;
  c.p1 = f.p1;
  c.probs = f.probs;
  c.omega = f.omega;
  c.J = f.J;
  c.g = f.g;
  c.mu = f.mu;
  c.sigma = f.sigma;
  c.boundary = f.boundary == "open" ? cgdyn::Boundary::Open : cgdyn::Boundary::Closed;
  c.interaction = f.interaction;
  c.model = f.model;
  if (f.tmax) c.t_max = cgdyn::parse_time_spec(*f.tmax);
  c.steps = f.steps;
  c.t = f.t;
  if (!f.bloch.empty()) c.bloch = cgdyn::Real3(f.bloch[0], f.bloch[1], f.bloch[2]);
  c.theta = f.theta;
  c.phi = f.phi;
  c.seed = f.seed;
  c.samples = f.samples;
  c.route = cgdyn::parse_route(f.route);
  return c;
}

cgdyn::SweepSpec to_sweep(const Flags& f) {
  cgdyn::SweepSpec s;
  s.count = f.count;
  for (const auto& st : f.states) {
    const auto colon = st.find(':');
    if (colon == std::string::npos) throw cgdyn::ValidationError("--states entries are theta:phi, got '" + st + "'");
    try {
      s.states.emplace_back(std::stod(st.substr(0, colon)), std::stod(st.substr(colon + 1)));
    } catch (const std::exception&) {
      throw cgdyn::ValidationError("--states entries are theta:phi, got '" + st + "'");
    }
  }
  if (s.states.empty() && s.count < 1) throw cgdyn::ValidationError("sweep needs --count >= 1 or --states");
  return s;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw cgdyn::ValidationError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw cgdyn::ValidationError("failed writing '" + path + "'");
}

void emit(const cgdyn::RunOutput& out, const Flags& f) {
  std::string body;
  if (f.format == "json") {
    nlohmann::ordered_json j;
    j["metadata"] = out.metadata;
    j["data"] = out.data.json();
    body = j.dump(2) + "\n";
  } else {
    body = out.data.csv();
  }
  if (f.output == "-") std::cout << body;
  else write_file(f.output, body);

  if (f.format == "csv") {
    const std::string meta_path = !f.metadata.empty() ? f.metadata : (f.output == "-" ? "" : f.output + ".json");
    if (!meta_path.empty()) write_file(meta_path, out.metadata.dump(2) + "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse-grained effective dynamics of many-qubit systems"};
  app.set_version_flag("--version", std::string(cgdyn::kVersion));
  app.require_subcommand(1);
  app.set_config("--config", "", "INI configuration file; flags override it");
  app.allow_config_extras(false);

  Flags f;
  std::optional<cgdyn::Experiment> chosen;
  bool sweeping = false;

  auto sub = [&](const char* name, const char* help, cgdyn::Experiment e) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(*s, f);
    s->callback([&chosen, e] { chosen = e; });
    return s;
  };
  add_omega(*sub("swap-kappa", "SWAP model: depolarization coefficient and its rate", cgdyn::Experiment::SwapKappa), f);
  add_omega(*sub("cnot", "CNOT model effective trajectory", cgdyn::Experiment::Cnot), f);
  add_field(*sub("field", "random local fields with optional all-to-all interaction", cgdyn::Experiment::Field), f);
  add_ising(*sub("ising", "Ising chain in a transverse field", cgdyn::Experiment::Ising), f);
  add_omega(*sub("linear-nm", "linear but non-Markovian local-z model", cgdyn::Experiment::LinearNm), f);
  CLI::App* diag = sub("diagnostics", "linearity and semigroup probes of a two-qubit model", cgdyn::Experiment::Diagnostics);
  add_omega(*diag, f);
  diag->add_option("--model", f.model, "swap | cnot | linear-nm");
  diag->add_option("--samples", f.samples, "linearity probe samples");

  CLI::App* sw = app.add_subcommand("sweep", "one trajectory per pure initial state on a sphere grid");
  add_common(*sw, f);
  add_omega(*sw, f);
  add_field(*sw, f);
  add_ising(*sw, f);
  sw->add_option("--experiment", f.experiment, "experiment to sweep")
      ->check(CLI::IsMember({"swap-kappa", "cnot", "field", "ising", "linear-nm"}));
  sw->add_option("--count", f.count, "Fibonacci-sphere size");
  sw->add_option("--states", f.states, "explicit theta:phi list")->delimiter(',');
  sw->callback([&sweeping] { sweeping = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sweeping) {
      emit(cgdyn::sweep(to_config(f, cgdyn::parse_experiment(f.experiment)), to_sweep(f)), f);
    } else {
      emit(cgdyn::run(to_config(f, *chosen)), f);
    }
  } catch (const cgdyn::ValidationError& e) {
    std::cerr << "cgdyn: invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cgdyn: numeric failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
