#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nqh/jacobi_elliptic.hpp"
#include "nqh/parse.hpp"
#include "nqh/reduction.hpp"
#include "nqh/systems.hpp"

namespace nqh::cli {

namespace {

using nlohmann::json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;
  std::string system = "elliptic";
  std::string k = "0.5";
  std::string state;
  double t0 = 0.0;
  double t1 = 10.0;
  std::size_t samples = 1001;
  std::string method = "dp45-adaptive";
  double step = 1e-3;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double tol = 1e-5;
  std::string mode = "line";
  std::string out;
  std::string report;
  unsigned max_degree = 4;
  std::string sweep;
  double perturb_lift = 0.0;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("invalid number '" + item + "' in list");
    }
  }
  return values;
}

IntegratorConfig integrator(const RunConfig& rc) {
  IntegratorConfig cfg;
  try {
    cfg.method = parse_method(rc.method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.step = rc.step;
  cfg.abs_tol = rc.abs_tol;
  cfg.rel_tol = rc.rel_tol;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

SystemSpec make_system(const RunConfig& rc) {
  std::optional<Rational> k;
  if (rc.system == "elliptic") {
    try {
      k = parse_rational(rc.k);
    } catch (const ParseError&) {
      throw UsageError("invalid value for --k: " + rc.k);
    }
  }
  try {
    return builtin(rc.system, k);
  } catch (const UnknownSystemError& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
}

PhaseState initial_state(const RunConfig& rc, const SystemSpec& spec) {
  PhaseState s;
  if (!rc.state.empty()) {
    s = parse_list(rc.state);
  } else if (spec.n_dof == 2) {
    s = {-1.0, 0.0, 0.0, 1.0};
  } else {
    s = {0.0, 1.0};
  }
  if (s.size() != spec.state_dimension()) {
    throw UsageError("--state needs " + std::to_string(spec.state_dimension()) + " values for " +
                     spec.name);
  }
  return s;
}

std::vector<double> sample_grid(const RunConfig& rc) {
  if (rc.samples < 2) throw UsageError("--samples must be at least 2");
  if (!(rc.t1 > rc.t0)) throw UsageError("--t1 must exceed --t0");
  return uniform_grid(rc.t0, rc.t1, rc.samples);
}

json parameters_json(const SystemSpec& spec) {
  json p = json::object();
  for (const auto& [name, value] : spec.parameters) {
    p[name] = value.get_d();
    p[name + "_exact"] = value.get_str();
  }
  return p;
}

// Writes to the named file, or to `fallback` when the name is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  write(file);
}

void write_trajectory_csv(std::ostream& os, const SystemSpec& spec,
                          const std::vector<double>& times,
                          const std::vector<std::vector<double>>& states, Status status) {
  const VarLayout L = spec.symbols.layout();
  std::vector<CompiledPoly> columns;
  os << 't';
  for (int v = 0; v < L.n_vars(); ++v) os << ',' << spec.symbols.name(v);
  if (spec.symplectic) {
    os << ",h";
    columns.emplace_back(spec.hamiltonian);
    for (std::size_t a = 0; a < spec.momenta.size(); ++a) {
      os << ",j" << a + 1;
      columns.emplace_back(spec.momenta[a]);
    }
  }
  for (std::size_t i = 0; i < spec.invariant_generators.size(); ++i) {
    os << ',' << spec.invariant_names.at(i);
    columns.emplace_back(spec.invariant_generators[i]);
  }
  os << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << format_double(times[i]);
    for (double v : states[i]) os << ',' << format_double(v);
    for (const auto& c : columns) os << ',' << format_double(c(states[i]));
    os << '\n';
  }
  if (status != Status::completed) os << "# status: " << to_string(status) << '\n';
}

void write_json(const std::string& path, std::ostream& fallback, const json& j) {
  emit(path, fallback, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

// ---------------------------------------------------------------- verify

int cmd_verify(const RunConfig& rc, std::ostream& out) {
  const SystemSpec spec = make_system(rc);
  if (!spec.symplectic) throw UsageError(spec.name + " is not a Hamiltonian system; nothing to verify");
  if (rc.max_degree < 1) throw UsageError("--max-degree must be at least 1");

  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, std::optional<bool> pass, json detail) {
    const char* status = !pass ? "skipped" : (*pass ? "pass" : "fail");
    if (pass && !*pass) all_pass = false;
    checks.push_back({{"name", name}, {"status", status}, {"detail", std::move(detail)}});
  };

  // Construction already enforced the bracket table; restate it.
  json brackets = json::array();
  for (std::size_t a = 0; a < spec.momenta.size(); ++a)
    for (std::size_t b = a + 1; b < spec.momenta.size(); ++b) {
      brackets.push_back({{"pair", "{j" + std::to_string(a + 1) + ",j" + std::to_string(b + 1) + "}"},
                          {"value", to_string(poisson_bracket(spec.momenta[a], spec.momenta[b]),
                                              spec.symbols)}});
    }
  record("structure-table", true, spec.group().name);
  record("momentum-brackets", true, brackets);

  const ClosureReport closure = verify_closure(spec, rc.max_degree);
  json closure_json = json::array();
  for (const auto& e : closure.entries) {
    json entry;
    entry["generator"] = "j" + std::to_string(e.index + 1);
    entry["bracket"] = to_string(e.bracket, spec.symbols);
    entry["f_numeric"] = e.expression ? json(to_string(*e.expression, closure.generator_symbols)) : json(nullptr);
    if (e.symbolic_expression) {
      entry["f"] = to_string(*e.symbolic_expression, *closure.symbolic_generator_symbols);
    } else {
      entry["f"] = entry["f_numeric"];
    }
    closure_json.push_back(std::move(entry));
  }
  record("closure", closure.pass, closure_json);

  json descent = json::array();
  bool descent_ok = true;
  for (std::size_t i = 0; i < spec.invariant_generators.size(); ++i) {
    const Poly& f = spec.invariant_generators[i];
    for (unsigned power : {1u, 2u}) {
      const Poly g = pow(f, power);
      const DescentReport d = verify_invariant_descent(spec, g, 100);
      descent_ok = descent_ok && d.max_relative_deviation <= 1e-9;
      const auto reduced = reduced_dynamics(spec, g, rc.max_degree);
      SymbolTable inv_syms(VarLayout{0, static_cast<int>(spec.invariant_generators.size())},
                           spec.invariant_names);
      descent.push_back({{"function", to_string(g, spec.symbols)},
                         {"max_relative_deviation", d.max_relative_deviation},
                         {"reduced_dynamics", reduced ? json(to_string(*reduced, inv_syms)) : json(nullptr)}});
    }
  }
  record("invariant-descent", descent_ok, descent);

  // Stratum and split checks apply to systems whose invariant is |p|^2.
  std::optional<HamiltonianSplit> split;
  try {
    split = split_hamiltonian(spec);
  } catch (const std::invalid_argument&) {
  }
  if (split) {
    bool in_ideal = true;
    for (const auto& c : hamiltonian_vector_field_components(spec)) in_ideal = in_ideal && in_momentum_ideal(c);
    record("stratum-preservation", in_ideal, "X_h components lie in the ideal generated by the momenta");
    record("split-commutation", split->commutes(),
           {{"h_sigma", to_string(split->invariant_part, spec.symbols)},
            {"h_j", to_string(split->collective_part, spec.symbols)},
            {"bracket", to_string(split->commutator, spec.symbols)}});
  } else {
    record("stratum-preservation", std::nullopt, "invariant generator is not |p|^2");
    record("split-commutation", std::nullopt, "invariant generator is not |p|^2");
  }

  json report = {{"system", spec.name},
                 {"parameters", parameters_json(spec)},
                 {"max_degree", rc.max_degree},
                 {"hamiltonian", to_string(spec.hamiltonian, spec.symbols)},
                 {"checks", checks},
                 {"closure", closure_json},
                 {"status", all_pass ? "pass" : "fail"}};
  write_json(rc.report, out, report);
  return all_pass ? kSuccess : kCheckFailed;
}

// -------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& rc, std::ostream& out) {
  const SystemSpec spec = make_system(rc);
  const PhaseState s0 = initial_state(rc, spec);
  const auto grid = sample_grid(rc);
  const IntegratorConfig cfg = integrator(rc);
  Trajectory traj = integrate_ode(hamiltonian_vector_field(spec), s0, rc.t0, rc.t1, cfg, grid);
  emit(rc.out, out, [&](std::ostream& os) {
    write_trajectory_csv(os, spec, traj.times, traj.states, traj.status);
  });
  return traj.status == Status::completed ? kSuccess : kNumerical;
}

// ----------------------------------------------------------- reconstruct

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

int cmd_reconstruct(const RunConfig& rc, std::ostream& out) {
  const SystemSpec spec = make_system(rc);
  if (spec.name != "elliptic" && spec.name != "linear-gravity" && spec.name != "free-particle") {
    throw UsageError("reconstruct supports elliptic, free-particle and linear-gravity");
  }
  if (rc.mode != "line" && rc.mode != "second" && rc.mode != "split") {
    throw UsageError("--mode must be line, second or split");
  }
  if (rc.mode == "line" && spec.group().name != "SE(2)") {
    throw UsageError("line mode needs an SE(2) system");
  }
  const PhaseState s0 = initial_state(rc, spec);
  const auto grid = sample_grid(rc);
  const IntegratorConfig cfg = integrator(rc);

  json report = {{"system", spec.name},
                 {"parameters", parameters_json(spec)},
                 {"mode", rc.mode},
                 {"tol", rc.tol},
                 {"samples", grid.size()},
                 {"s_dot_mean", nullptr},
                 {"s_dot_stddev", nullptr},
                 {"arc_rate_mean", nullptr}};

  std::vector<std::vector<double>> states;
  std::vector<double> times;
  std::vector<double> max_error;
  std::string status;

  if (rc.mode == "line") {
    ReconstructionResult r;
    try {
      r = moving_line_reconstruction(spec, s0, rc.t0, rc.t1, cfg, grid);
    } catch (const DegenerateMomentumError& e) {
      throw UsageError(e.what());
    }
    times = r.times;
    states = r.phase.states;
    max_error = r.max_error;
    report["s_dot_mean"] = mean(r.projected_speed);
    report["s_dot_stddev"] = stddev(r.projected_speed);
    report["arc_rate_mean"] = mean(r.arc_rate);
    report["line_parameter_final"] = r.line_parameter.back();
  } else if (rc.mode == "second") {
    Lift lift = canonical_lift(spec, s0, rc.t0, rc.t1, cfg, grid);
    if (rc.perturb_lift != 0.0) lift = perturb_lift(spec, std::move(lift), rc.perturb_lift);
    report["perturb_lift"] = rc.perturb_lift;
    try {
      const SecondReconstructionResult r = second_reconstruction(spec, lift, hamiltonian_vector_field(spec));
      times = r.times;
      states = r.phase.states;
      report["equation_residual"] = r.equation_residual;
      report["constraint_residual"] = r.constraint_residual;
      report["group_final"] = r.group_curve.back();
    } catch (const InconsistentLiftError& e) {
      report["status"] = "inconsistent-lift";
      report["residual"] = e.residual();
      report["max_error"] = nullptr;
      write_json(rc.report, out, report);
      return kCheckFailed;
    }
    const Trajectory ref = direct_trajectory(spec, s0, rc.t0, rc.t1, cfg, grid);
    max_error = max_abs_error(states, ref.states);
  } else {
    try {
      const Trajectory r = split_flow_trajectory(spec, s0, rc.t0, rc.t1, cfg, grid);
      times = r.times;
      states = r.states;
      IntegratorConfig end_cfg = cfg;
      const PhaseState a = split_flow_reconstruction(spec, s0, rc.t1 - rc.t0, end_cfg, SplitOrder::sigma_then_j);
      const PhaseState b = split_flow_reconstruction(spec, s0, rc.t1 - rc.t0, end_cfg, SplitOrder::j_then_sigma);
      report["order_discrepancy"] = max_abs_error({a}, {b});
    } catch (const SplitNotCommutingError& e) {
      report["status"] = "split-not-commuting";
      report["max_error"] = nullptr;
      write_json(rc.report, out, report);
      return kCheckFailed;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const Trajectory ref = direct_trajectory(spec, s0, rc.t0, rc.t1, cfg, grid);
    max_error = max_abs_error(states, ref.states);
  }

  const double worst = *std::max_element(max_error.begin(), max_error.end());
  const bool pass = worst < rc.tol;
  report["max_error"] = max_error;
  report["max_error_overall"] = worst;
  report["status"] = pass ? "pass" : "fail";
  if (!rc.out.empty()) {
    emit(rc.out, out, [&](std::ostream& os) {
      write_trajectory_csv(os, spec, times, states, Status::completed);
    });
  }
  write_json(rc.report, out, report);
  return pass ? kSuccess : kCheckFailed;
}

// -------------------------------------------------------- elliptic-table

int cmd_elliptic_table(const RunConfig& rc, std::ostream& out) {
  double k;
  try {
    k = parse_rational(rc.k).get_d();
  } catch (const ParseError&) {
    throw UsageError("invalid value for --k: " + rc.k);
  }
  std::optional<EllipticModulus> modulus;
  try {
    modulus.emplace(k);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  const auto grid = sample_grid(rc);
  emit(rc.out, out, [&](std::ostream& os) {
    os << "t,sn,cn,dn\n";
    for (double t : grid) {
      const JacobiTriple v = jacobi_elliptic(t, *modulus);
      os << format_double(t) << ',' << format_double(v.sn) << ',' << format_double(v.cn) << ','
         << format_double(v.dn) << '\n';
    }
  });
  return kSuccess;
}

// ------------------------------------------------------------ dispatch

int dispatch(const RunConfig& rc, std::ostream& out) {
  if (rc.command == "verify") return cmd_verify(rc, out);
  if (rc.command == "simulate") return cmd_simulate(rc, out);
  if (rc.command == "reconstruct") return cmd_reconstruct(rc, out);
  return cmd_elliptic_table(rc, out);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (path.empty()) return path;
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

std::vector<std::string> sweep_values(const std::string& sweep) {
  const auto eq = sweep.find('=');
  if (eq == std::string::npos || sweep.substr(0, eq) != "k") {
    throw UsageError("--sweep must look like k=start:stop:step");
  }
  std::vector<std::string> parts;
  std::stringstream ss(sweep.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--sweep must look like k=start:stop:step");
  Rational start, stop, step;
  try {
    start = parse_rational(parts[0]);
    stop = parse_rational(parts[1]);
    step = parse_rational(parts[2]);
  } catch (const ParseError&) {
    throw UsageError("invalid number in --sweep");
  }
  if (step <= 0 || stop < start) throw UsageError("--sweep needs step > 0 and stop >= start");
  std::vector<std::string> values;
  for (Rational v = start; v <= stop; v += step) {
    // Decimal text that parses back to the same exact value for decimal grids.
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v.get_d());
    std::string text = buf;
    if (parse_rational(text) != v) text = v.get_str();
    values.push_back(text);
    if (values.size() > 10000) throw UsageError("--sweep produces too many runs");
  }
  return values;
}

// Flag/value pairs from a JSON config; keys mirror the long flag names.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot read config file " + path);
  json j;
  try {
    file >> j;
  } catch (const json::exception& e) {
    throw UsageError("invalid config file: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) text += ',';
        text += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
      }
    } else if (value.is_number() || value.is_boolean()) {
      text = value.dump();
    } else {
      throw UsageError("unsupported value for config key " + key);
    }
    args.push_back("--" + key);
    args.push_back(text);
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> commands{"verify", "simulate", "reconstruct", "elliptic-table"};
  if (args.empty() || std::find(commands.begin(), commands.end(), args[0]) == commands.end()) {
    err << "usage: nqh {verify|simulate|reconstruct|elliptic-table} [options]\n";
    if (!args.empty() && (args[0] == "--help" || args[0] == "-h")) return kSuccess;
    return kUsage;
  }

  RunConfig rc;
  rc.command = args[0];

  // Config-file values go first so that explicit flags override them.
  std::vector<std::string> flags;
  std::vector<std::string> rest(args.begin() + 1, args.end());
  try {
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] == "--config" && i + 1 < rest.size()) {
        auto extra = config_args(rest[i + 1]);
        flags.insert(flags.begin(), extra.begin(), extra.end());
        ++i;
      } else if (rest[i].rfind("--config=", 0) == 0) {
        auto extra = config_args(rest[i].substr(9));
        flags.insert(flags.begin(), extra.begin(), extra.end());
      } else {
        flags.push_back(rest[i]);
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App app("not-quite-Hamiltonian reduction and reconstruction", "nqh " + rc.command);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--system", rc.system, "linear-gravity | elliptic | free-particle | halfplane-demo");
  app.add_option("--k", rc.k, "elliptic modulus (exact decimal or rational)");
  app.add_option("--state", rc.state, "initial state, comma separated (x,y,px,py or q,p)");
  app.add_option("--t0", rc.t0, "start time");
  app.add_option("--t1", rc.t1, "end time");
  app.add_option("--samples", rc.samples, "number of output samples (>= 2)");
  app.add_option("--method", rc.method, "dp45-adaptive | rk4-fixed");
  app.add_option("--step", rc.step, "step size for rk4-fixed");
  app.add_option("--abs-tol", rc.abs_tol, "absolute tolerance");
  app.add_option("--rel-tol", rc.rel_tol, "relative tolerance");
  app.add_option("--tol", rc.tol, "reconstruction acceptance tolerance");
  app.add_option("--mode", rc.mode, "line | second | split");
  app.add_option("--out", rc.out, "CSV output path");
  app.add_option("--report", rc.report, "JSON report path");
  app.add_option("--max-degree", rc.max_degree, "degree bound for generator expressions");
  app.add_option("--sweep", rc.sweep, "k=start:stop:step");
  app.add_option("--perturb-lift", rc.perturb_lift, "test hook: displace the lift normal to the line");
  app.add_option("--config", "JSON file with flag values");

  std::vector<std::string> argv_store;
  argv_store.push_back("nqh");
  argv_store.insert(argv_store.end(), flags.begin(), flags.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (rc.sweep.empty()) return dispatch(rc, out);
    int worst = kSuccess;
    for (const auto& k : sweep_values(rc.sweep)) {
      RunConfig run = rc;
      run.k = k;
      run.out = with_suffix(rc.out, "_k" + k);
      run.report = with_suffix(rc.report, "_k" + k);
      const int code = dispatch(run, out);
      if (code == kNumerical || (code == kCheckFailed && worst != kNumerical)) worst = code;
    }
    return worst;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NotSymplecticError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace nqh::cli
