// Command-line front end: fit, seminorm, extend, eval, simulate.
//
// Exit codes: 0 success, 2 invalid input, 3 solver failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "c11fit/erm.hpp"
#include "c11fit/gamma.hpp"
#include "c11fit/io.hpp"
#include "c11fit/sim.hpp"
#include "c11fit/wells.hpp"

namespace fs = std::filesystem;
using namespace c11fit;

namespace {

constexpr int kOk = 0;
constexpr int kInvalidInput = 2;
constexpr int kSolverFailure = 3;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

json read_json_file(const std::string& path) {
  std::ifstream in = open_in(path);
  return json::parse(in);
}

// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path);
  os << text;
}

// Owns the trace stream for the lifetime of one command.
struct TraceFile {
  std::unique_ptr<std::ofstream> os;
  TraceSink sink(const std::string& path) {
    if (path.empty()) return {};
    os = std::make_unique<std::ofstream>(path);
    if (!*os) throw InputError("cannot write " + path);
    return json_lines_trace(*os);
  }
};

struct FitArgs {
  std::string input;
  std::optional<double> m;
  double gamma = 0.0;
  std::string out;
  std::string trace;
};

int run_fit(const FitArgs& a) {
  std::ifstream in = open_in(a.input);
  auto [base, y] = read_problem_csv(in);
  const double M = a.m ? *a.m : schedule_m(base.size(), base.dim());
  TraceFile tf;
  SolveOptions opt;
  opt.trace = tf.sink(a.trace);
  const SolveReport rep = solve(RegressionProblem{base, y, M, a.gamma}, opt);
  json j = to_json(rep);
  j["M"] = M;
  emit(a.out, j.dump(2) + "\n");
  return kOk;
}

struct SeminormArgs {
  std::string input;
  std::string out;
  std::string trace;
};

int run_seminorm(const SeminormArgs& a) {
  std::ifstream in = open_in(a.input);
  auto [base, y] = read_problem_csv(in);
  TraceFile tf;
  SeminormOptions opt;
  opt.trace = tf.sink(a.trace);
  const SeminormResult res = minimize_seminorm(base, y, opt);
  emit(a.out, json{{"gamma1", res.gamma}, {"iterations", res.iterations}, {"field", to_json(res.field)}}.dump(2) + "\n");
  return kOk;
}

struct ExtendArgs {
  std::string field;
  std::optional<double> m;
  std::string out;
};

int run_extend(const ExtendArgs& a) {
  const json j = read_json_file(a.field);
  // Accept a bare field or any object that carries one (fit and seminorm output).
  const OneField P = field_from_json(j.contains("field") ? j.at("field") : j);
  const double M = a.m ? *a.m : gamma1(P).value;
  if (!(M > 0.0)) throw InputError("extend: M must be positive (the field is affine; pass --m)");
  const WellsCheck check = check_wells_condition(P, M);
  if (!check.ok) {
    std::ostringstream msg;
    msg << "extend: Wells condition fails for pair (" << check.a << ", " << check.b << ") by " << -check.slack
        << "; M must be at least " << gamma1(P).value;
    throw InputError(msg.str());
  }
  emit(a.out, to_json(build_complex(P, M)).dump() + "\n");
  return kOk;
}

struct EvalArgs {
  std::string complex;
  std::string queries;
  std::string out;
};

int run_eval(const EvalArgs& a) {
  const CellComplex cx = complex_from_json(read_json_file(a.complex));
  std::ifstream in = open_in(a.queries);
  const Mat Q = read_points_csv(in, cx.config.field.dim());
  std::ostringstream os;
  write_eval_csv(os, cx, Q);
  emit(a.out, os.str());
  return kOk;
}

struct SimulateArgs {
  std::string config;
  std::vector<std::size_t> n;
  std::vector<double> sigma;
  std::uint64_t seed = 1000;
  std::size_t runs = 1;
  std::optional<double> m;
  double gamma = 0.0;
  std::size_t grid = 128;
  std::size_t iters_per_unknown = SimConfig{}.iters_per_unknown;
  std::size_t workers = 1;
  std::string out = "sim_out";
  bool trace = false;
  bool no_surfaces = false;
};

// Values from a SimConfig JSON file fill in whatever was not given on the command line.
void apply_config_file(SimulateArgs& a, const CLI::App& sub) {
  const json j = read_json_file(a.config);
  if (!j.is_object()) throw InputError("simulate: config must be a JSON object");
  auto given = [&](const char* flag) { return sub.count(flag) > 0; };
  if (j.contains("n") && !given("--n")) {
    a.n = j.at("n").is_array() ? j.at("n").get<std::vector<std::size_t>>() : std::vector<std::size_t>{j.at("n").get<std::size_t>()};
  }
  if (j.contains("sigma") && !given("--sigma")) {
    a.sigma = j.at("sigma").is_array() ? j.at("sigma").get<std::vector<double>>() : std::vector<double>{j.at("sigma").get<double>()};
  }
  if (j.contains("seed") && !given("--seed")) a.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("runs") && !given("--runs")) a.runs = j.at("runs").get<std::size_t>();
  if (j.contains("m") && !given("--m") && !j.at("m").is_null()) a.m = j.at("m").get<double>();
  if (j.contains("gamma") && !given("--gamma")) a.gamma = j.at("gamma").get<double>();
  if (j.contains("grid") && !given("--grid")) a.grid = j.at("grid").get<std::size_t>();
  if (j.contains("iters_per_unknown") && !given("--iters-per-unknown"))
    a.iters_per_unknown = j.at("iters_per_unknown").get<std::size_t>();
  if (j.contains("workers") && !given("--workers")) a.workers = j.at("workers").get<std::size_t>();
  if (j.contains("out") && !given("--out")) a.out = j.at("out").get<std::string>();
}

std::string surface_name(const SimConfig& c) {
  std::ostringstream os;
  os << "surface_n" << c.n << "_sigma" << c.sigma << "_seed" << c.seed << ".csv";
  return os.str();
}

int run_simulate(SimulateArgs a, const CLI::App& sub) {
  if (!a.config.empty()) apply_config_file(a, sub);
  if (a.n.empty()) a.n = {84};
  if (a.sigma.empty()) a.sigma = {0.0};
  if (a.runs < 1) throw InputError("simulate: --runs must be >= 1");
  fs::create_directories(a.out);

  std::vector<SimConfig> cfgs;
  std::vector<std::unique_ptr<std::ofstream>> traces;
  for (std::size_t n : a.n)
    for (double sigma : a.sigma)
      for (std::size_t r = 0; r < a.runs; ++r) {
        SimConfig c;
        c.n = n;
        c.sigma = sigma;
        c.seed = a.seed + r;
        c.fixed_M = a.m;
        c.gamma_tol = a.gamma;
        c.grid_per_axis = a.grid;
        c.iters_per_unknown = a.iters_per_unknown;
        if (!a.no_surfaces) c.surface_path = (fs::path(a.out) / surface_name(c)).string();
        if (a.trace) {
          std::string name = surface_name(c);
          name.replace(0, 7, "trace");
          name.replace(name.size() - 4, 4, ".jsonl");
          traces.push_back(std::make_unique<std::ofstream>(fs::path(a.out) / name));
          c.solver.trace = json_lines_trace(*traces.back());
        }
        cfgs.push_back(std::move(c));
      }

  const fs::path records = fs::path(a.out) / "records.csv";
  std::ofstream os(records);
  if (!os) throw InputError("cannot write " + records.string());
  run_sweep(cfgs, os, a.workers);
  std::cerr << "wrote " << records.string() << " (" << cfgs.size() << " runs)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth C^{1,1} regression and interpolation of scattered data"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Least-squares fit with gradient Lipschitz bound M (CSV in, report JSON out)");
  fit_cmd->add_option("input", fit.input, "CSV with columns x1..xd,y")->required();
  fit_cmd->add_option("--m", fit.m, "Bound M (default: n^(1/(2 max(d,5))))")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--gamma", fit.gamma, "Objective tolerance (default 1e-6 |y|^2/n)")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--out", fit.out, "Output JSON path (default stdout)");
  fit_cmd->add_option("--trace", fit.trace, "Write the iteration trace as JSON lines");

  SeminormArgs sn;
  auto* sn_cmd = app.add_subcommand("seminorm", "Minimal Gamma^1 over gradients for fixed values (CSV in, JSON out)");
  sn_cmd->add_option("input", sn.input, "CSV with columns x1..xd,y")->required();
  sn_cmd->add_option("--out", sn.out, "Output JSON path (default stdout)");
  sn_cmd->add_option("--trace", sn.trace, "Write the iteration trace as JSON lines");

  ExtendArgs ext;
  auto* ext_cmd = app.add_subcommand("extend", "Build the Wells cell complex of a 1-field (field JSON in, complex JSON out)");
  ext_cmd->add_option("field", ext.field, "Field JSON, or fit/seminorm output")->required();
  ext_cmd->add_option("--m", ext.m, "Constant M (default: Gamma^1 of the field)")->check(CLI::PositiveNumber);
  ext_cmd->add_option("--out", ext.out, "Output JSON path (default stdout)");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Evaluate a complex at query points (CSV out: x, value, gradient)");
  ev_cmd->add_option("complex", ev.complex, "Complex JSON from extend")->required();
  ev_cmd->add_option("queries", ev.queries, "CSV of query points, d columns")->required();
  ev_cmd->add_option("--out", ev.out, "Output CSV path (default stdout)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Bump-target experiment: records.csv and surface CSVs");
  sim_cmd->add_option("--config", sim.config, "SimConfig JSON; command-line flags take precedence");
  sim_cmd->add_option("--n", sim.n, "Sample sizes (default 84)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--sigma", sim.sigma, "Noise standard deviations (default 0)")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--seed", sim.seed, "Seed of the first run; run r uses seed + r");
  sim_cmd->add_option("--runs", sim.runs, "Runs per (n, sigma)");
  sim_cmd->add_option("--m", sim.m, "Fixed M (default: schedule)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--gamma", sim.gamma, "Objective tolerance (default 1e-6 |y|^2/n)")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--grid", sim.grid, "Grid points per axis")->check(CLI::Range(2, 1 << 14));
  sim_cmd->add_option("--iters-per-unknown", sim.iters_per_unknown, "Solver iteration cap per unknown; 0 for none");
  sim_cmd->add_option("--workers", sim.workers, "Concurrent runs")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim.out, "Output directory");
  sim_cmd->add_flag("--trace", sim.trace, "Write one JSON-lines trace per run");
  sim_cmd->add_flag("--no-surfaces", sim.no_surfaces, "Skip the per-run surface CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*sn_cmd) return run_seminorm(sn);
    if (*ext_cmd) return run_extend(ext);
    if (*ev_cmd) return run_eval(ev);
    if (*sim_cmd) return run_simulate(sim, *sim_cmd);
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const LocationFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const json::exception& e) {
    std::cerr << "error: invalid JSON: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kInvalidInput;
}
