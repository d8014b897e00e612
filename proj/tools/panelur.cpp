// Command-line front end: test a panel, simulate panels, run Monte Carlo
// experiments, emit analytic power curves, and run the self-checks.

#include "panelur/asymptotics.hpp"
#include "panelur/error.hpp"
#include "panelur/lan.hpp"
#include "panelur/montecarlo.hpp"
#include "panelur/panel_io.hpp"
#include "panelur/parallel.hpp"
#include "panelur/pipeline.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace {

using namespace panelur;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Numerical:
    case ErrorKind::Domain:
    case ErrorKind::Resource: return kExitNumerical;
    default: return kExitData;
  }
}

// Numbers go through one formatter so the text and JSON reports agree.
std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

double rounded(double x) { return std::stod(fmt(x)); }

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    require(file.good(), ErrorKind::Data, "cannot write '" + path + "'");
    stream = &file;
  }
  std::ostream& operator*() { return *stream; }
};

// ---------------------------------------------------------------------------
// test

struct TestArgs {
  std::string path;
  std::optional<Index> k;
  Index k_max = 8;
  std::string kernel = "bartlett";
  std::string bandwidth = "andrews";
  bool prewhiten = true;
  double alpha = 0.05;
  bool json = false;
};

int cmd_test(const TestArgs& args) {
  const Panel panel = io::read_panel_csv_file(args.path);
  PipelineOptions options;
  options.k = args.k;
  options.k_max = args.k_max;
  options.lrv.kernel = parse_kernel(args.kernel);
  parse_bandwidth(args.bandwidth, options.lrv);
  options.lrv.prewhiten = args.prewhiten;
  options.lrv.validate();
  require(args.alpha > 0.0 && args.alpha < 1.0, ErrorKind::Domain, "alpha must lie in (0, 1)");
  options.alpha = args.alpha;
  const PipelineResult result = run_pipeline(panel, options);

  if (args.json) {
    nlohmann::json j;
    j["n"] = panel.units();
    j["T"] = panel.periods();
    j["k"] = result.k;
    j["k_selected"] = !args.k.has_value();
    j["kernel"] = to_string(options.lrv.kernel);
    j["bandwidth"] = to_string(options.lrv);
    j["prewhiten"] = options.lrv.prewhiten;
    j["alpha"] = rounded(options.alpha);
    auto units = nlohmann::json::array();
    for (std::size_t i = 0; i < result.lrvs.size(); ++i)
      units.push_back({{"unit", panel.unit_ids()[i]},
                       {"omega2", rounded(result.lrvs.omega2[i])},
                       {"delta", rounded(result.lrvs.delta[i])}});
    j["units"] = units;
    auto tests = nlohmann::json::array();
    for (const auto& o : result.outcomes)
      tests.push_back({{"test", to_string(o.name)},
                       {"statistic", rounded(o.statistic)},
                       {"p_value", rounded(o.p_value)},
                       {"reject", o.reject}});
    j["tests"] = tests;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }

  std::cout << "panel: n=" << panel.units() << " T=" << panel.periods() << '\n'
            << "factors: " << result.k << (args.k ? " (given)" : " (selected by IC_p2)") << '\n'
            << "long-run variance: kernel=" << to_string(options.lrv.kernel)
            << " bandwidth=" << to_string(options.lrv)
            << " prewhiten=" << (options.lrv.prewhiten ? "true" : "false") << '\n'
            << "alpha: " << fmt(options.alpha) << "\n\n";
  std::cout << std::left << std::setw(12) << "unit" << std::setw(18) << "omega2" << "delta" << '\n';
  for (std::size_t i = 0; i < result.lrvs.size(); ++i)
    std::cout << std::setw(12) << panel.unit_ids()[i] << std::setw(18) << fmt(result.lrvs.omega2[i])
              << fmt(result.lrvs.delta[i]) << '\n';
  std::cout << '\n'
            << std::setw(12) << "test" << std::setw(18) << "statistic" << std::setw(18) << "p_value"
            << "reject" << '\n';
  for (const auto& o : result.outcomes)
    std::cout << std::setw(12) << to_string(o.name) << std::setw(18) << fmt(o.statistic) << std::setw(18)
              << fmt(o.p_value) << (o.reject ? "yes" : "no") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& config_path, const std::string& out_path, const std::string& truth_path,
                 std::optional<std::uint64_t> seed) {
  DgpConfig config = io::load_dgp_config(config_path);
  if (seed) config.seed = *seed;
  const SimulatedPanel sim = simulate(config);
  Output out(out_path);
  io::write_panel_csv(*out, sim.panel);
  std::string sidecar = truth_path;
  if (sidecar.empty() && !out_path.empty() && out_path != "-") sidecar = out_path + ".truth.json";
  if (!sidecar.empty()) {
    Output truth(sidecar);
    io::write_truth_json(*truth, sim, config);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mc

int cmd_mc(const std::string& config_path, const std::string& out_path, const std::string& power_path,
           std::optional<std::uint64_t> seed) {
  mc::Experiment exp = mc::Experiment::load(config_path);
  if (seed) exp.base_seed = *seed;
  const auto cells = mc::run_detailed(exp, worker_count());
  Output out(out_path);
  mc::write_results_csv(*out, exp, mc::summarize(exp, cells));
  if (!power_path.empty()) {
    Output power(power_path);
    mc::write_power_csv(*power, mc::power_figure_data(exp, cells));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// envelope

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(ErrorKind::Domain, "grid entry '" + s + "' is not a number");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream s(text);
    std::string part;
    while (std::getline(s, part, ':')) parts.push_back(number(part));
    require(parts.size() == 3 && parts[2] > 0.0, ErrorKind::Domain, "grid must be start:stop:step with step > 0");
    const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= steps; ++i) grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return grid;
  }
  std::stringstream s(text);
  std::string part;
  while (std::getline(s, part, ',')) grid.push_back(number(part));
  return grid;
}

int cmd_envelope(double alpha, double ratio, const std::string& grid_text, const std::string& out_path) {
  const PowerCurve curve = emit_power_curve(alpha, parse_grid(grid_text), ratio);
  Output out(out_path);
  *out << "h_abs,envelope,local_power\n";
  for (std::size_t i = 0; i < curve.h_grid.size(); ++i)
    *out << fmt(curve.h_grid[i]) << ',' << fmt(curve.envelope[i]) << ',' << fmt(curve.local_power[i]) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// selftest

struct SelfTest {
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ')';
    std::cout << '\n';
    if (!ok) ++failures;
  }
};

MatrixXd random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

lan::OracleNuisance random_nuisance(Index n, Index T, Index K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.5, 2.0);
  std::vector<lan::Covariance> eta, f;
  for (Index i = 0; i < n; ++i) eta.push_back(lan::Covariance::ma1(T, 0.3, uniform(rng)));
  for (Index k = 0; k < K; ++k) f.push_back(lan::Covariance::ar1(T, 0.5, uniform(rng)));
  return lan::OracleNuisance::make(std::move(eta), std::move(f), random_matrix(n, K, rng));
}

int cmd_selftest(std::uint64_t seed) {
  SelfTest st;
  std::mt19937_64 rng(seed);

  {
    const double expected[] = {0.05, 0.0982998, 0.174187, 0.279545, 0.408797};
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(power_envelope(0.05, 0.5 * i) - expected[i]));
    st.check("power envelope reference values", worst < 1e-5, "max error " + fmt(worst));
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      const DiffPanel d(random_matrix(3, 12, rng));
      const std::vector<double> w{1.3, 0.7, 2.1};
      const LrvSet lrvs = LrvSet::from_units(w, {0.1, -0.2, 0.05}, w);
      const PrecisionMatrix psi = precision_matrix(lrvs, random_matrix(3, 1, rng));
      const UmpIntermediates ump = ump_statistics(d, psi, lrvs);
      const double T = static_cast<double>(d.periods() + 1);
      double naive = 0.0;
      for (Index t = 0; t < d.periods(); ++t)
        for (Index s = 0; s < t; ++s) naive += d.values().col(s).dot(psi.matrix * d.values().col(t));
      naive = naive / (std::sqrt(3.0) * T) - ump.correction;
      worst = std::max(worst, std::abs(naive - ump.delta_hat) / std::max(1.0, std::abs(naive)));
    }
    st.check("running sums equal the double loop", worst < 1e-10, "max relative error " + fmt(worst));
  }

  {
    const auto nu = random_nuisance(8, 5, 2, rng);
    const double diff = (lan::psi_epsilon_inverse_smw(nu) - lan::psi_epsilon_inverse_direct(nu)).cwiseAbs().maxCoeff();
    st.check("Woodbury inverse equals direct inverse", diff < 1e-9, "max error " + fmt(diff));
  }

  {
    const auto nu = random_nuisance(3, 6, 0, rng);
    const MatrixXd dY = random_matrix(3, 6, rng);
    const auto panic = lan::delta_panic_exact(dY, nu);
    const auto mp = lan::delta_mp_exact(dY, nu);
    const bool ok = panic.delta == mp.delta || std::abs(panic.delta - mp.delta) < 1e-10;
    st.check("no factors: MP central sequence equals PANIC", ok && std::abs(panic.information - mp.information) < 1e-10);
  }

  {
    lan::LanReportConfig config;
    config.sizes = {{10, 40}, {20, 160}};
    config.seeds = 100;
    config.base_seed = seed;
    config.workers = worker_count();
    const auto rows = lan::lan_convergence_report(config);
    lan::write_lan_report_csv(std::cout, rows);
    auto find = [&](Index n, const std::string& q) {
      for (const auto& r : rows)
        if (r.n == n && r.quantity == q) return r;
      fail(ErrorKind::Numerical, "missing report row " + q);
    };
    for (const char* gap : {"panic_vs_delta", "mp_vs_mp_tilde", "mp_tilde_vs_star", "star_vs_delta"}) {
      const double small = find(10, gap).median_abs_diff;
      const double large = find(20, gap).median_abs_diff;
      st.check(std::string("gap ") + gap + " shrinks", large < small, fmt(small) + " -> " + fmt(large));
    }
    const double variance = find(20, "delta").variance;
    st.check("central sequence variance near 1/2", variance > 0.3 && variance < 0.7, fmt(variance));
  }

  std::cout << (st.failures == 0 ? "selftest passed" : "selftest FAILED") << '\n';
  return st.failures == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Panel unit root tests with cross-sectional dependence"};
  app.require_subcommand(1);

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "Run all six unit root tests on a long-format panel CSV");
  test->add_option("panel", test_args.path, "CSV with header unit,time,value")->required();
  test->add_option("--k", test_args.k, "Number of factors (selected by IC_p2 when omitted)")
      ->check(CLI::NonNegativeNumber);
  test->add_option("--kmax", test_args.k_max, "Largest number of factors considered")->check(CLI::NonNegativeNumber);
  test->add_option("--kernel", test_args.kernel, "bartlett or qs");
  test->add_option("--bandwidth", test_args.bandwidth, "andrews, newey-west or fixed=B");
  test->add_flag("--prewhiten,!--no-prewhiten", test_args.prewhiten, "ARMA prewhitening (default on)");
  test->add_option("--alpha", test_args.alpha, "Nominal level");
  test->add_flag("--json", test_args.json, "Print JSON instead of text");

  std::optional<std::uint64_t> seed;
  std::string config_path, out_path, truth_path, power_path;
  auto* sim = app.add_subcommand("simulate", "Simulate a panel from a JSON config");
  sim->add_option("config", config_path, "Simulation config (JSON)")->required();
  sim->add_option("--out", out_path, "Panel CSV path (stdout when omitted)");
  sim->add_option("--truth", truth_path, "Sidecar JSON path (default <out>.truth.json)");
  sim->add_option("--seed", seed, "Override the config seed");

  auto* mc_cmd = app.add_subcommand("mc", "Run a Monte Carlo experiment from a JSON config");
  mc_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();
  mc_cmd->add_option("--out", out_path, "Rejection-rate CSV path (stdout when omitted)");
  mc_cmd->add_option("--power", power_path, "Also write power figure data to this CSV");
  mc_cmd->add_option("--seed", seed, "Override the base seed");

  double alpha = 0.05, ratio = 1.0;
  std::string grid = "0:10:0.5";
  auto* env = app.add_subcommand("envelope", "Emit the power envelope and pooled-test local power");
  env->add_option("--alpha", alpha, "Nominal level");
  env->add_option("--ratio", ratio, "sqrt(omega^4 / phi^4) of the pooled tests");
  env->add_option("--grid", grid, "start:stop:step or a comma list of |h| values");
  env->add_option("--out", out_path, "CSV path (stdout when omitted)");
  env->add_option("--seed", seed, "Unused; accepted for uniformity");

  auto* self = app.add_subcommand("selftest", "Run the oracle and convergence self-checks");
  self->add_option("--seed", seed, "Seed of the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*test) return cmd_test(test_args);
    if (*sim) return cmd_simulate(config_path, out_path, truth_path, seed);
    if (*mc_cmd) return cmd_mc(config_path, out_path, power_path, seed);
    if (*env) return cmd_envelope(alpha, ratio, grid, out_path);
    if (*self) return cmd_selftest(seed.value_or(7));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
