#include "panelur/montecarlo.hpp"

#include "panelur/asymptotics.hpp"
#include "panelur/error.hpp"
#include "panelur/parallel.hpp"
#include "panelur/pipeline.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace panelur {

std::size_t worker_count() {
  if (const char* env = std::getenv("PANELUR_WORKERS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value >= 1) return static_cast<std::size_t>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace mc {
namespace {

using nlohmann::json;

template <class T>
T get_field(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::Config, "field '" + key + "' has the wrong type");
  }
}

template <class T, class Parse>
std::vector<T> parse_list(const json& j, const std::string& key, Parse parse) {
  const auto& value = j.at(key);
  require(value.is_array(), ErrorKind::Config, "field '" + key + "' must be an array");
  std::vector<T> out;
  for (const auto& item : value) {
    require(item.is_string(), ErrorKind::Config, "field '" + key + "' must hold strings");
    out.push_back(parse(item.get<std::string>()));
  }
  return out;
}

template <class T>
std::vector<T> numeric_list(const json& j, const std::string& key) {
  const auto& value = j.at(key);
  require(value.is_array(), ErrorKind::Config, "field '" + key + "' must be an array");
  std::vector<T> out;
  for (const auto& item : value) {
    require(item.is_number(), ErrorKind::Config, "field '" + key + "' must hold numbers");
    if constexpr (std::is_integral_v<T>)
      require(item.is_number_integer(), ErrorKind::Config, "field '" + key + "' must hold integers");
    out.push_back(item.get<T>());
  }
  return out;
}

double empirical_quantile(std::vector<double> values, double alpha) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double position = std::ceil(alpha * static_cast<double>(values.size())) - 1.0;
  const auto index = static_cast<std::size_t>(std::clamp(position, 0.0, static_cast<double>(values.size() - 1)));
  return values[index];
}

struct Rate {
  double rate = 0.0;
  Index successes = 0;
};

Rate rejection_rate(const std::vector<double>& stats, double critical) {
  Index rejections = 0, successes = 0;
  for (double s : stats) {
    if (std::isnan(s)) continue;
    ++successes;
    if (s <= critical) ++rejections;
  }
  Rate r;
  r.successes = successes;
  r.rate = successes > 0 ? static_cast<double>(rejections) / static_cast<double>(successes) : 0.0;
  return r;
}

double std_err(double rate, Index replications) {
  if (replications <= 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(replications));
}

std::string format_double(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

}  // namespace

void Experiment::validate() const {
  require(!frameworks.empty() && !n_values.empty() && !T_values.empty() && !ratios.empty() &&
              !innovations.empty() && !distributions.empty() && !h_values.empty(),
          ErrorKind::Config, "every grid must be nonempty");
  require(replications >= 1, ErrorKind::Config, "replications must be at least 1");
  require(!tests.empty(), ErrorKind::Config, "at least one test is required");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::Config, "alpha must lie in (0, 1)");
  require(K >= 0, ErrorKind::Config, "K must be nonnegative");
  require(k_max >= 0, ErrorKind::Config, "k_max must be nonnegative");
  lrv.validate();
  for (const Cell& cell : enumerate_cells(*this)) {
    DgpConfig dgp;
    dgp.framework = cell.framework;
    dgp.n = cell.n;
    dgp.T = cell.T;
    dgp.h = cell.h;
    dgp.K = K;
    dgp.lrv_ratio = cell.ratio;
    dgp.factor_spec = {cell.innovation, innovation_parameter, cell.distribution, 1.0};
    dgp.idio_spec = dgp.factor_spec;
    dgp.panic_stationary_factors = panic_stationary_factors;
    dgp.validate();
  }
}

Experiment Experiment::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("experiment config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), ErrorKind::Config, "experiment config must be a JSON object");

  static const std::set<std::string> known = {
      "frameworks", "n",        "T",          "ratio",   "innovations", "distributions",
      "h",          "innovation_parameter",   "K",       "heterogeneous_alternatives",
      "panic_stationary_factors",             "lrv",     "tests",       "alpha",
      "replications", "base_seed", "k_known", "k_max"};
  for (const auto& [key, value] : j.items())
    require(known.count(key) > 0, ErrorKind::Config, "unknown field '" + key + "'");

  Experiment e;
  if (j.contains("frameworks")) e.frameworks = parse_list<Framework>(j, "frameworks", parse_framework);
  if (j.contains("n")) e.n_values = numeric_list<Index>(j, "n");
  if (j.contains("T")) e.T_values = numeric_list<Index>(j, "T");
  if (j.contains("ratio")) e.ratios = numeric_list<double>(j, "ratio");
  if (j.contains("innovations"))
    e.innovations = parse_list<InnovationKind>(j, "innovations", parse_innovation_kind);
  if (j.contains("distributions"))
    e.distributions = parse_list<Distribution>(j, "distributions", parse_distribution);
  if (j.contains("h")) e.h_values = numeric_list<double>(j, "h");
  if (j.contains("innovation_parameter")) e.innovation_parameter = get_field<double>(j, "innovation_parameter");
  if (j.contains("K")) e.K = get_field<Index>(j, "K");
  if (j.contains("heterogeneous_alternatives"))
    e.heterogeneous_alternatives = get_field<bool>(j, "heterogeneous_alternatives");
  if (j.contains("panic_stationary_factors"))
    e.panic_stationary_factors = get_field<bool>(j, "panic_stationary_factors");
  if (j.contains("lrv")) {
    const auto& lrv = j.at("lrv");
    require(lrv.is_object(), ErrorKind::Config, "field 'lrv' must be an object");
    for (const auto& [key, value] : lrv.items())
      require(key == "kernel" || key == "bandwidth" || key == "prewhiten", ErrorKind::Config,
              "unknown field 'lrv." + key + "'");
    if (lrv.contains("kernel")) e.lrv.kernel = parse_kernel(get_field<std::string>(lrv, "kernel"));
    if (lrv.contains("bandwidth")) parse_bandwidth(get_field<std::string>(lrv, "bandwidth"), e.lrv);
    if (lrv.contains("prewhiten")) e.lrv.prewhiten = get_field<bool>(lrv, "prewhiten");
  }
  if (j.contains("tests")) e.tests = parse_list<TestName>(j, "tests", parse_test_name);
  if (j.contains("alpha")) e.alpha = get_field<double>(j, "alpha");
  if (j.contains("replications")) e.replications = get_field<Index>(j, "replications");
  if (j.contains("base_seed")) e.base_seed = get_field<std::uint64_t>(j, "base_seed");
  if (j.contains("k_known")) e.k_known = get_field<bool>(j, "k_known");
  if (j.contains("k_max")) e.k_max = get_field<Index>(j, "k_max");
  e.validate();
  return e;
}

Experiment Experiment::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Data, "cannot open experiment config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::vector<Cell> enumerate_cells(const Experiment& exp) {
  std::vector<Cell> cells;
  for (Framework framework : exp.frameworks) {
    std::size_t data_key = 0;
    for (Index n : exp.n_values)
      for (Index T : exp.T_values)
        for (double ratio : exp.ratios)
          for (InnovationKind innovation : exp.innovations)
            for (Distribution distribution : exp.distributions) {
              for (double h : exp.h_values)
                cells.push_back({framework, n, T, ratio, innovation, distribution, h, data_key});
              ++data_key;
            }
  }
  return cells;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t data_key, Index replication) {
  std::uint64_t s = mix64(base_seed);
  s = mix64(s ^ (static_cast<std::uint64_t>(data_key) + 0x243f6a8885a308d3ULL));
  return mix64(s ^ (static_cast<std::uint64_t>(replication) + 0x13198a2e03707344ULL));
}

std::vector<CellStatistics> run_detailed(const Experiment& exp, std::size_t workers) {
  exp.validate();
  const std::vector<Cell> cells = enumerate_cells(exp);
  const auto R = static_cast<std::size_t>(exp.replications);
  const std::size_t tests = exp.tests.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<CellStatistics> out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out[c].cell = cells[c];
    out[c].tests = exp.tests;
    out[c].statistics.assign(tests, std::vector<double>(R, nan));
  }

  PipelineOptions options;
  options.lrv = exp.lrv;
  options.alpha = exp.alpha;
  options.tests = exp.tests;
  options.k_max = exp.k_max;
  if (exp.k_known) options.k = exp.K;

  parallel_for(cells.size() * R, workers, [&](std::size_t job) {
    const std::size_t c = job / R;
    const std::size_t r = job % R;
    const Cell& cell = cells[c];
    DgpConfig dgp;
    dgp.framework = cell.framework;
    dgp.n = cell.n;
    dgp.T = cell.T;
    dgp.h = cell.h;
    dgp.K = exp.K;
    dgp.factor_spec = {cell.innovation, exp.innovation_parameter, cell.distribution, 1.0};
    dgp.idio_spec = dgp.factor_spec;
    dgp.lrv_ratio = cell.ratio;
    dgp.heterogeneous_alternatives = exp.heterogeneous_alternatives;
    dgp.panic_stationary_factors = exp.panic_stationary_factors;
    dgp.seed = replication_seed(exp.base_seed, cell.data_key, static_cast<Index>(r));
    try {
      const SimulatedPanel sim = simulate(dgp);
      const PipelineResult result = run_pipeline(sim.panel, options);
      for (std::size_t t = 0; t < tests; ++t) {
        const double stat = result.outcomes[t].statistic;
        if (!std::isfinite(stat)) throw Error(ErrorKind::Numerical, "nonfinite statistic");
        out[c].statistics[t][r] = stat;
      }
    } catch (const Error&) {
      for (std::size_t t = 0; t < tests; ++t) out[c].statistics[t][r] = nan;
    }
  });

  for (auto& cell : out) {
    Index errors = 0;
    for (std::size_t r = 0; r < R; ++r)
      if (std::isnan(cell.statistics.front()[r])) ++errors;
    cell.errors = errors;
  }
  return out;
}

std::vector<ResultRow> summarize(const Experiment& exp, const std::vector<CellStatistics>& cells) {
  const double critical = normal_quantile(exp.alpha);
  std::vector<ResultRow> rows;
  for (const auto& cell : cells) {
    for (std::size_t t = 0; t < cell.tests.size(); ++t) {
      const Rate r = rejection_rate(cell.statistics[t], critical);
      rows.push_back({cell.cell, cell.tests[t], r.rate, std_err(r.rate, r.successes), r.successes, cell.errors});
    }
  }
  return rows;
}

std::vector<ResultRow> run(const Experiment& exp, std::size_t workers) {
  return summarize(exp, run_detailed(exp, workers));
}

void write_results_csv(std::ostream& out, const Experiment& exp, const std::vector<ResultRow>& rows) {
  out << "framework,n,T,ratio,innovation,distribution,bandwidth,kernel,prewhiten,h,test,"
         "rejection_rate,mc_std_err,replications,errors\n";
  for (const auto& row : rows) {
    const Cell& c = row.cell;
    out << to_string(c.framework) << ',' << c.n << ',' << c.T << ',' << format_double(c.ratio) << ','
        << to_string(c.innovation) << ',' << to_string(c.distribution) << ',' << to_string(exp.lrv) << ','
        << to_string(exp.lrv.kernel) << ',' << (exp.lrv.prewhiten ? "true" : "false") << ','
        << format_double(c.h) << ',' << to_string(row.test) << ',' << format_double(row.rejection_rate) << ','
        << format_double(row.mc_std_err) << ',' << row.replications << ',' << row.errors << '\n';
  }
}

std::vector<PowerRow> power_figure_data(const Experiment& exp, const std::vector<CellStatistics>& cells) {
  require(std::find(exp.h_values.begin(), exp.h_values.end(), 0.0) != exp.h_values.end(),
          ErrorKind::Config, "power figure data needs h = 0 in the grid");
  const double nominal = normal_quantile(exp.alpha);

  // Empirical null critical values keyed by (framework, data key, test).
  std::map<std::tuple<Framework, std::size_t, std::size_t>, double> critical;
  for (const auto& cell : cells) {
    if (cell.cell.h != 0.0) continue;
    for (std::size_t t = 0; t < cell.tests.size(); ++t)
      critical[{cell.cell.framework, cell.cell.data_key, t}] = empirical_quantile(cell.statistics[t], exp.alpha);
  }

  std::vector<PowerRow> rows;
  for (const auto& cell : cells) {
    const double h_abs = std::abs(cell.cell.h);
    for (std::size_t t = 0; t < cell.tests.size(); ++t) {
      const Rate raw = rejection_rate(cell.statistics[t], nominal);
      const double adjusted_critical = critical.at({cell.cell.framework, cell.cell.data_key, t});
      const Rate adjusted = rejection_rate(cell.statistics[t], adjusted_critical);
      rows.push_back({cell.cell, cell.tests[t], h_abs, raw.rate, adjusted.rate, std_err(raw.rate, raw.successes),
                      power_envelope(exp.alpha, h_abs), local_power_mp_bn(exp.alpha, h_abs, cell.cell.ratio),
                      raw.successes});
    }
  }
  return rows;
}

std::vector<PowerRow> power_figure_data(const Experiment& exp, std::size_t workers) {
  return power_figure_data(exp, run_detailed(exp, workers));
}

void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows) {
  out << "framework,n,T,ratio,innovation,distribution,test,h_abs,power,adjusted_power,mc_std_err,"
         "envelope,asymptote,replications\n";
  for (const auto& row : rows) {
    const Cell& c = row.cell;
    out << to_string(c.framework) << ',' << c.n << ',' << c.T << ',' << format_double(c.ratio) << ','
        << to_string(c.innovation) << ',' << to_string(c.distribution) << ',' << to_string(row.test) << ','
        << format_double(row.h_abs) << ',' << format_double(row.power) << ','
        << format_double(row.adjusted_power) << ',' << format_double(row.mc_std_err) << ','
        << format_double(row.envelope) << ',' << format_double(row.asymptote) << ',' << row.replications
        << '\n';
  }
}

}  // namespace mc
}  // namespace panelur
