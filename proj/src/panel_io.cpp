#include "panelur/panel_io.hpp"

#include "panelur/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

namespace panelur::io {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string row_label(std::size_t line) { return "line " + std::to_string(line); }

std::vector<std::string> sorted_labels(std::vector<std::string> labels) {
  const bool numeric = std::all_of(labels.begin(), labels.end(),
                                   [](const std::string& s) { return to_number(s).has_value(); });
  if (numeric) {
    std::stable_sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return *to_number(a) < *to_number(b);
    });
  } else {
    std::sort(labels.begin(), labels.end());
  }
  return labels;
}

}  // namespace

Panel read_panel_csv(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  std::map<std::pair<std::string, std::string>, double> cells;
  std::map<std::string, int> units, times;

  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (!header_seen) {
      require(fields.size() == 3 && fields[0] == "unit" && fields[1] == "time" && fields[2] == "value",
              ErrorKind::Parse, row_label(line_number) + ": expected header 'unit,time,value'");
      header_seen = true;
      continue;
    }
    require(fields.size() == 3, ErrorKind::Parse,
            row_label(line_number) + ": expected 3 fields, found " + std::to_string(fields.size()));
    require(!fields[0].empty() && !fields[1].empty(), ErrorKind::Parse,
            row_label(line_number) + ": empty unit or time label");
    const auto value = to_number(fields[2]);
    require(value.has_value(), ErrorKind::Parse,
            row_label(line_number) + ": value '" + fields[2] + "' is not a number");
    require(std::isfinite(*value), ErrorKind::Data, row_label(line_number) + ": value is not finite");
    const bool inserted = cells.emplace(std::make_pair(fields[0], fields[1]), *value).second;
    require(inserted, ErrorKind::Data,
            row_label(line_number) + ": duplicate observation for unit '" + fields[0] + "' at time '" +
                fields[1] + "'");
    units.emplace(fields[0], 0);
    times.emplace(fields[1], 0);
  }
  require(header_seen, ErrorKind::Parse, "empty panel file");
  require(!cells.empty(), ErrorKind::Data, "panel file has no observations");

  std::vector<std::string> unit_ids, time_ids;
  for (const auto& [u, _] : units) unit_ids.push_back(u);
  for (const auto& [t, _] : times) time_ids.push_back(t);
  unit_ids = sorted_labels(std::move(unit_ids));
  time_ids = sorted_labels(std::move(time_ids));

  const auto n = static_cast<Index>(unit_ids.size());
  const auto T = static_cast<Index>(time_ids.size());
  require(static_cast<std::size_t>(n * T) == cells.size(), ErrorKind::Data,
          "unbalanced panel: " + std::to_string(cells.size()) + " observations for " + std::to_string(n) +
              " units and " + std::to_string(T) + " periods");
  MatrixXd values(n, T);
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < T; ++t)
      values(i, t) = cells.at({unit_ids[static_cast<std::size_t>(i)], time_ids[static_cast<std::size_t>(t)]});
  require(T >= 2, ErrorKind::Data, "panel needs at least two periods");
  return Panel(std::move(values), std::move(unit_ids), std::move(time_ids));
}

Panel read_panel_csv_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Data, "cannot open panel file '" + path + "'");
  return read_panel_csv(in);
}

void write_panel_csv(std::ostream& out, const Panel& panel) {
  const auto precision = out.precision(17);
  out << "unit,time,value\n";
  for (Index i = 0; i < panel.units(); ++i)
    for (Index t = 0; t < panel.periods(); ++t)
      out << panel.unit_ids()[static_cast<std::size_t>(i)] << ',' << panel.time_ids()[static_cast<std::size_t>(t)]
          << ',' << panel(i, t) << '\n';
  out.precision(precision);
}

namespace {

InnovationSpec innovation_from_json(const nlohmann::json& j, const std::string& name, InnovationSpec spec) {
  require(j.is_object(), ErrorKind::Config, "field '" + name + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const std::string field = name + "." + key;
    try {
      if (key == "kind") {
        spec.kind = parse_innovation_kind(value.get<std::string>());
      } else if (key == "parameter") {
        spec.parameter = value.get<double>();
      } else if (key == "distribution") {
        spec.distribution = parse_distribution(value.get<std::string>());
      } else {
        fail(ErrorKind::Config, "unknown field '" + field + "'");
      }
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::Config, "field '" + field + "' has the wrong type");
    }
  }
  return spec;
}

}  // namespace

DgpConfig dgp_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("simulation config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), ErrorKind::Config, "simulation config must be a JSON object");
  DgpConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "framework") {
        c.framework = parse_framework(value.get<std::string>());
      } else if (key == "n") {
        c.n = value.get<Index>();
      } else if (key == "T") {
        c.T = value.get<Index>();
      } else if (key == "h") {
        c.h = value.get<double>();
      } else if (key == "K") {
        c.K = value.get<Index>();
      } else if (key == "ratio") {
        c.lrv_ratio = value.get<double>();
      } else if (key == "factor_innovation") {
        c.factor_spec = innovation_from_json(value, key, c.factor_spec);
      } else if (key == "idiosyncratic_innovation") {
        c.idio_spec = innovation_from_json(value, key, c.idio_spec);
      } else if (key == "heterogeneous_alternatives") {
        c.heterogeneous_alternatives = value.get<bool>();
      } else if (key == "panic_stationary_factors") {
        c.panic_stationary_factors = value.get<bool>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else {
        fail(ErrorKind::Config, "unknown field '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::Config, "field '" + key + "' has the wrong type");
    }
  }
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("invalid simulation config: ") + e.what());
  }
  return c;
}

DgpConfig load_dgp_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Data, "cannot open simulation config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return dgp_config_from_json(buffer.str());
}

void write_truth_json(std::ostream& out, const SimulatedPanel& sim, const DgpConfig& config) {
  nlohmann::json j;
  j["framework"] = to_string(config.framework);
  j["n"] = config.n;
  j["T"] = config.T;
  j["K"] = config.K;
  j["h"] = config.h;
  j["seed"] = config.seed;
  auto loadings = nlohmann::json::array();
  for (Index i = 0; i < sim.true_loadings.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Index k = 0; k < sim.true_loadings.cols(); ++k) row.push_back(sim.true_loadings(i, k));
    loadings.push_back(row);
  }
  j["loadings"] = loadings;
  j["lrv"] = sim.true_lrvs;
  j["rho"] = sim.rho_used;
  out << j.dump(2) << '\n';
}

}  // namespace panelur::io
