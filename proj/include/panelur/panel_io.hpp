#pragma once

#include "panelur/dgp.hpp"
#include "panelur/panel.hpp"

#include <iosfwd>
#include <string>

namespace panelur::io {

/// Reads a long CSV with header `unit,time,value`, one row per observation.
///
/// Units and times are sorted numerically when every label is a number and
/// lexicographically otherwise. Malformed rows raise a Parse error quoting the
/// line number; duplicate or missing (unit, time) pairs raise a Data error.
Panel read_panel_csv(std::istream& in);
Panel read_panel_csv_file(const std::string& path);

void write_panel_csv(std::ostream& out, const Panel& panel);

/// Simulation config from a JSON object; absent fields keep the DgpConfig
/// defaults and unknown or ill-typed fields raise a Config error naming them.
DgpConfig dgp_config_from_json(const std::string& text);
DgpConfig load_dgp_config(const std::string& path);

/// True loadings and idiosyncratic long-run variances of a simulated panel.
void write_truth_json(std::ostream& out, const SimulatedPanel& sim, const DgpConfig& config);

}  // namespace panelur::io
