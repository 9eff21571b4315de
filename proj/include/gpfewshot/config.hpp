#pragma once

#include <string>

#include "gpfewshot/jsonout.hpp"
#include "gpfewshot/sim_harness.hpp"

namespace gpfewshot::config {

/// Parses a simulation config document (JSON or the TOML subset described in
/// the README: [section] headers, scalar and array values). Unknown keys are
/// rejected with their full path; missing required keys name the key.
sim::SimConfig parse_sim_config(const std::string& text);

/// Reads and parses a config file; format is sniffed from the content.
sim::SimConfig load_sim_config(const std::string& path);

/// Output options from the [output] section.
struct OutputConfig {
  std::string report_path;        // empty: stdout only
  bool dump_trajectories = false;
  std::string trajectory_path;    // default "trajectories.csv" next to report
  long long trajectory_episode_limit = 10;
};

OutputConfig parse_output_config(const std::string& text);

/// RegretReport as a schema-versioned JSON document (schema_version 1).
jsonout::Value report_to_json(const sim::RegretReport& report);

/// Trajectory dump rows as CSV with header
/// episode,step,action,observation,running_max,running_min.
std::string trajectories_to_csv(const std::vector<sim::TrajectoryDump>& dumps);

}  // namespace gpfewshot::config
