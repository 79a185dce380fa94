#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alba/trajectory.hpp"

namespace alba {

/// Writes `t,x00,x01,x02,y1,q_warm,q_busy,g,regime` with one row per
/// sample, floats at 9 significant digits, q_warm/q_busy empty when the
/// metric is undefined. Byte output is deterministic for a given
/// trajectory.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Same layout as write_trajectory_csv on the replication mean, plus
/// x00_sd,x01_sd,x02_sd,y1_sd columns.
void write_replicated_csv(const ReplicatedTrajectory& rep,
                          const std::string& path);

/// Parsed CSV for round-trips in tests and downstream tooling: numeric
/// columns by name (empty cells -> nullopt) plus the regime strings.
struct CsvTable {
  std::vector<std::string> columns;
  std::map<std::string, std::vector<std::optional<double>>> numeric;
  std::vector<std::string> regime;
  std::size_t rows = 0;
};

CsvTable read_trajectory_csv(const std::string& path);

}  // namespace alba
