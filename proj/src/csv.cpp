#include "alba/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "alba/errors.hpp"

namespace alba {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void row_metrics(const FluidState& s, std::string& q_warm, std::string& q_busy) {
  q_warm = s.y0() > 0.0 ? fmt(per_warm_queue(s)) : "";
  q_busy = s.y1() > 0.0 ? fmt(per_busy_queue(s)) : "";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,x00,x01,x02,y1,q_warm,q_busy,g,regime\n";
  std::string q_warm, q_busy;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const FluidState& s = traj.states[k];
    row_metrics(s, q_warm, q_busy);
    out << fmt(traj.times[k]) << ',' << fmt(s.x00()) << ',' << fmt(s.x01())
        << ',' << fmt(s.warm(0)) << ',' << fmt(s.y1()) << ',' << q_warm << ','
        << q_busy << ',' << fmt(traj.g_values[k]) << ','
        << to_string(traj.regimes[k]) << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

void write_replicated_csv(const ReplicatedTrajectory& rep,
                          const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,x00,x01,x02,y1,q_warm,q_busy,g,regime,x00_sd,x01_sd,x02_sd,y1_sd\n";
  std::string q_warm, q_busy;
  const Trajectory& traj = rep.mean;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const FluidState& s = traj.states[k];
    row_metrics(s, q_warm, q_busy);
    out << fmt(traj.times[k]) << ',' << fmt(s.x00()) << ',' << fmt(s.x01())
        << ',' << fmt(s.warm(0)) << ',' << fmt(s.y1()) << ',' << q_warm << ','
        << q_busy << ',' << fmt(traj.g_values[k]) << ','
        << to_string(traj.regimes[k]) << ',' << fmt(rep.sd_x00[k]) << ','
        << fmt(rep.sd_x01[k]) << ',' << fmt(rep.sd_x02[k]) << ','
        << fmt(rep.sd_y1[k]) << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

CsvTable read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV '" + path + "'");
  std::stringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) {
    table.columns.push_back(cell);
    if (cell != "regime") table.numeric[cell] = {};
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    for (const std::string& col : table.columns) {
      if (!std::getline(ss, cell, ',')) cell = "";
      if (col == "regime") {
        table.regime.push_back(cell);
      } else if (cell.empty()) {
        table.numeric[col].push_back(std::nullopt);
      } else {
        table.numeric[col].push_back(std::stod(cell));
      }
    }
    ++table.rows;
  }
  return table;
}

}  // namespace alba
