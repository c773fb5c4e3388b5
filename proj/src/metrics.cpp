#include "marl/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace marl {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string metrics_header(int n_trained, int n_adversaries) {
  std::string h = "timestep,episode";
  for (int i = 0; i < n_trained; ++i) {
    h += ",agent_" + std::to_string(i) + "_return";
  }
  for (int j = 0; j < n_adversaries; ++j) {
    h += ",adv_" + std::to_string(j) + "_return";
  }
  h += ",mean_return";
  return h;
}

std::string format_metrics_row(const MetricsRow& row, int /*n_trained*/) {
  std::string out =
      std::to_string(row.timestep) + "," + std::to_string(row.episode);
  for (double r : row.agent_returns) out += "," + fmt(r);
  out += "," + fmt(row.mean_return);
  return out;
}

MetricsFile read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MetricsError("cannot open metrics file: " + path);
  MetricsFile mf;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw MetricsError("empty metrics file: " + path);
  ++lineno;
  {
    std::stringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.starts_with("agent_")) ++mf.n_trained;
      if (col.starts_with("adv_")) ++mf.n_adversaries;
    }
  }
  const int expected_cols = 2 + mf.n_trained + mf.n_adversaries + 1;
  std::int64_t last_timestep = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != expected_cols) {
      throw MetricsError(path + ":" + std::to_string(lineno) +
                         ": expected " + std::to_string(expected_cols) +
                         " columns, got " + std::to_string(cells.size()));
    }
    MetricsRow row;
    try {
      row.timestep = std::stoll(cells[0]);
      row.episode = std::stoll(cells[1]);
      for (int i = 0; i < mf.n_trained + mf.n_adversaries; ++i) {
        row.agent_returns.push_back(std::stod(cells[2 + i]));
      }
      row.mean_return = std::stod(cells[cells.size() - 1]);
    } catch (const std::exception&) {
      throw MetricsError(path + ":" + std::to_string(lineno) +
                         ": malformed numeric cell");
    }
    if (row.timestep <= last_timestep) {
      throw MetricsError(path + ":" + std::to_string(lineno) +
                         ": timesteps must strictly increase");
    }
    last_timestep = row.timestep;
    mf.rows.push_back(std::move(row));
  }
  return mf;
}

}  // namespace marl
