#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace marl {

struct MetricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MetricsRow {
  std::int64_t timestep = 0;
  std::int64_t episode = 0;
  std::vector<double> agent_returns;  // per policy
  double mean_return = 0.0;           // across trained agents
};

struct MetricsFile {
  int n_trained = 0;
  int n_adversaries = 0;
  std::vector<MetricsRow> rows;
};

// Schema: timestep,episode,agent_<i>_return...,adv_<j>_return...,mean_return
std::string metrics_header(int n_trained, int n_adversaries);
std::string format_metrics_row(const MetricsRow& row, int n_trained);

// Throws MetricsError with the 1-based line number on malformed rows.
MetricsFile read_metrics(const std::string& path);

}  // namespace marl
