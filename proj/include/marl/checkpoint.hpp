#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "marl/algos.hpp"

namespace marl {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Self-describing map of named parameter arrays plus string metadata,
// serialized with a format version and a payload checksum. A single
// corrupted byte fails the load, never yields silent garbage.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;
  std::map<std::string, std::string> metadata;
  // insertion-ordered named arrays
  std::vector<std::pair<std::string, std::vector<double>>> tensors;

  const std::vector<double>* find(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// TeamNets <-> checkpoint. Nets are stored as flattened parameter vectors
// (online, target, and Adam moments per network).
Checkpoint checkpoint_from_team(const TeamNets& team,
                                std::map<std::string, std::string> metadata);
void team_from_checkpoint(const Checkpoint& ckpt, TeamNets& team);

}  // namespace marl
