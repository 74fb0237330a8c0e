#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "altmin/network.hpp"

namespace altmin {

/// Generator provenance carried inside the instance file.
struct InstanceMeta {
  std::uint64_t seed = 0;
  int nx = 0, nu = 0, N = 0;
  double activation_scale = 0.0;
  double achieved_activation = -1.0;
  std::vector<bool> ridge_applied;
};

struct Instance {
  NetworkProblem problem;
  std::optional<InstanceMeta> meta;
};

/// Schema (version 1):
///   { "version": 1, "M": int, "edges": [[i,j]...], "block_dims": [int...],
///     "agents": [{"H": [[...]], "h": [...], "box_lower": [...],
///                 "box_upper": [...]}...], "meta": {...}? }
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

/// FNV-1a hash of the serialized instance, as fixed-width hex.
std::string content_hash(const std::string& text);

}  // namespace altmin
