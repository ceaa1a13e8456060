#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ecodrive/rl/agent.hpp"
#include "ecodrive/rl/preprocess.hpp"

namespace ecodrive::rl {

/// FNV-1a over everything that must agree between training and inference:
/// network shape, stacking, feature scaling and the action codec.
std::uint64_t config_hash(const NetworkShape& shape, const StackSpec& stack, const FeatureScale& features);

/// Portable text format: a version line, the config hash, the shape, then
/// every parameter as a hexadecimal float.
void save_checkpoint(std::ostream& out, const Network& net, std::uint64_t hash);
void save_checkpoint(const std::string& path, const Network& net, std::uint64_t hash);

struct LoadedCheckpoint {
  Network network;
  std::uint64_t hash = 0;
};

/// Throws std::runtime_error on a malformed file or, when given, a hash mismatch.
LoadedCheckpoint load_checkpoint(std::istream& in, std::optional<std::uint64_t> expected_hash = std::nullopt);
LoadedCheckpoint load_checkpoint(const std::string& path, std::optional<std::uint64_t> expected_hash = std::nullopt);

}  // namespace ecodrive::rl
