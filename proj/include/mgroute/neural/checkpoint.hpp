#ifndef MGROUTE_NEURAL_CHECKPOINT_HPP
#define MGROUTE_NEURAL_CHECKPOINT_HPP

#include <string>

#include "mgroute/neural/model.hpp"

namespace mgroute::neural {

// Flat binary container: magic + version, one-line JSON manifest of the
// ModelConfig, then (path, rows, cols, 64-bit little-endian values) records.
struct Checkpoint {
  std::string model_type;  // "gms-eb" | "gms-dh"
  ModelConfig cfg;
  ParameterSet params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

std::string config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const std::string& json);

}  // namespace mgroute::neural

#endif
