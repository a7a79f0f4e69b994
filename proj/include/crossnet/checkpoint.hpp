#pragma once

#include <string>

#include "crossnet/model.hpp"

namespace crossnet {

/// Binary container: magic + format version, a textual architecture
/// descriptor, then length-prefixed named arrays. Round trips are
/// bit-exact.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

// Descriptor text used inside checkpoints (exposed for tests).
std::string serialize_model_spec(const ModelSpec& spec);
ModelSpec parse_model_spec(const std::string& text);

}  // namespace crossnet
