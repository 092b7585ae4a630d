#pragma once

#include "graphspde/model.hpp"

#include <string>

namespace graphspde {

/// Text tensor dump with a shape header:
///   graphspde-checkpoint v1
///   dims <feature_dim> <hidden_dim> <num_classes> <gcn_layers>
///   tensor <name> <rows> <cols>
///   <rows lines of cols values>
///   ...
void save_checkpoint(const ModelParams& params, const ModelConfig& dims,
                     const std::string& path);

std::pair<ModelParams, ModelConfig> load_checkpoint(const std::string& path);

} // namespace graphspde
