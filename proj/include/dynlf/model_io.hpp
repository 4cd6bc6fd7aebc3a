#pragma once

#include <string>

#include "dynlf/trainer.hpp"
#include "dynlf/types.hpp"

namespace dynlf {

/// Plain-text model file: dims, hyperparameters, every per-slot node factor
/// matrix and the shared target factors, all in round-trip decimal precision.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

/// Ground-truth factor files share the matrix block format.
void save_factors(const FactorSet& factors, const std::string& path);
FactorSet load_factors(const std::string& path);

}  // namespace dynlf
