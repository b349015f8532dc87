#pragma once

#include <string>

#include "orff/learn.hpp"

namespace orff::model_io {

/// Model files are JSON documents:
///   { format_version, spec{family, d, p, sigma, A?}, seed, D, lambda,
///     theta (row-major 2D x p' array), freq_checksum }
/// Frequencies are regenerated from (spec, seed, D) on load; freq_checksum
/// guards against generator drift.
void save_model(const std::string& path, const learn::RidgeModel& model);
learn::RidgeModel load_model(const std::string& path);

std::string model_to_json(const learn::RidgeModel& model);
learn::RidgeModel model_from_json(const std::string& text);

}  // namespace orff::model_io
