#pragma once

#include <span>
#include <string>

#include "quaymaint/autodiff.hpp"

namespace quaymaint::nn {

/// Versioned weights container: JSON mapping parameter name -> shape +
/// row-major values, preserved to full double round-trip precision.
void save_weights(const std::string& path, std::span<const Parameter* const> params);

/// Loads weights by name into existing parameters; throws
/// std::invalid_argument on missing names or shape mismatches.
void load_weights(const std::string& path, std::span<Parameter* const> params);

std::string weights_to_json(std::span<const Parameter* const> params);
void weights_from_json(const std::string& text, std::span<Parameter* const> params);

} // namespace quaymaint::nn
