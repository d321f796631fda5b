#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "stixels/model.hpp"

namespace stixels {

/// mc_cost for every stixel beyond the first. Requires n_stixels >= 1.
double complexity_energy(std::size_t n_stixels, const ModelParams& p);

/// nullopt when the stixels cover rows 0..height-1 contiguously, bottom to top,
/// each non-empty; otherwise a description of the first violation.
std::optional<std::string> consistency_check(const StixelColumn& column,
                                             std::size_t height);

}  // namespace stixels
