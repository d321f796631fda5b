#include "stixels/prior.hpp"

#include <stdexcept>

namespace stixels {

double complexity_energy(std::size_t n_stixels, const ModelParams& p) {
  if (n_stixels == 0) throw std::invalid_argument("complexity_energy: no stixels");
  return p.mc_cost * static_cast<double>(n_stixels - 1);
}

std::optional<std::string> consistency_check(const StixelColumn& column,
                                             std::size_t height) {
  const auto& s = column.stixels;
  if (s.empty()) return "column has no stixels";
  if (s.front().bottom != 0) return "bottom not at row 0";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].top < s[i].bottom) return "empty stixel at " + std::to_string(i);
    if (i > 0 && s[i].bottom != s[i - 1].top + 1) {
      return "non-contiguous at " + std::to_string(i);
    }
  }
  if (s.back().top + 1 < height) return "top not reached";
  if (s.back().top + 1 > height) return "top beyond column height";
  return std::nullopt;
}

}  // namespace stixels
