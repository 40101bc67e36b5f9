#include "qgrape/experiments.hpp"

namespace qgrape::experiments {

std::vector<std::pair<double, double>> energy_cost(const ControlGrid& grid) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(grid.steps() + 1);
  curve.emplace_back(0.0, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    double power = 0.0;
    for (std::size_t k = 0; k < grid.controls(); ++k) power += grid(j, k) * grid(j, k);
    total += grid.dt() * power;
    curve.emplace_back(static_cast<double>(j + 1) * grid.dt(), total);
  }
  return curve;
}

}  // namespace qgrape::experiments
