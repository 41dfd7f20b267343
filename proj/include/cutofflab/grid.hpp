/// @file grid.hpp
/// @brief Radial grids on [0, r_max] with uniform or graded spacing.
#pragma once

#include <cstddef>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutofflab {

struct RadialGrid {
  enum class Spacing { uniform, graded };

  std::vector<double> nodes; // strictly increasing, nodes[0] == 0
  Spacing spacing = Spacing::uniform;

  std::size_t size() const { return nodes.size(); }
  double r_max() const { return nodes.back(); }

  void validate() const {
    if (nodes.size() < 16)
      throw std::invalid_argument("RadialGrid: need at least 16 nodes");
    if (nodes.front() != 0.0)
      throw std::invalid_argument("RadialGrid: first node must be 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (!(nodes[i] > nodes[i - 1]))
        throw std::invalid_argument("RadialGrid: nodes must be strictly increasing (index " +
                                    std::to_string(i) + ")");
  }

  // n+1 nodes, 0 = r_0 < ... < r_n = r_max.
  static RadialGrid uniform(double r_max, std::size_t n) {
    if (!(r_max > 0.0) || n < 15)
      throw std::invalid_argument("RadialGrid::uniform: bad parameters");
    RadialGrid g;
    g.spacing = Spacing::uniform;
    g.nodes.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      g.nodes[i] = r_max * static_cast<double>(i) / static_cast<double>(n);
    g.nodes.back() = r_max;
    g.validate();
    return g;
  }

  // Nodes r_max * (i/n)^power; power > 1 clusters near the origin.
  static RadialGrid graded(double r_max, std::size_t n, double power) {
    if (!(r_max > 0.0) || n < 15 || !(power > 0.0))
      throw std::invalid_argument("RadialGrid::graded: bad parameters");
    RadialGrid g;
    g.spacing = Spacing::graded;
    g.nodes.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      g.nodes[i] = r_max * std::pow(static_cast<double>(i) / static_cast<double>(n), power);
    g.nodes.back() = r_max;
    g.validate();
    return g;
  }
};

} // namespace cutofflab
