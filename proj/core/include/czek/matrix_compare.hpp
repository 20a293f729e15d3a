#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "czek/distance.hpp"

namespace czek {

struct CellComparison {
  std::string row;
  std::string col;
  double ours = 0.0;
  double reference = 0.0;
  double relative_difference = 0.0;  // |ours - reference| / |reference|
  bool excluded = false;
};

/// Upper-triangle comparison of two matrices over the same label set.
struct MatrixComparison {
  std::vector<CellComparison> cells;
  std::vector<double> bin_edges;     // histogram edges, last bin open-ended
  std::vector<std::size_t> histogram;  // one count per bin, excluded cells omitted
  std::size_t compared = 0;
  std::size_t exceeding = 0;  // compared cells with relative difference >= tolerance
  double tolerance = 0.0;

  double exceeding_fraction() const {
    return compared == 0 ? 0.0 : static_cast<double>(exceeding) / static_cast<double>(compared);
  }
};

/// Labels are matched by name, so the two matrices may be in different
/// orders; the label sets must agree. A zero reference cell yields relative
/// difference 0 when ours is also 0 and +inf otherwise.
MatrixComparison compare_matrices(
    const DistanceMatrix& ours, const DistanceMatrix& reference, double tolerance,
    const std::vector<std::pair<std::string, std::string>>& excluded = {});

}  // namespace czek
