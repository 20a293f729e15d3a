#include "czek/matrix_compare.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace czek {

MatrixComparison compare_matrices(
    const DistanceMatrix& ours, const DistanceMatrix& reference, double tolerance,
    const std::vector<std::pair<std::string, std::string>>& excluded) {
  if (!(tolerance > 0.0)) throw UsageError("comparison tolerance must be positive");
  const std::set<std::string> ours_labels(ours.labels().begin(), ours.labels().end());
  const std::set<std::string> ref_labels(reference.labels().begin(), reference.labels().end());
  if (ours_labels != ref_labels)
    throw DataError("matrices to compare must hold the same observation labels");

  std::set<std::pair<std::string, std::string>> skip;
  for (const auto& [a, b] : excluded) {
    if (!ref_labels.contains(a) || !ref_labels.contains(b))
      throw UsageError(fmt::format("excluded pair ({}, {}) names an unknown label", a, b));
    skip.insert({a, b});
    skip.insert({b, a});
  }

  MatrixComparison out;
  out.tolerance = tolerance;
  out.bin_edges = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.10, 0.25};
  out.histogram.assign(out.bin_edges.size(), 0);

  const auto& labels = reference.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      CellComparison cell;
      cell.row = labels[i];
      cell.col = labels[j];
      cell.reference = reference(i, j);
      cell.ours = ours(*ours.find_label(labels[i]), *ours.find_label(labels[j]));
      const double diff = std::abs(cell.ours - cell.reference);
      if (cell.reference != 0.0)
        cell.relative_difference = diff / std::abs(cell.reference);
      else
        cell.relative_difference = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      cell.excluded = skip.contains({cell.row, cell.col});
      if (!cell.excluded) {
        ++out.compared;
        if (cell.relative_difference >= tolerance) ++out.exceeding;
        std::size_t bin = 0;
        while (bin + 1 < out.bin_edges.size() && cell.relative_difference >= out.bin_edges[bin + 1])
          ++bin;
        ++out.histogram[bin];
      }
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace czek
