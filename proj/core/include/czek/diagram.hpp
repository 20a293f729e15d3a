#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "czek/distance.hpp"
#include "czek/seriation.hpp"

namespace czek {

/// k = breakpoints.size() + 1 ordered classes. Class 0 holds the smallest
/// distances (largest symbol). A value equal to a breakpoint stays in the
/// lower class: class_of(v) = #{b : b < v}.
struct SymbolClassification {
  std::vector<double> breakpoints;
  bool degenerate = false;  // quantiles collapsed (all equal or tied)

  std::size_t class_count() const noexcept { return breakpoints.size() + 1; }
  std::size_t class_of(double v) const;
};

/// Throws DataError unless the breakpoints are finite and strictly increasing.
SymbolClassification make_classification(std::vector<double> breakpoints);

/// Evenly spaced probabilities 1/k, ..., (k-1)/k.
std::vector<double> even_probs(std::size_t classes);

/// Type-7 (linear interpolation) quantiles of the upper-triangle values.
/// Tied quantiles are merged and flagged `degenerate`; all-equal values give
/// a single class.
SymbolClassification quantile_breaks(const DistanceMatrix& m, std::span<const double> probs);

struct Diagram {
  std::vector<std::string> labels;  // seriated order
  std::vector<std::size_t> classes;  // n*n, row-major
  SymbolClassification classification;
  std::string distance_name;
  std::string method;
  double objective = 0.0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t class_at(std::size_t i, std::size_t j) const { return classes[i * size() + j]; }
};

/// class(i, j) = classification.class_of(m[p_i][p_j]); the diagonal is class 0.
Diagram classify(const DistanceMatrix& m, const Permutation& p, const SymbolClassification& c);

/// Glyphs ordered from the largest symbol (class 0) downwards; one UTF-8 code
/// point each.
struct GlyphSet {
  std::vector<std::string> glyphs{"@", "o", ".", " "};

  static GlyphSet parse(std::string_view utf8);
};

/// Fixed-width grid: row labels on the left, column labels written
/// vertically above the grid, one glyph per cell separated by single spaces.
/// Throws UsageError when the diagram has more classes than glyphs.
std::string render_text(const Diagram& d, const GlyphSet& glyphs = {});

struct DiagramStyle {
  double cell_size = 18.0;
  double max_radius_fraction = 0.45;  // of the cell size
  double font_size = 11.0;
  double char_width = 0.62;  // em fraction used to size the label margin
  std::string font_family = "monospace";
};

/// Circle radius per class, strictly decreasing; the last of k >= 2 classes
/// is 0 (blank).
std::vector<double> class_radii(std::size_t class_count, const DiagramStyle& style = {});

/// Self-contained SVG 1.1 document.
std::string render_svg(const Diagram& d, const DiagramStyle& style = {});

}  // namespace czek
