#include "czek/diagram.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace czek {

namespace {

/// Splits UTF-8 text into code points (invalid bytes pass through singly).
std::vector<std::string> code_points(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (lead >= 0xF0)
      len = 4;
    else if (lead >= 0xE0)
      len = 3;
    else if (lead >= 0xC0)
      len = 2;
    len = std::min(len, s.size() - i);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

std::size_t SymbolClassification::class_of(double v) const {
  return static_cast<std::size_t>(std::lower_bound(breakpoints.begin(), breakpoints.end(), v) -
                                  breakpoints.begin());
}

SymbolClassification make_classification(std::vector<double> breakpoints) {
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i])) throw DataError("breakpoints must be finite");
    if (i > 0 && !(breakpoints[i - 1] < breakpoints[i]))
      throw DataError("breakpoints must be strictly increasing");
  }
  return SymbolClassification{std::move(breakpoints), false};
}

std::vector<double> even_probs(std::size_t classes) {
  if (classes == 0) throw UsageError("at least one symbol class is needed");
  std::vector<double> probs;
  for (std::size_t i = 1; i < classes; ++i)
    probs.push_back(static_cast<double>(i) / static_cast<double>(classes));
  return probs;
}

SymbolClassification quantile_breaks(const DistanceMatrix& m, std::span<const double> probs) {
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] < 1.0))
      throw UsageError(fmt::format("quantile probability {} outside (0, 1)", probs[i]));
    if (i > 0 && !(probs[i - 1] < probs[i]))
      throw UsageError("quantile probabilities must be strictly increasing");
  }
  const std::size_t n = m.size();
  if (n < 2) throw DataError("quantile breakpoints need at least one off-diagonal entry");

  std::vector<double> values;
  values.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) values.push_back(m(i, j));
  std::sort(values.begin(), values.end());

  SymbolClassification out;
  if (values.front() == values.back()) {
    out.degenerate = !probs.empty();
    return out;
  }
  const double last = static_cast<double>(values.size() - 1);
  for (double p : probs) {
    const double h = last * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    double q = values[lo];
    if (frac > 0.0 && lo + 1 < values.size()) q = values[lo] + frac * (values[lo + 1] - values[lo]);
    if (!out.breakpoints.empty() && !(out.breakpoints.back() < q)) {
      out.degenerate = true;
      continue;
    }
    out.breakpoints.push_back(q);
  }
  return out;
}

Diagram classify(const DistanceMatrix& m, const Permutation& p, const SymbolClassification& c) {
  const std::size_t n = m.size();
  if (p.size() != n)
    throw DataError(fmt::format("permutation of size {} does not match a {}x{} matrix", p.size(),
                                n, n));
  Diagram d;
  d.classification = c;
  d.distance_name = m.distance_name();
  d.objective = path_length(p, m);
  d.classes.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    d.labels.push_back(m.labels()[p[i]]);
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d.classes[i * n + j] = c.class_of(m(p[i], p[j]));
  }
  return d;
}

GlyphSet GlyphSet::parse(std::string_view utf8) {
  GlyphSet g;
  g.glyphs = code_points(utf8);
  if (g.glyphs.empty()) throw UsageError("glyph set must not be empty");
  return g;
}

std::string render_text(const Diagram& d, const GlyphSet& glyphs) {
  const std::size_t k = d.classification.class_count();
  if (k > glyphs.glyphs.size())
    throw UsageError(fmt::format("{} symbol classes but only {} glyphs; pass a larger glyph set", k,
                                 glyphs.glyphs.size()));
  const std::size_t n = d.size();
  std::vector<std::vector<std::string>> split;
  std::size_t width = 0;
  for (const auto& l : d.labels) {
    split.push_back(code_points(l));
    width = std::max(width, split.back().size());
  }

  std::string out;
  for (std::size_t r = 0; r < width; ++r) {
    out.append(width, ' ');
    for (std::size_t j = 0; j < n; ++j) {
      out.push_back(' ');
      out += r < split[j].size() ? split[j][r] : std::string(" ");
    }
    out.push_back('\n');
  }
  for (std::size_t i = 0; i < n; ++i) {
    out += d.labels[i];
    out.append(width - split[i].size(), ' ');
    for (std::size_t j = 0; j < n; ++j) {
      out.push_back(' ');
      out += glyphs.glyphs[d.class_at(i, j)];
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<double> class_radii(std::size_t class_count, const DiagramStyle& style) {
  const double max_r = style.cell_size * style.max_radius_fraction;
  if (class_count <= 1) return {max_r};
  std::vector<double> radii;
  for (std::size_t c = 0; c < class_count; ++c)
    radii.push_back(max_r * static_cast<double>(class_count - 1 - c) /
                    static_cast<double>(class_count - 1));
  return radii;
}

std::string render_svg(const Diagram& d, const DiagramStyle& style) {
  const std::size_t n = d.size();
  const double cell = style.cell_size;
  std::size_t longest = 0;
  for (const auto& l : d.labels) longest = std::max(longest, code_points(l).size());
  const double margin = static_cast<double>(longest) * style.font_size * style.char_width + 6.0;
  const double side = margin + static_cast<double>(n) * cell + 4.0;
  const auto radii = class_radii(d.classification.class_count(), style);

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" "
      "viewBox=\"0 0 {0} {0}\">\n",
      num(side));
  out += fmt::format("<desc>distance={}; method={}; objective={}; breakpoints={}</desc>\n",
                     xml_escape(d.distance_name), xml_escape(d.method), d.objective,
                     fmt::join(d.classification.breakpoints, " "));
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<g font-family=\"{}\" font-size=\"{}\" fill=\"black\">\n",
                     xml_escape(style.font_family), num(style.font_size));
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = margin + (static_cast<double>(i) + 0.5) * cell;
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
                       num(margin - 4.0), num(mid), xml_escape(d.labels[i]));
    out += fmt::format(
        "<text transform=\"translate({},{}) rotate(-90)\" text-anchor=\"start\" "
        "dominant-baseline=\"middle\">{}</text>\n",
        num(mid), num(margin - 4.0), xml_escape(d.labels[i]));
  }
  out += "</g>\n<g fill=\"black\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t c = d.class_at(i, j);
      if (radii[c] <= 0.0) continue;
      out += fmt::format("<circle class=\"c{}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n", c,
                         num(margin + (static_cast<double>(j) + 0.5) * cell),
                         num(margin + (static_cast<double>(i) + 0.5) * cell), num(radii[c]));
    }
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace czek
