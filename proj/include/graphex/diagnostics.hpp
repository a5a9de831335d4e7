#pragma once

// Tightness, uniform-integrability, and tail-regularity functionals, plus the
// closed-form edge-count moments of the sampled process. Everything here is
// an exact finite sum.

#include <stdexcept>
#include <vector>

#include "graphex/core.hpp"

namespace graphex {

struct tightness_row {
  double degree_bound = 0.0; // D
  double excess_mass = 0.0;  // mass of { D_W > D }
  double truncated_l1 = 0.0; // l1 norm after restricting to { D_W <= D }
};

inline std::vector<tightness_row> tightness_profile(const step_graphex& g,
                                                    const std::vector<double>& degree_grid) {
  require_valid(g);
  if (g.signed_mode) throw std::invalid_argument("tightness_profile: unsigned graphexes only");
  std::vector<tightness_row> rows;
  rows.reserve(degree_grid.size());
  for (double d : degree_grid) {
    auto [rest, removed] = truncate_by_degree(g, d);
    rows.push_back({d, removed, l1_norm(rest)});
  }
  return rows;
}

// Marginal mass above the threshold, closed tail: sum of D(x) * mass over
// atoms with D(x) >= bound. The closed tail is what makes the threshold
// behave like a limit from below on step functions whose marginal sits
// exactly at the bound.
inline double uniform_integrability_metric(const step_graphex& g, double bound) {
  require_valid(g);
  if (g.signed_mode)
    throw std::invalid_argument("uniform_integrability_metric: unsigned graphexes only");
  const auto prof = marginal(g);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (prof.values[i] >= bound) acc += prof.values[i] * g.masses[i];
  return acc;
}

// l1 mass lost when a pure graphon is restricted to { D > delta }.
inline double tail_regularity_gap(const step_graphex& g, double delta) {
  require_valid(g);
  if (g.signed_mode) throw std::invalid_argument("tail_regularity_gap: unsigned graphexes only");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.star[i] != 0.0)
      throw std::invalid_argument("tail_regularity_gap: graphon part only (star present)");
  if (g.dust != 0.0)
    throw std::invalid_argument("tail_regularity_gap: graphon part only (dust present)");
  const auto prof = marginal(g);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (prof.values[i] > delta) keep.push_back(i);
  const step_graphex rest = detail::take_atoms(g, keep);
  return l1_norm(g) - l1_norm(rest);
}

struct edge_moments {
  double mean = 0.0;     // T^2 * |W|_1 / 2
  double variance = 0.0; // mean + T^3 * |D_W|_2^2, atom part of the marginal only
};

inline edge_moments edge_moment_prediction(const step_graphex& g, double t) {
  require_valid(g);
  if (g.signed_mode)
    throw std::invalid_argument("edge_moment_prediction: unsigned graphexes only");
  if (!(t > 0.0)) throw std::domain_error("edge_moment_prediction: horizon must be positive");
  const auto prof = marginal(g);
  double d_l2_sq = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    d_l2_sq += prof.values[i] * prof.values[i] * g.masses[i];
  edge_moments m;
  m.mean = t * t * l1_norm(g) / 2.0;
  m.variance = m.mean + t * t * t * d_l2_sq;
  return m;
}

} // namespace graphex
