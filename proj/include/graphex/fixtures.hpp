#pragma once

// Named graphexes used across tests and the CLI `fixtures` subcommand.

#include <stdexcept>

#include "graphex/core.hpp"

namespace graphex::fixtures {

inline step_graphex constant(double c, double mass = 1.0) {
  if (!(c >= 0.0 && c <= 1.0)) throw std::domain_error("constant fixture: c outside [0,1]");
  if (!(mass > 0.0)) throw std::domain_error("constant fixture: mass must be positive");
  step_graphex g;
  g.masses = {mass};
  g.graphon = {{c}};
  g.star = {0.0};
  return g;
}

// Bipartite two-atom graphon: parts p and 1-p, value 1 across, 0 within.
inline step_graphex example_ex1(double p) {
  if (!(p > 0.0 && p < 0.5)) throw std::domain_error("ex1 fixture: need 0 < p < 1/2");
  step_graphex g;
  g.masses = {p, 1.0 - p};
  g.graphon = {{0.0, 1.0}, {1.0, 0.0}};
  g.star = {0.0, 0.0};
  return g;
}

// The constant graphon sqrt(p(1-p)) on one unit atom; shares every kernel
// norm with example_ex1(p) but not its marginal distribution.
inline step_graphex example_ex1_partner(double p) {
  if (!(p > 0.0 && p < 0.5)) throw std::domain_error("ex1 fixture: need 0 < p < 1/2");
  return constant(std::sqrt(p * (1.0 - p)), 1.0);
}

inline step_graphex star_only(double s = 1.0, double mass = 1.0) {
  if (!(s >= 0.0)) throw std::domain_error("star fixture: negative intensity");
  if (!(mass > 0.0)) throw std::domain_error("star fixture: mass must be positive");
  step_graphex g;
  g.masses = {mass};
  g.graphon = {{0.0}};
  g.star = {s};
  return g;
}

inline step_graphex dust_only(double i = 1.0) {
  if (!(i >= 0.0)) throw std::domain_error("dust fixture: negative density");
  step_graphex g;
  g.dust = i;
  return g;
}

// Non-uniformly-integrable family: masses 1/n and n, bipartite value 1.
// l1 norm is 2 for every n while all the mass escapes to high degrees.
inline step_graphex ui_family(double n) {
  if (!(n >= 1.0)) throw std::domain_error("ui fixture: need n >= 1");
  step_graphex g;
  g.masses = {1.0 / n, n};
  g.graphon = {{0.0, 1.0}, {1.0, 0.0}};
  g.star = {0.0, 0.0};
  return g;
}

inline step_graphex zero() { return {}; }

} // namespace graphex::fixtures
