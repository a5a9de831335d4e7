#pragma once

// Step graphexes over finite atomic measure spaces: a symmetric graphon matrix
// constant on atom pairs, a star-intensity vector, a dust density, and an
// isolated-mass account for the part of the space where everything vanishes.
// All operations are pure; values are immutable once built.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphex {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Shortest decimal that parses back to the same double; "inf" for infinities.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

struct step_graphex {
  std::vector<double> masses;               // atom measures, strictly positive
  std::vector<std::vector<double>> graphon; // symmetric, m x m
  std::vector<double> star;                 // star intensity per atom
  double dust = 0.0;
  double isolated_mass = 0.0;               // may be +infinity
  bool signed_mode = false;                 // lifts the [0,1]/>=0 range checks

  std::size_t size() const { return masses.size(); }
};

struct marginal_profile {
  std::vector<double> values;       // D(x): graphon row integral plus star
  std::vector<double> graphon_part; // graphon row integral alone
  double infinity_value = 0.0;      // integral of star plus twice the dust
};

// Finite simple graph without labels; vertices are 0..n-1.
struct plain_graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline std::vector<std::string> validate(const step_graphex& g) {
  std::vector<std::string> report;
  const std::size_t m = g.masses.size();
  bool shape_ok = g.graphon.size() == m && g.star.size() == m;
  for (const auto& row : g.graphon)
    if (row.size() != m) shape_ok = false;
  if (!shape_ok) {
    report.push_back("shape: graphon must be m x m and star length m");
    return report; // value checks below index freely
  }
  for (double v : g.masses)
    if (!(v > 0.0) || !std::isfinite(v)) { report.push_back("mass positivity"); break; }
  bool finite = std::isfinite(g.dust);
  for (std::size_t i = 0; i < m && finite; ++i) {
    if (!std::isfinite(g.star[i])) finite = false;
    for (std::size_t j = 0; j < m && finite; ++j)
      if (!std::isfinite(g.graphon[i][j])) finite = false;
  }
  if (!finite) report.push_back("finiteness: graphon, star and dust must be finite");
  if (std::isnan(g.isolated_mass) || g.isolated_mass < 0.0)
    report.push_back("isolated mass nonnegativity");
  bool symmetric = true;
  for (std::size_t i = 0; i < m && symmetric; ++i)
    for (std::size_t j = i + 1; j < m && symmetric; ++j)
      if (g.graphon[i][j] != g.graphon[j][i]) symmetric = false;
  if (!symmetric) report.push_back("symmetry");
  if (!g.signed_mode && finite) {
    bool in_range = true;
    for (std::size_t i = 0; i < m && in_range; ++i)
      for (std::size_t j = 0; j < m && in_range; ++j)
        if (g.graphon[i][j] < 0.0 || g.graphon[i][j] > 1.0) in_range = false;
    if (!in_range) report.push_back("graphon range [0,1]");
    for (std::size_t i = 0; i < m; ++i)
      if (g.star[i] < 0.0) { report.push_back("star nonnegativity"); break; }
    if (g.dust < 0.0) report.push_back("dust nonnegativity");
  }
  // Local finiteness is automatic on a finite atomic space with finite entries:
  // every sublevel set of the marginal has finite measure and min(S,1) is
  // integrable. Nothing further to check once the above hold.
  return report;
}

inline void require_valid(const step_graphex& g) {
  const auto report = validate(g);
  if (report.empty()) return;
  std::string msg = "invalid graphex:";
  for (const auto& r : report) msg += " [" + r + "]";
  throw std::invalid_argument(msg);
}

inline double total_mass(const step_graphex& g) {
  return std::accumulate(g.masses.begin(), g.masses.end(), 0.0);
}

inline marginal_profile marginal(const step_graphex& g) {
  require_valid(g);
  const std::size_t m = g.size();
  marginal_profile p;
  p.values.resize(m);
  p.graphon_part.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) row += g.graphon[i][j] * g.masses[j];
    p.graphon_part[i] = row;
    p.values[i] = row + g.star[i];
  }
  double star_total = 0.0;
  for (std::size_t i = 0; i < m; ++i) star_total += g.star[i] * g.masses[i];
  p.infinity_value = star_total + 2.0 * g.dust;
  return p;
}

inline double l1_norm(const step_graphex& g) {
  require_valid(g);
  const std::size_t m = g.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      acc += std::abs(g.graphon[i][j]) * g.masses[i] * g.masses[j];
  for (std::size_t i = 0; i < m; ++i) acc += 2.0 * std::abs(g.star[i]) * g.masses[i];
  return acc + 2.0 * std::abs(g.dust);
}

inline double edge_density(const step_graphex& g) {
  require_valid(g);
  const std::size_t m = g.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      acc += g.graphon[i][j] * g.masses[i] * g.masses[j];
  for (std::size_t i = 0; i < m; ++i) acc += 2.0 * g.star[i] * g.masses[i];
  return acc + 2.0 * g.dust;
}

namespace detail {

inline step_graphex take_atoms(const step_graphex& g, const std::vector<std::size_t>& keep) {
  step_graphex out;
  out.masses.reserve(keep.size());
  out.star.reserve(keep.size());
  for (std::size_t i : keep) {
    out.masses.push_back(g.masses[i]);
    out.star.push_back(g.star[i]);
  }
  out.graphon.assign(keep.size(), std::vector<double>(keep.size(), 0.0));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      out.graphon[a][b] = g.graphon[keep[a]][keep[b]];
  out.dust = g.dust;
  out.isolated_mass = g.isolated_mass;
  out.signed_mode = g.signed_mode;
  return out;
}

} // namespace detail

// Restriction to the sublevel set of the marginal: keeps atoms with D <= bound.
inline std::pair<step_graphex, double> truncate_by_degree(const step_graphex& g, double bound) {
  if (!(bound > 0.0)) throw std::domain_error("truncate_by_degree: bound must be positive");
  const auto prof = marginal(g);
  std::vector<std::size_t> keep;
  double removed = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (prof.values[i] <= bound)
      keep.push_back(i);
    else
      removed += g.masses[i];
  }
  return {detail::take_atoms(g, keep), removed};
}

inline step_graphex restrict_atoms(const step_graphex& g, const std::vector<std::size_t>& subset) {
  require_valid(g);
  if (subset.empty()) throw std::invalid_argument("restrict_atoms: empty subset");
  std::set<std::size_t> uniq(subset.begin(), subset.end());
  if (*uniq.rbegin() >= g.size()) throw std::invalid_argument("restrict_atoms: index out of range");
  return detail::take_atoms(g, std::vector<std::size_t>(uniq.begin(), uniq.end()));
}

inline step_graphex dilate(const step_graphex& g, double c) {
  require_valid(g);
  if (!(c > 0.0)) throw std::invalid_argument("dilate: factor must be positive");
  step_graphex out = g;
  for (double& v : out.masses) v *= c;
  return out;
}

inline step_graphex trivially_extend(const step_graphex& g, double extra_mass) {
  require_valid(g);
  if (!(extra_mass >= 0.0)) throw std::invalid_argument("trivially_extend: negative mass");
  step_graphex out = g;
  out.isolated_mass += extra_mass;
  return out;
}

// Replace atom i by copies with the given masses and identical rows; every
// functional of the graphex is invariant under this refinement.
inline step_graphex split_atom_masses(const step_graphex& g, std::size_t i,
                                      const std::vector<double>& pieces) {
  require_valid(g);
  if (i >= g.size()) throw std::invalid_argument("split_atom: index out of range");
  if (pieces.empty()) throw std::invalid_argument("split_atom: need at least one piece");
  double sum = 0.0;
  for (double p : pieces) {
    if (!(p > 0.0)) throw std::invalid_argument("split_atom: piece masses must be positive");
    sum += p;
  }
  if (std::abs(sum - g.masses[i]) > 1e-9 * std::max(1.0, g.masses[i]))
    throw std::invalid_argument("split_atom: pieces must sum to the atom mass");
  const std::size_t m = g.size();
  std::vector<std::size_t> src;
  src.reserve(m + pieces.size() - 1);
  for (std::size_t a = 0; a < m; ++a) {
    if (a == i)
      src.insert(src.end(), pieces.size(), i);
    else
      src.push_back(a);
  }
  step_graphex out = detail::take_atoms(g, src);
  std::size_t next = 0;
  for (std::size_t a = 0; a < src.size(); ++a)
    if (src[a] == i) out.masses[a] = pieces[next++];
  return out;
}

inline step_graphex split_atom(const step_graphex& g, std::size_t i, std::size_t k) {
  if (k < 1) throw std::invalid_argument("split_atom: need k >= 1");
  if (i >= g.size()) throw std::invalid_argument("split_atom: index out of range");
  // Repeated halving keeps every piece an exact binary share of the mass, so
  // the true total stays representable and a later merge recovers it bitwise.
  std::vector<double> pieces{g.masses[i]};
  while (pieces.size() < k) {
    auto big = std::max_element(pieces.begin(), pieces.end());
    *big *= 0.5;
    pieces.push_back(*big);
  }
  return split_atom_masses(g, i, pieces);
}

} // namespace graphex
