#pragma once

// Canonical form for step graphexes: restrict to the degree support, merge
// atoms with identical (graphon row, star) profiles, and order the result by
// iterative color refinement with individualization on ties. Two graphexes
// are equivalent when their canonical forms match atom by atom; the isolated
// mass never participates.
//
// Exactly-equal fibers merge bitwise (the canonical form pulls back to the
// input byte for byte); fibers that agree only within tol merge to the
// mass-weighted average, so the pullback then reproduces the input within
// tol. Tolerance bucketing is not transitive; the exact pass runs first.

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "graphex/core.hpp"

namespace graphex {

struct canonical_result {
  step_graphex canonical;
  std::vector<long long> quotient; // input atom -> canonical atom, -1 if dropped
};

namespace detail {

// One round: key = (color, diagonal, multiset of colored off-diagonal row
// entries); new colors are ranks of sorted distinct keys.
inline std::vector<int> wl_colors(const step_graphex& g, std::vector<int> color) {
  const std::size_t m = g.size();
  while (true) {
    using row_key = std::tuple<int, double, std::vector<std::pair<int, double>>>;
    std::vector<row_key> keys(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      row.reserve(m - 1);
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) row.emplace_back(color[j], g.graphon[i][j]);
      std::sort(row.begin(), row.end());
      keys[i] = {color[i], g.graphon[i][i], std::move(row)};
    }
    std::vector<row_key> distinct = keys;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> next(m);
    for (std::size_t i = 0; i < m; ++i)
      next[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), keys[i]) -
                                 distinct.begin());
    if (next == color) return color;
    const auto classes = [](const std::vector<int>& c) {
      return std::set<int>(c.begin(), c.end()).size();
    };
    const bool progressed = classes(next) > classes(color);
    color = std::move(next);
    if (!progressed) return color;
  }
}

// Atom sequence in a fixed order, for lexicographic comparison of orderings.
inline std::vector<double> order_signature(const step_graphex& g,
                                           const std::vector<std::size_t>& order) {
  std::vector<double> sig;
  sig.reserve(order.size() * (order.size() + 2));
  for (std::size_t i : order) {
    sig.push_back(g.masses[i]);
    sig.push_back(g.star[i]);
  }
  for (std::size_t i : order)
    for (std::size_t j : order) sig.push_back(g.graphon[i][j]);
  return sig;
}

inline void canonical_order_search(const step_graphex& g, std::vector<int> color,
                                   std::vector<std::size_t>& best_order,
                                   std::vector<double>& best_sig) {
  color = wl_colors(g, std::move(color));
  const std::size_t m = g.size();
  // Smallest color class with a tie; none means the order is decided.
  int tie_color = -1;
  std::size_t tie_size = 0;
  for (int c = 0;; ++c) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (color[i] == c) ++count;
    if (count == 0) break;
    if (count > 1) {
      tie_color = c;
      tie_size = count;
      break;
    }
  }
  if (tie_color < 0) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return color[a] < color[b]; });
    auto sig = order_signature(g, order);
    if (best_sig.empty() || sig < best_sig) {
      best_sig = std::move(sig);
      best_order = std::move(order);
    }
    return;
  }
  (void)tie_size;
  for (std::size_t pick = 0; pick < m; ++pick) {
    if (color[pick] != tie_color) continue;
    std::vector<int> split(m);
    for (std::size_t i = 0; i < m; ++i) {
      split[i] = 2 * color[i];
      if (color[i] == tie_color && i != pick) split[i] += 1;
    }
    canonical_order_search(g, split, best_order, best_sig);
  }
}

inline std::vector<std::size_t> canonical_order(const step_graphex& g) {
  const std::size_t m = g.size();
  if (m == 0) return {};
  const auto d = marginal(g).values;
  using init_key = std::tuple<double, double, double>;
  std::vector<init_key> keys(m);
  for (std::size_t i = 0; i < m; ++i) keys[i] = {d[i], g.masses[i], g.star[i]};
  std::vector<init_key> distinct = keys;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> color(m);
  for (std::size_t i = 0; i < m; ++i)
    color[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), keys[i]) -
                                distinct.begin());
  std::vector<std::size_t> best_order;
  std::vector<double> best_sig;
  canonical_order_search(g, color, best_order, best_sig);
  return best_order;
}

inline bool same_fiber_within(const step_graphex& g, std::size_t i, std::size_t j, double tol) {
  if (std::abs(g.star[i] - g.star[j]) > tol) return false;
  if (std::abs(g.graphon[i][i] - g.graphon[i][j]) > tol) return false;
  if (std::abs(g.graphon[i][j] - g.graphon[j][j]) > tol) return false;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k == i || k == j) continue;
    if (std::abs(g.graphon[i][k] - g.graphon[j][k]) > tol) return false;
  }
  return true;
}

} // namespace detail

inline canonical_result canonicalize(const step_graphex& g, double tol = 1e-9) {
  require_valid(g);
  if (g.signed_mode) throw std::invalid_argument("canonicalize: unsigned graphexes only");
  const std::size_t m = g.size();

  canonical_result out;
  out.quotient.assign(m, -1);
  double dropped_mass = 0.0;

  // Degree-support restriction: exact zero row and zero star.
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m; ++i) {
    bool zero = g.star[i] == 0.0;
    for (std::size_t j = 0; j < m && zero; ++j)
      if (g.graphon[i][j] != 0.0) zero = false;
    if (zero)
      dropped_mass += g.masses[i];
    else
      kept.push_back(i);
  }
  step_graphex live = detail::take_atoms(g, kept);
  live.isolated_mass = 0.0;

  // Fiber merge, exact matches first, then tolerance buckets against class
  // representatives.
  const std::size_t n = live.size();
  std::vector<std::size_t> cls(n);
  std::iota(cls.begin(), cls.end(), std::size_t{0});
  const auto find = [&](std::size_t i) {
    while (cls[i] != i) i = cls[i] = cls[cls[i]];
    return i;
  };
  for (int pass = 0; pass < 2; ++pass) {
    const double pass_tol = pass == 0 ? 0.0 : tol;
    for (std::size_t i = 0; i < n; ++i) {
      if (find(i) != i) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (find(j) != j) continue;
        if (detail::same_fiber_within(live, i, j, pass_tol)) cls[j] = i;
      }
    }
  }
  std::vector<long long> class_id(n, -1);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (class_id[r] < 0) {
      class_id[r] = static_cast<long long>(members.size());
      members.emplace_back();
    }
    class_id[i] = class_id[r];
    members[static_cast<std::size_t>(class_id[r])].push_back(i);
  }

  const std::size_t k = members.size();
  step_graphex merged;
  merged.masses.assign(k, 0.0);
  merged.graphon.assign(k, std::vector<double>(k, 0.0));
  merged.star.assign(k, 0.0);
  merged.dust = g.dust;
  // Extended-precision accumulation: when the members' true total is
  // representable (exact binary shares from split_atom), the merged mass
  // comes back bitwise whatever order the fiber arrived in.
  for (std::size_t a = 0; a < k; ++a) {
    long double acc = 0.0L;
    for (std::size_t i : members[a]) acc += live.masses[i];
    merged.masses[a] = static_cast<double>(acc);
  }
  const auto merge_values = [&](auto value_of, const std::vector<std::size_t>& idx,
                                double weight_total, auto weight_of) {
    // Bitwise-equal members keep the exact value; mixed members average.
    bool uniform = true;
    const double first = value_of(idx.front());
    for (std::size_t i : idx)
      if (value_of(i) != first) { uniform = false; break; }
    if (uniform) return first;
    double acc = 0.0;
    for (std::size_t i : idx) acc += weight_of(i) * value_of(i);
    return acc / weight_total;
  };
  for (std::size_t a = 0; a < k; ++a) {
    merged.star[a] =
        merge_values([&](std::size_t i) { return live.star[i]; }, members[a], merged.masses[a],
                     [&](std::size_t i) { return live.masses[i]; });
    for (std::size_t b = a; b < k; ++b) {
      bool uniform = true;
      const double first = live.graphon[members[a][0]][members[b][0]];
      double acc = 0.0, wtot = 0.0;
      for (std::size_t i : members[a])
        for (std::size_t j : members[b]) {
          const double v = live.graphon[i][j];
          if (v != first) uniform = false;
          const double w = live.masses[i] * live.masses[j];
          acc += w * v;
          wtot += w;
        }
      merged.graphon[a][b] = merged.graphon[b][a] = uniform ? first : acc / wtot;
    }
  }

  // Deterministic atom order.
  const auto order = detail::canonical_order(merged);
  std::vector<std::size_t> pos(k, 0);
  for (std::size_t p = 0; p < k; ++p) pos[order[p]] = p;

  out.canonical = detail::take_atoms(merged, order);
  out.canonical.dust = g.dust;
  out.canonical.isolated_mass = g.isolated_mass + dropped_mass;
  for (std::size_t t = 0; t < kept.size(); ++t)
    out.quotient[kept[t]] =
        static_cast<long long>(pos[static_cast<std::size_t>(class_id[t])]);
  return out;
}

struct equivalence_result {
  bool equal = false;
  std::string witness; // empty when equal
};

namespace detail {

// sup over thresholds of the tail-mass gap |mass{D1 > d} - mass{D2 > d}|,
// with the threshold achieving it; thresholds only need to range over the
// attained marginal values. The comparison smears the threshold by tol so
// that degrees within tol of each other land on the same side (a Levy-style
// gap rather than a raw Kolmogorov one).
inline std::pair<double, double> marginal_cdf_gap(const step_graphex& a, const step_graphex& b,
                                                  double tol = 0.0) {
  const auto da = marginal(a).values, db = marginal(b).values;
  std::vector<double> grid;
  for (double v : da) grid.push_back(v);
  for (double v : db) grid.push_back(v);
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const auto tail_mass = [](const step_graphex& g, const std::vector<double>& d, double thr) {
    double mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (d[i] > thr) mass += g.masses[i];
    return mass;
  };
  double worst = 0.0, at = 0.0;
  for (double thr : grid) {
    const double ta = tail_mass(a, da, thr + tol), tb = tail_mass(b, db, thr + tol);
    const double ta_lo = tail_mass(a, da, thr - tol), tb_lo = tail_mass(b, db, thr - tol);
    const double gap = std::max({0.0, ta - tb_lo, tb - ta_lo});
    if (gap > worst) { worst = gap; at = thr; }
  }
  return {worst, at};
}

inline bool rows_match(const step_graphex& a, const step_graphex& b,
                       const std::vector<long long>& map, std::size_t i, std::size_t bi,
                       double tol) {
  if (std::abs(a.masses[i] - b.masses[bi]) > tol * std::max(1.0, a.masses[i])) return false;
  if (std::abs(a.star[i] - b.star[bi]) > tol) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (map[j] < 0 || j > i) continue;
    const auto bj = static_cast<std::size_t>(map[j]);
    if (std::abs(a.graphon[i][j] - b.graphon[bi][bj]) > tol) return false;
  }
  return true;
}

inline bool find_bijection(const step_graphex& a, const step_graphex& b, std::size_t i,
                           std::vector<long long>& map, std::vector<char>& used, double tol) {
  if (i == a.size()) return true;
  for (std::size_t bi = 0; bi < b.size(); ++bi) {
    if (used[bi]) continue;
    map[i] = static_cast<long long>(bi);
    if (rows_match(a, b, map, i, bi, tol)) {
      used[bi] = 1;
      if (find_bijection(a, b, i + 1, map, used, tol)) return true;
      used[bi] = 0;
    }
    map[i] = -1;
  }
  return false;
}

} // namespace detail

inline equivalence_result equivalent(const step_graphex& g1, const step_graphex& g2,
                                     double tol = 1e-9) {
  const auto c1 = canonicalize(g1, tol).canonical;
  const auto c2 = canonicalize(g2, tol).canonical;
  equivalence_result res;

  if (std::abs(c1.dust - c2.dust) > tol) {
    res.witness = "dust mismatch: " + format_double(c1.dust) + " vs " + format_double(c2.dust);
    return res;
  }
  const double rho1 = edge_density(c1), rho2 = edge_density(c2);
  if (std::abs(rho1 - rho2) > tol * std::max(1.0, std::abs(rho1))) {
    res.witness = "edge density mismatch: " + format_double(rho1) + " vs " + format_double(rho2);
    return res;
  }
  const auto [cdf_gap, cdf_at] = detail::marginal_cdf_gap(c1, c2, tol);
  if (cdf_gap > tol) {
    res.witness = "marginal distribution mismatch at degree threshold " + format_double(cdf_at) +
                  " (tail masses differ by " + format_double(cdf_gap) + ")";
    return res;
  }
  if (c1.size() != c2.size()) {
    res.witness = "canonical atom counts differ: " + std::to_string(c1.size()) + " vs " +
                  std::to_string(c2.size());
    return res;
  }
  std::vector<long long> map(c1.size(), -1);
  std::vector<char> used(c2.size(), 0);
  if (!detail::find_bijection(c1, c2, 0, map, used, tol)) {
    res.witness = "no atom bijection matches masses, stars and graphon within tolerance";
    return res;
  }
  res.equal = true;
  return res;
}

} // namespace graphex
