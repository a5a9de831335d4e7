#pragma once

// Distances between step graphexes.
//
//  d22                same-space distance: max of kernel norm of the graphon
//                     difference, sqrt of the L2 marginal gap, cbrt of the edge
//                     density gap. d_jbl is the analogous set-norm metric with
//                     no roots.
//  optimize_coupling  upper-bounds the coupling infimum by searching transport
//                     plans between the two atom sets, with trivial-extension
//                     slack on both sides. Exhaustive over permutation couplings
//                     after common equal-mass refinement when that stays small,
//                     random-restart local search over rectangle mass shifts
//                     otherwise. Every returned value is realized by an explicit
//                     coupling, hence a certified upper bound.
//  delta_gp_estimate  weak kernel metric upper bound: sweep degree truncations,
//                     charge the removed mass at sqrt(r), couple the rest. Each
//                     row also tries equalizing edge densities by down-weighting
//                     the denser side (a sub-measure move the metric's definition
//                     allows), which trades the cube-root density term for a
//                     sqrt-of-removal term.
//  delta_gp_lower_bound  rigorous lower bound from the edge-density gap.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphex/core.hpp"
#include "graphex/norms.hpp"
#include "graphex/rng.hpp"

namespace graphex {

struct distance_breakdown {
  double kernel_component = 0.0;
  double marginal_l2_component = 0.0; // the L2 norm itself, pre-root
  double density_gap_component = 0.0;
  double d22 = 0.0;
  double d_jbl = 0.0;
};

namespace detail {

// Relative noise floor on the density gap: refinement twins accumulate a few
// ulps of drift in rho, and the cube root would amplify that to ~1e-5.
inline double density_gap(const step_graphex& a, const step_graphex& b) {
  const double ra = edge_density(a), rb = edge_density(b);
  const double gap = std::abs(ra - rb);
  const double scale = std::max({1.0, std::abs(ra), std::abs(rb)});
  return gap <= 1e-10 * scale ? 0.0 : gap;
}

inline void require_same_masses(const step_graphex& a, const step_graphex& b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance: atom counts differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, a.masses[i], b.masses[i]});
    if (std::abs(a.masses[i] - b.masses[i]) > 1e-12 * scale)
      throw std::invalid_argument("distance: masses differ");
  }
}

} // namespace detail

inline distance_breakdown d22(const step_graphex& a, const step_graphex& b,
                              const set_norm_options& jumble_opts = {}) {
  require_valid(a);
  require_valid(b);
  detail::require_same_masses(a, b);
  const std::size_t m = a.size();
  step_function_2d dw{a.masses, {}};
  dw.values.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) dw.values[i][j] = a.graphon[i][j] - b.graphon[i][j];
  const auto pa = marginal(a), pb = marginal(b);
  step_function_1d dd{a.masses, {}};
  dd.values.resize(m);
  for (std::size_t i = 0; i < m; ++i) dd.values[i] = pa.values[i] - pb.values[i];

  distance_breakdown out;
  out.kernel_component = kernel_norm(dw);
  out.marginal_l2_component = l2_norm(dd);
  out.density_gap_component = detail::density_gap(a, b);
  out.d22 = std::max({out.kernel_component, std::sqrt(out.marginal_l2_component),
                      std::cbrt(out.density_gap_component)});
  const double jw = m == 0 ? 0.0 : bilinear_set_norm(dw, set_norm_kind::jumble, jumble_opts).value;
  const double jd = m == 0 ? 0.0 : bilinear_set_norm(dd, set_norm_kind::jumble, jumble_opts).value;
  out.d_jbl = std::max({jw, jd, out.density_gap_component});
  return out;
}

// Transport plan between the two atom sets, each extended by one slack atom
// (trivial extension, where graphon and star vanish).
struct coupling {
  std::vector<std::vector<double>> matrix; // (m1+1) x (m2+1)
  std::vector<double> row_targets;         // masses of g1 then slack mass E1
  std::vector<double> col_targets;         // masses of g2 then slack mass E2
};

inline std::vector<std::string> validate(const coupling& c, double tol = 1e-9) {
  std::vector<std::string> report;
  const std::size_t r = c.row_targets.size(), s = c.col_targets.size();
  if (c.matrix.size() != r) { report.push_back("shape"); return report; }
  for (const auto& row : c.matrix)
    if (row.size() != s) { report.push_back("shape"); return report; }
  for (const auto& row : c.matrix)
    for (double v : row)
      if (v < -tol) { report.push_back("nonnegativity"); break; }
  for (std::size_t i = 0; i < r; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < s; ++j) sum += c.matrix[i][j];
    if (std::abs(sum - c.row_targets[i]) > tol) { report.push_back("row sums"); break; }
  }
  for (std::size_t j = 0; j < s; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < r; ++i) sum += c.matrix[i][j];
    if (std::abs(sum - c.col_targets[j]) > tol) { report.push_back("column sums"); break; }
  }
  const double tr = std::accumulate(c.row_targets.begin(), c.row_targets.end(), 0.0);
  const double tc = std::accumulate(c.col_targets.begin(), c.col_targets.end(), 0.0);
  if (std::abs(tr - tc) > tol) report.push_back("total balance");
  return report;
}

enum class coupling_objective { d22, kernel };

struct coupling_opts {
  int restarts = 50;            // local-search restarts (first few are deterministic starts)
  int max_moves = 400;          // objective evaluations per restart
  std::size_t perm_atoms_cap = 8;
  double eval_tol = 1e-5;       // spectral tolerance during search; final values are exact
  coupling_objective objective = coupling_objective::d22;
  std::uint64_t seed = 0;
};

struct coupling_result {
  coupling nu;
  distance_breakdown breakdown; // of the pullback pair under nu
  double certificate = 0.0;     // objective value: upper bound on the coupling infimum
  bool exhaustive = false;      // true when the permutation oracle ran
  bool exhausted = false;       // local search stopped on budget while still improving
};

namespace detail {

struct coupling_context {
  const step_graphex* a;
  const step_graphex* b;
  std::vector<double> da, db; // marginals per atom
  double gap = 0.0;           // density gap with noise floor, coupling invariant
};

inline coupling_context make_context(const step_graphex& a, const step_graphex& b) {
  coupling_context ctx;
  ctx.a = &a;
  ctx.b = &b;
  ctx.da = marginal(a).values;
  ctx.db = marginal(b).values;
  ctx.gap = density_gap(a, b);
  return ctx;
}

struct pullback {
  step_function_2d dw; // graphon difference over coupling cells
  step_function_1d dd; // marginal difference over coupling cells
};

inline pullback build_pullback(const coupling_context& ctx,
                               const std::vector<std::vector<double>>& nu, double cell_tol) {
  const std::size_t m1 = ctx.a->size(), m2 = ctx.b->size();
  std::vector<std::array<std::size_t, 2>> cells;
  std::vector<double> mass;
  for (std::size_t i = 0; i <= m1; ++i)
    for (std::size_t j = 0; j <= m2; ++j)
      if (nu[i][j] > cell_tol) {
        cells.push_back({i, j});
        mass.push_back(nu[i][j]);
      }
  const std::size_t n = cells.size();
  pullback p;
  p.dw.masses = mass;
  p.dd.masses = mass;
  p.dw.values.assign(n, std::vector<double>(n, 0.0));
  p.dd.values.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto [i, j] = cells[c];
    p.dd.values[c] = (i < m1 ? ctx.da[i] : 0.0) - (j < m2 ? ctx.db[j] : 0.0);
    for (std::size_t d = 0; d < n; ++d) {
      const auto [i2, j2] = cells[d];
      const double w1 = (i < m1 && i2 < m1) ? ctx.a->graphon[i][i2] : 0.0;
      const double w2 = (j < m2 && j2 < m2) ? ctx.b->graphon[j][j2] : 0.0;
      p.dw.values[c][d] = w1 - w2;
    }
  }
  return p;
}

inline double coupling_objective_value(const coupling_context& ctx,
                                       const std::vector<std::vector<double>>& nu,
                                       coupling_objective obj, double eval_tol,
                                       double cell_tol) {
  const pullback p = build_pullback(ctx, nu, cell_tol);
  const double kernel = kernel_norm_estimate(p.dw, eval_tol);
  if (obj == coupling_objective::kernel) return kernel;
  return std::max({kernel, std::sqrt(l2_norm(p.dd)), std::cbrt(ctx.gap)});
}

// Northwest-corner plan for the given target orders; always feasible.
inline std::vector<std::vector<double>> northwest_plan(const std::vector<double>& rows,
                                                       const std::vector<double>& cols,
                                                       const std::vector<std::size_t>& row_order,
                                                       const std::vector<std::size_t>& col_order) {
  std::vector<std::vector<double>> nu(rows.size(), std::vector<double>(cols.size(), 0.0));
  std::vector<double> rleft = rows, cleft = cols;
  std::size_t i = 0, j = 0;
  while (i < rows.size() && j < cols.size()) {
    const std::size_t r = row_order[i], c = col_order[j];
    const double t = std::min(rleft[r], cleft[c]);
    nu[r][c] += t;
    rleft[r] -= t;
    cleft[c] -= t;
    if (rleft[r] <= cleft[c])
      ++i;
    else
      ++j;
  }
  return nu;
}

inline double approx_gcd(std::vector<double> values, double tol) {
  double g = 0.0;
  for (double v : values) {
    if (v <= tol) continue;
    double x = g, y = v;
    if (x == 0.0) { g = y; continue; }
    while (y > tol) {
      const double r = std::fmod(x, y);
      x = y;
      y = r;
    }
    g = x;
  }
  return g;
}

// Exactly-equal fiber quotient plus removal of zero-marginal atoms: the result
// is a pullback twin of the input, so any distance computed on quotients is a
// distance of the originals. Values are taken from class representatives.
inline step_graphex exact_quotient(const step_graphex& g) {
  require_valid(g);
  const std::size_t m = g.size();
  std::vector<std::size_t> keep;
  double dropped = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    bool zero = g.star[i] == 0.0;
    for (std::size_t j = 0; j < m && zero; ++j)
      if (g.graphon[i][j] != 0.0) zero = false;
    if (zero)
      dropped += g.masses[i];
    else
      keep.push_back(i);
  }
  step_graphex base = detail::take_atoms(g, keep);
  base.isolated_mass += dropped;
  const std::size_t n = base.size();
  std::vector<std::size_t> cls(n);
  std::iota(cls.begin(), cls.end(), 0);
  auto same_fiber = [&](std::size_t i, std::size_t j) {
    if (base.star[i] != base.star[j]) return false;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i || k == j) continue;
      if (base.graphon[i][k] != base.graphon[j][k]) return false;
    }
    return base.graphon[i][i] == base.graphon[j][i] && base.graphon[i][j] == base.graphon[j][j];
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (cls[i] != i) continue;
    for (std::size_t j = i + 1; j < n; ++j)
      if (cls[j] == j && same_fiber(i, j)) cls[j] = i;
  }
  std::vector<std::size_t> reps;
  std::vector<long long> rep_index(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    if (cls[i] == i) {
      rep_index[i] = static_cast<long long>(reps.size());
      reps.push_back(i);
    }
  step_graphex out;
  out.signed_mode = base.signed_mode;
  out.dust = base.dust;
  out.isolated_mass = base.isolated_mass;
  out.masses.assign(reps.size(), 0.0);
  out.star.resize(reps.size());
  out.graphon.assign(reps.size(), std::vector<double>(reps.size(), 0.0));
  for (std::size_t i = 0; i < n; ++i)
    out.masses[static_cast<std::size_t>(rep_index[cls[i]])] += base.masses[i];
  for (std::size_t a = 0; a < reps.size(); ++a) {
    out.star[a] = base.star[reps[a]];
    for (std::size_t b = 0; b < reps.size(); ++b) out.graphon[a][b] = base.graphon[reps[a]][reps[b]];
  }
  return out;
}

} // namespace detail

// Full-precision breakdown of the pullback pair under an explicit coupling.
inline distance_breakdown coupling_distance(const step_graphex& a, const step_graphex& b,
                                            const coupling& nu,
                                            const set_norm_options& jumble_opts = {}) {
  require_valid(a);
  require_valid(b);
  const auto report = validate(nu);
  if (!report.empty()) throw std::invalid_argument("coupling_distance: invalid coupling: " + report.front());
  const auto ctx = detail::make_context(a, b);
  const double total = std::accumulate(nu.row_targets.begin(), nu.row_targets.end(), 0.0);
  const auto p = detail::build_pullback(ctx, nu.matrix, 1e-15 * std::max(1.0, total));
  distance_breakdown out;
  out.kernel_component = p.dw.masses.empty() ? 0.0 : kernel_norm(p.dw);
  out.marginal_l2_component = p.dd.masses.empty() ? 0.0 : l2_norm(p.dd);
  out.density_gap_component = ctx.gap;
  out.d22 = std::max({out.kernel_component, std::sqrt(out.marginal_l2_component),
                      std::cbrt(out.density_gap_component)});
  const double jw = p.dw.masses.empty() ? 0.0
                                        : bilinear_set_norm(p.dw, set_norm_kind::jumble, jumble_opts).value;
  const double jd = p.dd.masses.empty() ? 0.0
                                        : bilinear_set_norm(p.dd, set_norm_kind::jumble, jumble_opts).value;
  out.d_jbl = std::max({jw, jd, out.density_gap_component});
  return out;
}

inline coupling_result optimize_coupling(const step_graphex& a, const step_graphex& b,
                                         double slack_mass, const coupling_opts& opts = {},
                                         const coupling* warm_start = nullptr) {
  require_valid(a);
  require_valid(b);
  if (!(slack_mass >= 0.0)) throw std::invalid_argument("optimize_coupling: negative slack");
  const std::size_t m1 = a.size(), m2 = b.size();
  const double t1 = total_mass(a), t2 = total_mass(b);
  const double target = std::max(t1, t2) + slack_mass;
  const double e1 = target - t1, e2 = target - t2;
  std::vector<double> rows = a.masses, cols = b.masses;
  rows.push_back(e1);
  cols.push_back(e2);
  const auto ctx = detail::make_context(a, b);
  const double cell_tol = 1e-15 * std::max(1.0, target);

  coupling_result best;
  best.nu.row_targets = rows;
  best.nu.col_targets = cols;
  double best_obj = infinity;

  // Embed a caller-provided plan (typically the winner at a smaller slack) by
  // topping up the slack corner; kept as an exact-scored fallback below.
  std::vector<std::vector<double>> warm_nu;
  if (warm_start != nullptr && warm_start->matrix.size() == m1 + 1) {
    bool shape_ok = true;
    for (const auto& row : warm_start->matrix)
      if (row.size() != m2 + 1) shape_ok = false;
    if (shape_ok) {
      warm_nu = warm_start->matrix;
      double carried = 0.0;
      for (const auto& row : warm_nu)
        for (double v : row) carried += v;
      warm_nu[m1][m2] += target - carried;
      if (warm_nu[m1][m2] < -1e-9) warm_nu.clear();
    }
  }

  // Permutation oracle after common equal-mass refinement.
  {
    std::vector<double> all;
    for (double v : rows) all.push_back(v);
    for (double v : cols) all.push_back(v);
    const double g = detail::approx_gcd(all, 1e-9 * std::max(1.0, target));
    bool ok = g > 0.0 && target / g <= static_cast<double>(opts.perm_atoms_cap) + 0.5;
    std::vector<std::size_t> parent1, parent2;
    if (ok) {
      auto expand = [&](const std::vector<double>& ms, std::vector<std::size_t>& parent) {
        for (std::size_t i = 0; i < ms.size() && ok; ++i) {
          if (ms[i] <= 1e-12 * std::max(1.0, target)) continue;
          const double q = ms[i] / g;
          const double r = std::round(q);
          if (std::abs(q - r) > 1e-6)
            ok = false;
          else
            parent.insert(parent.end(), static_cast<std::size_t>(r), i);
        }
      };
      expand(rows, parent1);
      expand(cols, parent2);
      if (parent1.size() != parent2.size()) ok = false;
    }
    if (ok && !parent1.empty()) {
      const std::size_t k = parent1.size();
      std::vector<std::size_t> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      std::map<std::vector<long long>, bool> seen;
      do {
        std::vector<std::vector<double>> nu(m1 + 1, std::vector<double>(m2 + 1, 0.0));
        for (std::size_t p = 0; p < k; ++p) nu[parent1[p]][parent2[perm[p]]] += g;
        std::vector<long long> key;
        key.reserve((m1 + 1) * (m2 + 1));
        for (const auto& row : nu)
          for (double v : row) key.push_back(std::llround(v / g));
        if (!seen.emplace(std::move(key), true).second) continue;
        const double obj =
            detail::coupling_objective_value(ctx, nu, opts.objective, 1e-10, cell_tol);
        if (obj < best_obj) {
          best_obj = obj;
          best.nu.matrix = nu;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      best.exhaustive = true;
    }
  }

  if (!best.exhaustive) {
    rng root(opts.seed);
    std::vector<std::size_t> row_id(m1 + 1), col_id(m2 + 1);
    std::iota(row_id.begin(), row_id.end(), 0);
    std::iota(col_id.begin(), col_id.end(), 0);

    std::vector<std::vector<std::vector<double>>> starts;
    { // independent product plan
      std::vector<std::vector<double>> nu(m1 + 1, std::vector<double>(m2 + 1, 0.0));
      if (target > 0.0)
        for (std::size_t i = 0; i <= m1; ++i)
          for (std::size_t j = 0; j <= m2; ++j) nu[i][j] = rows[i] * cols[j] / target;
      starts.push_back(std::move(nu));
    }
    starts.push_back(detail::northwest_plan(rows, cols, row_id, col_id));
    { // align by marginal value, largest first; pairs similar degrees together
      std::vector<std::size_t> ro = row_id, co = col_id;
      std::sort(ro.begin(), ro.end(), [&](std::size_t x, std::size_t y) {
        const double dx = x < m1 ? ctx.da[x] : 0.0, dy = y < m1 ? ctx.da[y] : 0.0;
        if (dx != dy) return dx > dy;
        return x < y;
      });
      std::sort(co.begin(), co.end(), [&](std::size_t x, std::size_t y) {
        const double dx = x < m2 ? ctx.db[x] : 0.0, dy = y < m2 ? ctx.db[y] : 0.0;
        if (dx != dy) return dx > dy;
        return x < y;
      });
      starts.push_back(detail::northwest_plan(rows, cols, ro, co));
    }
    if (e2 >= t1 - 1e-12 && e1 >= t2 - 1e-12) {
      // swap-through-slack plan: all real mass meets the other side's slack,
      // so the pullback difference is block diagonal in the two graphons
      std::vector<std::vector<double>> nu(m1 + 1, std::vector<double>(m2 + 1, 0.0));
      for (std::size_t i = 0; i < m1; ++i) nu[i][m2] = rows[i];
      for (std::size_t j = 0; j < m2; ++j) nu[m1][j] = cols[j];
      nu[m1][m2] = e1 - t2; // remainder stays slack-to-slack
      starts.push_back(std::move(nu));
    }
    if (!warm_nu.empty()) starts.push_back(warm_nu);

    const int total_restarts = std::max<int>(opts.restarts, static_cast<int>(starts.size()));
    for (int r = 0; r < total_restarts; ++r) {
      rng stream = root.substream(static_cast<std::uint64_t>(r));
      std::vector<std::vector<double>> nu;
      if (r < static_cast<int>(starts.size())) {
        nu = starts[static_cast<std::size_t>(r)];
      } else {
        nu = starts[0];
        // randomized warp of the product plan
        for (int s = 0; s < 4 * static_cast<int>(m1 + m2); ++s) {
          const std::size_t i = static_cast<std::size_t>(stream.u01() * static_cast<double>(m1 + 1)) % (m1 + 1);
          const std::size_t i2 = static_cast<std::size_t>(stream.u01() * static_cast<double>(m1 + 1)) % (m1 + 1);
          const std::size_t j = static_cast<std::size_t>(stream.u01() * static_cast<double>(m2 + 1)) % (m2 + 1);
          const std::size_t j2 = static_cast<std::size_t>(stream.u01() * static_cast<double>(m2 + 1)) % (m2 + 1);
          if (i == i2 || j == j2) continue;
          const double d = std::min(nu[i][j], nu[i2][j2]) * stream.u01();
          nu[i][j] -= d;
          nu[i2][j2] -= d;
          nu[i][j2] += d;
          nu[i2][j] += d;
        }
      }
      double cur = detail::coupling_objective_value(ctx, nu, opts.objective, opts.eval_tol, cell_tol);
      if (cur < best_obj) { best_obj = cur; best.nu.matrix = nu; }
      int evals = 1;
      int stale = 0;
      while (evals < opts.max_moves && stale < 60) {
        const std::size_t i = static_cast<std::size_t>(stream.u01() * static_cast<double>(m1 + 1)) % (m1 + 1);
        const std::size_t i2 = static_cast<std::size_t>(stream.u01() * static_cast<double>(m1 + 1)) % (m1 + 1);
        const std::size_t j = static_cast<std::size_t>(stream.u01() * static_cast<double>(m2 + 1)) % (m2 + 1);
        const std::size_t j2 = static_cast<std::size_t>(stream.u01() * static_cast<double>(m2 + 1)) % (m2 + 1);
        if (i == i2 || j == j2) { ++stale; continue; }
        const double cap = std::min(nu[i][j], nu[i2][j2]);
        if (cap <= cell_tol) { ++stale; continue; }
        bool improved = false;
        for (double d = cap; d > cap / 16.0 && evals < opts.max_moves; d /= 2.0) {
          nu[i][j] -= d;
          nu[i2][j2] -= d;
          nu[i][j2] += d;
          nu[i2][j] += d;
          const double val =
              detail::coupling_objective_value(ctx, nu, opts.objective, opts.eval_tol, cell_tol);
          ++evals;
          if (val < cur - 1e-12) {
            cur = val;
            improved = true;
            break;
          }
          nu[i][j] += d;
          nu[i2][j2] += d;
          nu[i][j2] -= d;
          nu[i2][j] -= d;
        }
        if (improved) {
          stale = 0;
          if (cur < best_obj) { best_obj = cur; best.nu.matrix = nu; }
        } else {
          ++stale;
        }
      }
      if (evals >= opts.max_moves) best.exhausted = true;
    }
  }

  const set_norm_options jopts{set_norm_mode::automatic, 20, 14, 24,
                               rng(opts.seed).substream(0xD15).next_u64()};
  auto score = [&](const std::vector<std::vector<double>>& nu) {
    coupling c{nu, rows, cols};
    distance_breakdown bd = coupling_distance(a, b, c, jopts);
    const double cert = opts.objective == coupling_objective::kernel ? bd.kernel_component : bd.d22;
    return std::pair<distance_breakdown, double>(bd, cert);
  };
  auto [bd, cert] = score(best.nu.matrix);
  best.breakdown = bd;
  best.certificate = cert;
  if (!warm_nu.empty()) {
    auto [wbd, wcert] = score(warm_nu);
    if (wcert < best.certificate) {
      best.nu.matrix = warm_nu;
      best.breakdown = wbd;
      best.certificate = wcert;
    }
  }
  return best;
}

// Default slack policy: twice the larger total, doubled until the certificate
// stops improving by 1e-6. The previous plan warm-starts the next round, so
// certificates are monotone in slack by construction.
inline coupling_result optimize_coupling_auto(const step_graphex& a, const step_graphex& b,
                                              const coupling_opts& opts = {}) {
  double slack = 2.0 * std::max({total_mass(a), total_mass(b), 0.5});
  coupling_result best = optimize_coupling(a, b, slack, opts);
  for (int round = 0; round < 6; ++round) {
    slack *= 2.0;
    coupling_result next = optimize_coupling(a, b, slack, opts, &best.nu);
    const double improvement = best.certificate - next.certificate;
    if (next.certificate < best.certificate) best = next;
    if (improvement < 1e-6) break;
  }
  return best;
}

namespace detail {

struct density_trim {
  step_graphex g;
  double removed = 0.0;
  bool feasible = true;
};

// Down-weight toward a target edge density by removing mass from the
// highest-degree atoms: full atoms greedily, then one fractional atom solved
// exactly. The scaled measure is a valid sub-measure for the weak kernel
// metric, so the removed mass is chargeable at sqrt(r) like truncation.
inline density_trim trim_to_density(const step_graphex& g, double target) {
  density_trim out{g, 0.0, true};
  double rho = edge_density(g);
  if (target >= rho || rho - target <= 1e-13 * std::max(1.0, rho)) return out;
  const std::size_t m = g.size();
  std::vector<double> deg_w(m, 0.0); // graphon row integral over the live set
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) deg_w[i] += g.masses[j] * g.graphon[i][j];
  std::vector<bool> alive(m, true);
  std::vector<double> scale(m, 1.0);
  while (true) {
    std::size_t a = m;
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!alive[i]) continue;
      const double d = deg_w[i] + g.star[i];
      if (a == m || d > best) {
        a = i;
        best = d;
      }
    }
    if (a == m || !(best > 0.0)) {
      out.feasible = false; // residual density is dust-bound, not removable
      return out;
    }
    const double ma = g.masses[a];
    const double drop = 2.0 * ma * (deg_w[a] + g.star[a]) - ma * ma * g.graphon[a][a];
    if (rho - drop > target) {
      alive[a] = false;
      out.removed += ma;
      rho -= drop;
      for (std::size_t j = 0; j < m; ++j)
        if (alive[j]) deg_w[j] -= ma * g.graphon[a][j];
      continue;
    }
    // keep fraction f of atom a: rho(f) = base + bf + cf^2, increasing on [0,1]
    const double base = rho - drop;
    const double b = 2.0 * ma * (deg_w[a] - ma * g.graphon[a][a] + g.star[a]);
    const double c = ma * ma * g.graphon[a][a];
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double f = 0.5 * (lo + hi);
      (base + b * f + c * f * f < target ? lo : hi) = f;
    }
    const double f = 0.5 * (lo + hi);
    scale[a] = f;
    out.removed += (1.0 - f) * ma;
    break;
  }
  std::vector<std::size_t> keep;
  keep.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    if (alive[i] && scale[i] > 0.0) keep.push_back(i);
  out.g = take_atoms(g, keep);
  for (std::size_t k = 0; k < keep.size(); ++k) out.g.masses[k] *= scale[keep[k]];
  return out;
}

} // namespace detail

struct delta_gp_row {
  double degree_bound = 0.0;
  double removed_mass = 0.0;
  double equalized_mass = 0.0; // down-weighted beyond truncation, denser side
  double coupling_certificate = 0.0;
  double value = 0.0; // max(sqrt(removed), certificate)
};

struct delta_gp_result {
  double value = 0.0;
  double best_degree_bound = 0.0;
  std::vector<delta_gp_row> rows;
  coupling_result best_coupling;
};

inline delta_gp_result delta_gp_estimate(const step_graphex& a, const step_graphex& b,
                                         const std::vector<double>& degree_grid,
                                         const coupling_opts& opts = {}) {
  require_valid(a);
  require_valid(b);
  if (a.signed_mode || b.signed_mode)
    throw std::invalid_argument("delta_gp_estimate: unsigned graphexes only");
  if (degree_grid.empty()) throw std::invalid_argument("delta_gp_estimate: empty degree grid");
  const step_graphex qa = detail::exact_quotient(a);
  const step_graphex qb = detail::exact_quotient(b);
  std::vector<double> grid = degree_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  delta_gp_result out;
  out.value = infinity;
  std::uint64_t row_id = 0;
  for (double d : grid) {
    if (!(d > 0.0)) throw std::domain_error("delta_gp_estimate: degree bounds must be positive");
    auto [ta, ra] = truncate_by_degree(qa, d);
    auto [tb, rb] = truncate_by_degree(qb, d);
    coupling_opts local = opts;
    local.seed = rng(opts.seed).substream(row_id++).next_u64();
    delta_gp_row row;
    row.degree_bound = d;
    row.removed_mass = std::max(ra, rb);
    coupling_result best_cr = optimize_coupling_auto(ta, tb, local);
    row.coupling_certificate = best_cr.certificate;
    row.value = std::max(std::sqrt(row.removed_mass), best_cr.certificate);
    if (detail::density_gap(ta, tb) > 0.0) {
      // Second variant: equalize edge densities by down-weighting the denser
      // side, killing the cbrt term at sqrt cost on the extra removal.
      const double rho_a = edge_density(ta), rho_b = edge_density(tb);
      const bool a_denser = rho_a > rho_b;
      const auto trim = detail::trim_to_density(a_denser ? ta : tb, std::min(rho_a, rho_b));
      if (trim.feasible && trim.removed > 0.0) {
        coupling_opts eq_opts = local;
        eq_opts.seed = rng(local.seed).substream(0xE9).next_u64();
        const coupling_result eq_cr = a_denser ? optimize_coupling_auto(trim.g, tb, eq_opts)
                                               : optimize_coupling_auto(ta, trim.g, eq_opts);
        const double r_eq =
            std::max(ra + (a_denser ? trim.removed : 0.0), rb + (a_denser ? 0.0 : trim.removed));
        const double v_eq = std::max(std::sqrt(r_eq), eq_cr.certificate);
        if (v_eq < row.value) {
          row.value = v_eq;
          row.removed_mass = r_eq;
          row.equalized_mass = trim.removed;
          row.coupling_certificate = eq_cr.certificate;
          best_cr = eq_cr;
        }
      }
    }
    if (row.value < out.value) {
      out.value = row.value;
      out.best_degree_bound = d;
      out.best_coupling = best_cr;
    }
    out.rows.push_back(row);
  }
  return out;
}

// Unique eps >= 0 with eps^3 + 4 eps^2 D = |rho1 - rho2|; any weak-kernel
// distance below this is impossible when both marginals stay within D.
inline double delta_gp_lower_bound(const step_graphex& a, const step_graphex& b, double degree_bound) {
  require_valid(a);
  require_valid(b);
  if (a.signed_mode || b.signed_mode)
    throw std::invalid_argument("delta_gp_lower_bound: unsigned graphexes only");
  if (!(degree_bound >= 0.0)) throw std::domain_error("delta_gp_lower_bound: negative degree bound");
  const double gap = detail::density_gap(a, b);
  if (gap == 0.0) return 0.0;
  auto f = [&](double e) { return e * e * e + 4.0 * e * e * degree_bound; };
  double lo = 0.0, hi = std::max(1.0, std::cbrt(gap));
  while (f(hi) < gap) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < gap)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Grid of candidate truncation levels spanning both marginal ranges. Distinct
// atom degrees plus the midpoints between them, so every achievable truncation
// set appears; thinned evenly when the pool is large.
inline std::vector<double> default_degree_grid(const step_graphex& a, const step_graphex& b) {
  std::vector<double> degrees;
  for (const step_graphex* g : {&a, &b}) {
    if (g->size() == 0) continue;
    const auto prof = marginal(*g);
    for (double v : prof.values)
      if (v > 0.0) degrees.push_back(v);
  }
  if (degrees.empty()) return {1.0};
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  std::vector<double> grid;
  grid.reserve(2 * degrees.size());
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    grid.push_back(degrees[i]);
    if (i + 1 < degrees.size()) grid.push_back(0.5 * (degrees[i] + degrees[i + 1]));
  }
  constexpr std::size_t cap = 33;
  if (grid.size() > cap) {
    std::vector<double> thin;
    thin.reserve(cap);
    for (std::size_t k = 0; k < cap; ++k)
      thin.push_back(grid[(k * (grid.size() - 1)) / (cap - 1)]);
    thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
    grid = std::move(thin);
  }
  grid.push_back(degrees.back() + 1.0);
  return grid;
}

} // namespace graphex
