#pragma once

// Empirical graphexes from finite graphs, the sampling-convergence experiment
// pipeline, the shared-cloud coupled sample distance, and the pure-graphon
// absorber approximation.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "graphex/core.hpp"
#include "graphex/distances.hpp"
#include "graphex/regularity.hpp"
#include "graphex/sampling.hpp"

namespace graphex {

// One atom of mass rho per vertex, graphon = adjacency matrix.
inline step_graphex empirical_graphex(const plain_graph& g, double rho) {
  if (!(rho > 0.0)) throw std::domain_error("empirical_graphex: rho must be positive");
  step_graphex out;
  out.masses.assign(g.n, rho);
  out.graphon.assign(g.n, std::vector<double>(g.n, 0.0));
  out.star.assign(g.n, 0.0);
  for (const auto& [u, v] : g.edges) {
    if (u >= g.n || v >= g.n)
      throw std::invalid_argument("empirical_graphex: edge endpoint out of range");
    if (u == v) continue;
    out.graphon[u][v] = out.graphon[v][u] = 1.0;
  }
  return out;
}

// rho = 1/sqrt(2|E|), normalizing the l1 norm to 1.
inline step_graphex stretched_empirical(const plain_graph& g) {
  if (g.edges.empty())
    throw std::invalid_argument("stretched_empirical: graph must have at least one edge");
  return empirical_graphex(g, 1.0 / std::sqrt(2.0 * static_cast<double>(g.edges.size())));
}

namespace detail {

inline coupling_opts experiment_coupling_defaults() {
  coupling_opts o;
  o.restarts = 4;
  o.max_moves = 100;
  return o;
}

} // namespace detail

struct experiment_config {
  int trials = 20;
  double rho_override = 0.0; // 0 means the canonical 1/T normalization
  std::size_t coarsen_above = 300;
  double coarsen_eps = 0.1;
  coupling_opts coupling = detail::experiment_coupling_defaults();
  std::vector<double> degree_grid; // empty: default grid per pair
  int workers = 1;
  std::uint64_t seed = 0;
};

struct experiment_row {
  double horizon = 0.0;
  int trial = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  double distance = 0.0;           // delta_gp upper estimate, coarsening allowance included
  double coarsen_allowance = 0.0;  // d22 certificate of the coarsening step, when applied
  bool coarsened = false;
  bool exhausted = false;          // coupling search hit its move budget while improving
};

struct experiment_summary {
  double horizon = 0.0;
  int trials = 0;
  double q25 = 0.0, median = 0.0, q75 = 0.0; // of the distance estimates
  double mean_edges = 0.0;
};

struct experiment_report {
  std::vector<experiment_row> rows; // ordered by (horizon index, trial)
  std::vector<experiment_summary> summary;
  std::uint64_t seed = 0;
};

namespace detail {

inline double nearest_rank(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(
      std::llround(q * static_cast<double>(sorted.size() - 1)));
  return sorted[std::min(idx, sorted.size() - 1)];
}

} // namespace detail

inline experiment_report convergence_experiment(const step_graphex& g,
                                                const std::vector<double>& t_list,
                                                const experiment_config& cfg = {}) {
  require_valid(g);
  if (g.signed_mode)
    throw std::invalid_argument("convergence_experiment: unsigned graphexes only");
  if (t_list.empty()) throw std::invalid_argument("convergence_experiment: empty horizon list");
  for (std::size_t i = 0; i + 1 < t_list.size(); ++i)
    if (!(t_list[i] < t_list[i + 1]))
      throw std::invalid_argument("convergence_experiment: horizons must increase");
  if (cfg.trials < 1) throw std::invalid_argument("convergence_experiment: need trials >= 1");

  experiment_report report;
  report.seed = cfg.seed;
  report.rows.resize(t_list.size() * static_cast<std::size_t>(cfg.trials));

  const rng root(cfg.seed);
  const auto run_cell = [&](std::size_t flat) {
    const std::size_t ti = flat / static_cast<std::size_t>(cfg.trials);
    const int trial = static_cast<int>(flat % static_cast<std::size_t>(cfg.trials));
    const double t = t_list[ti];
    const rng cell = root.substream(ti).substream(static_cast<std::uint64_t>(trial));

    const sampled_graph s = sample_process(g, t, cell.substream(0x01).next_u64());
    const plain_graph plain = to_plain(s);
    const double rho = cfg.rho_override > 0.0 ? cfg.rho_override : 1.0 / t;
    step_graphex emp = empirical_graphex(plain, rho);

    experiment_row row;
    row.horizon = t;
    row.trial = trial;
    row.vertices = plain.n;
    row.edges = plain.edges.size();

    if (emp.size() > cfg.coarsen_above) {
      double c_bound = l1_norm(emp), d_bound = 0.0;
      for (double v : marginal(emp).values) d_bound = std::max(d_bound, v);
      const auto reg =
          weak_regularity_partition(emp, cfg.coarsen_eps, 1.0, std::max(c_bound, 1e-12),
                                    std::max(d_bound, 1e-12), nullptr, 20,
                                    cell.substream(0x02).next_u64());
      emp = step_average(emp, reg.partition);
      row.coarsened = true;
      row.coarsen_allowance = reg.certificate_d22;
    }

    coupling_opts opts = cfg.coupling;
    opts.seed = cell.substream(0x03).next_u64();
    const auto grid = cfg.degree_grid.empty() ? default_degree_grid(g, emp) : cfg.degree_grid;
    const auto est = delta_gp_estimate(g, emp, grid, opts);
    row.distance = est.value + row.coarsen_allowance;
    row.exhausted = est.best_coupling.exhausted;
    report.rows[flat] = row;
  };

  const std::size_t cells = report.rows.size();
  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (std::size_t k = 0; k < cells; ++k) run_cell(k);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = static_cast<std::size_t>(w); k < cells;
             k += static_cast<std::size_t>(workers))
          run_cell(k);
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    std::vector<double> dists;
    double edge_sum = 0.0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const auto& row = report.rows[ti * static_cast<std::size_t>(cfg.trials) +
                                    static_cast<std::size_t>(trial)];
      dists.push_back(row.distance);
      edge_sum += static_cast<double>(row.edges);
    }
    std::sort(dists.begin(), dists.end());
    experiment_summary sum;
    sum.horizon = t_list[ti];
    sum.trials = cfg.trials;
    sum.q25 = detail::nearest_rank(dists, 0.25);
    sum.median = detail::nearest_rank(dists, 0.50);
    sum.q75 = detail::nearest_rank(dists, 0.75);
    sum.mean_edges = edge_sum / static_cast<double>(cfg.trials);
    report.summary.push_back(sum);
  }
  return report;
}

struct coupled_distance_result {
  double certificate = 0.0; // d22 upper bound between the two empirical graphexes
  distance_breakdown breakdown;
  std::size_t cloud_vertices = 0;
  std::size_t edges_first = 0, edges_second = 0;
  coupling_result coupling;
};

// One shared Poisson cloud drives both samplers; the empirical graphexes (all
// cloud and star/dust vertices kept, mass 1/T each) are then coupled.
inline coupled_distance_result coupled_sample_distance(const step_graphex& g1,
                                                       const step_graphex& g2, double t,
                                                       std::uint64_t seed,
                                                       coupling_opts opts =
                                                           detail::experiment_coupling_defaults()) {
  const auto [s1, s2] = sample_coupled(g1, g2, t, seed);
  const step_graphex e1 = empirical_graphex(to_plain(s1), 1.0 / t);
  const step_graphex e2 = empirical_graphex(to_plain(s2), 1.0 / t);

  coupled_distance_result out;
  out.cloud_vertices = std::min(s1.vertices.size(), s2.vertices.size());
  out.edges_first = s1.edges.size();
  out.edges_second = s2.edges.size();
  if (opts.seed == 0) opts.seed = rng(seed).substream(0xD0).next_u64();
  const double slack = std::max({total_mass(e1), total_mass(e2), 0.5});
  out.coupling = optimize_coupling(e1, e2, slack, opts);
  out.breakdown = out.coupling.breakdown;
  out.certificate = out.coupling.certificate;
  return out;
}

struct graphon_approximation_result {
  step_graphex approx;        // star = 0, dust = 0
  double absorber_mass = 0.0; // 0 when the input is already a pure graphon
  double certificate = 0.0;   // exact d22 of the certifying coupling
  coupling nu;                // the certifying coupling
};

// Appends one absorber atom of mass Q carrying the star intensities as
// off-diagonal values S(x)/Q and the dust as the diagonal value 2I/Q^2. Q is
// large enough that every new entry stays below eps^2/(4 C) and the absorber
// marginal contributes at most eps^4/16 in squared l2, which caps the d22
// gap at eps/2; the identity-plus-absorber coupling certifies it exactly.
inline graphon_approximation_result graphon_approximation(const step_graphex& g, double eps,
                                                          double max_absorber = 1e9) {
  require_valid(g);
  if (g.signed_mode)
    throw std::invalid_argument("graphon_approximation: unsigned graphexes only");
  if (!(eps > 0.0)) throw std::domain_error("graphon_approximation: eps must be positive");

  const std::size_t m = g.size();
  double s_max = 0.0;
  for (double s : g.star) s_max = std::max(s_max, s);

  graphon_approximation_result out;
  if (s_max == 0.0 && g.dust == 0.0) {
    out.approx = g;
    out.nu.row_targets = g.masses;
    out.nu.col_targets = g.masses;
    out.nu.row_targets.push_back(0.0);
    out.nu.col_targets.push_back(0.0);
    out.nu.matrix.assign(m + 1, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) out.nu.matrix[i][i] = g.masses[i];
    return out;
  }

  const double c_bound = l1_norm(g);
  const double d_inf = marginal(g).infinity_value; // star integral plus twice the dust
  const double q = std::max({4.0 * c_bound * s_max / (eps * eps),
                             std::sqrt(8.0 * g.dust * c_bound) / eps,
                             16.0 * d_inf * d_inf / (eps * eps * eps * eps),
                             s_max,                    // keeps cross entries within [0,1]
                             std::sqrt(2.0 * g.dust)}); // keeps the corner within [0,1]
  if (q > max_absorber)
    throw std::runtime_error("graphon_approximation: infeasible eps, required absorber mass " +
                             format_double(q) + " exceeds limit " + format_double(max_absorber));

  step_graphex approx;
  approx.masses = g.masses;
  approx.masses.push_back(q);
  approx.graphon.assign(m + 1, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) approx.graphon[i][j] = g.graphon[i][j];
  for (std::size_t i = 0; i < m; ++i)
    approx.graphon[i][m] = approx.graphon[m][i] = g.star[i] / q;
  approx.graphon[m][m] = 2.0 * g.dust / (q * q);
  approx.star.assign(m + 1, 0.0);
  approx.dust = 0.0;
  approx.isolated_mass = g.isolated_mass;
  require_valid(approx);

  // Identity coupling on the shared atoms; the absorber pairs with slack.
  coupling nu;
  nu.row_targets = g.masses;
  nu.row_targets.push_back(q);
  nu.col_targets = approx.masses;
  nu.col_targets.push_back(0.0);
  nu.matrix.assign(m + 1, std::vector<double>(m + 2, 0.0));
  for (std::size_t i = 0; i < m; ++i) nu.matrix[i][i] = g.masses[i];
  nu.matrix[m][m] = q;

  out.approx = std::move(approx);
  out.absorber_mass = q;
  out.nu = nu;
  out.certificate = coupling_distance(g, out.approx, nu).d22;
  return out;
}

} // namespace graphex
