// Acceptance gate: one line per criterion, process exit code = number of
// failures. Every tolerance is pinned here; seeds are fixed so a passing run
// is reproducible bit for bit. argv[1] is the CLI binary, exercised by the
// determinism criterion through the shell.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "graphex/canonical.hpp"
#include "graphex/densities.hpp"
#include "graphex/diagnostics.hpp"
#include "graphex/distances.hpp"
#include "graphex/estimation.hpp"
#include "graphex/fixtures.hpp"
#include "graphex/io.hpp"
#include "graphex/norms.hpp"
#include "graphex/regularity.hpp"
#include "graphex/rng.hpp"
#include "graphex/sampling.hpp"

using namespace graphex;

namespace {

std::string g_cli; // path to the command line binary, empty if not supplied

struct outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Runs fn(i) for i in [0, n) across up to `workers` threads. Outputs must be
// preallocated by the caller; the index split keeps results deterministic.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, std::thread::hardware_concurrency()));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct moments {
  std::size_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_mean() const {
    return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

std::vector<std::uint64_t> trial_seeds(std::uint64_t root_seed, std::size_t n) {
  const rng root(root_seed);
  std::vector<std::uint64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    rng s = root.substream(i);
    out[i] = s.next_u64();
  }
  return out;
}

// ---- criterion 1: edge count moments of the sampler --------------------------------

outcome edge_count_moments() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = fixtures::constant(0.5);
  const std::size_t trials = 20000;
  const auto seeds = trial_seeds(0xACC1, trials);
  std::vector<double> counts(trials, 0.0);
  parallel_for(trials, 8, [&](std::size_t i) {
    counts[i] = static_cast<double>(sample_process(g, 10.0, seeds[i]).edges.size());
  });
  moments m;
  for (double c : counts) m.add(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double mean_tol = 0.47; // 4 sqrt(275/20000)
  const bool ok = std::abs(m.mean - 25.0) <= mean_tol &&
                  std::abs(m.variance() - 275.0) <= 27.5 && secs < 60.0;
  return {ok, fmt("mean %.3f (25 +/- %.2f), var %.1f (275 +/- 27.5), %.1fs (< 60s)", m.mean,
                  mean_tol, m.variance(), secs)};
}

// ---- criterion 2: injective counts match the density calculator ---------------------

outcome sampler_density_consistency() {
  struct cell {
    std::string pattern, fixture;
  };
  const std::vector<std::string> patterns = {"edge", "path2", "triangle", "star3", "two_edges"};
  const std::vector<std::pair<std::string, step_graphex>> fixtures_list = {
      {"constant-0.5", fixtures::constant(0.5)},
      {"example-ex1", fixtures::example_ex1(0.25)},
      {"star-only", fixtures::star_only(1.0, 1.0)},
      {"dust-only", fixtures::dust_only(1.0)},
  };
  const double t_horizon = 6.0;
  const std::size_t trials = 20000;

  struct cell_result {
    bool ok = true;
    std::string note;
  };
  std::vector<cell_result> results(patterns.size() * fixtures_list.size());
  parallel_for(results.size(), 8, [&](std::size_t c) {
    const auto& pat = preset_pattern(patterns[c % patterns.size()]);
    const auto& fx = fixtures_list[c / patterns.size()];
    const double expected =
        std::pow(t_horizon, static_cast<double>(pat.n)) * hom_density(pat, fx.second);
    const auto seeds = trial_seeds(0xACC2 + c, trials);
    moments m;
    for (std::size_t i = 0; i < trials; ++i)
      m.add(static_cast<double>(inj_count(pat, sample_process(fx.second, t_horizon, seeds[i]))));
    const double se = m.stderr_mean();
    const bool ok = se == 0.0 ? m.mean == expected : std::abs(m.mean - expected) <= 4.0 * se;
    results[c].ok = ok;
    if (!ok)
      results[c].note = fmt("%s on %s: mean %.4f vs %.4f (4se %.4f)",
                            patterns[c % patterns.size()].c_str(), fx.first.c_str(), m.mean,
                            expected, 4.0 * se);
  });
  std::size_t bad = 0;
  std::string first;
  for (const auto& r : results)
    if (!r.ok && bad++ == 0) first = r.note;
  if (bad > 0) return {false, fmt("%zu of %zu cells off: %s", bad, results.size(), first.c_str())};
  return {true, fmt("all %zu pattern/fixture cells within 4 standard errors (T=6, 20000 trials)",
                    results.size())};
}

// ---- criterion 3: forced vs slack coupling on the bipartite pair --------------------

outcome coupling_slack_separation() {
  const auto g = fixtures::example_ex1(0.25);
  const auto partner = fixtures::example_ex1_partner(0.25);
  coupling_opts opts;
  opts.objective = coupling_objective::kernel;
  opts.seed = 2;

  const auto forced = optimize_coupling(g, partner, 0.0, opts);
  const auto relaxed = optimize_coupling(g, partner, 1.0, opts);

  const double forced_expected = 0.484825632382271; // spectral radius of the forced pullback
  const double slack_cap = 0.4340127;               // sqrt(3)/4 + 1e-3
  const bool ok = std::abs(forced.breakdown.kernel_component - forced_expected) <= 1e-6 &&
                  relaxed.breakdown.kernel_component <= slack_cap;
  return {ok, fmt("forced kernel %.9f (target %.9f +/- 1e-6), slack-1 kernel %.7f (<= %.7f)",
                  forced.breakdown.kernel_component, forced_expected,
                  relaxed.breakdown.kernel_component, slack_cap)};
}

// ---- criterion 4: norm sandwich inequalities ----------------------------------------

outcome norm_sandwiches() {
  rng r(0xACC4);
  set_norm_options exact;
  exact.mode = set_norm_mode::exact;
  std::size_t violations = 0;

  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 2 + static_cast<std::size_t>(t % 7); // up to 8 atoms
    step_function_2d u;
    u.masses.resize(m);
    for (auto& v : u.masses) v = 0.1 + 2.0 * r.u01();
    u.values.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) u.values[i][j] = u.values[j][i] = 2.0 * r.u01() - 1.0;

    const double k = kernel_norm(u);
    const double c4 = c4_density(u);
    const double l2 = l2_norm(u);
    const double j = bilinear_set_norm(u, set_norm_kind::jumble, exact).value;
    if (!(std::pow(k, 4) <= c4 + 1e-9)) ++violations;
    if (!(c4 <= k * k * l2 * l2 + 1e-9)) ++violations;
    if (!(j <= k + 1e-9)) ++violations;
    double dmax = 0.0;
    for (double v : abs_marginal(u)) dmax = std::max(dmax, v);
    const double denom =
        8.0 * std::pow(inf_norm(u), 0.75) * std::pow(dmax, 1.5) * std::pow(l1_norm(u), 0.75);
    if (denom > 1e-12 && !(j + 1e-9 >= std::pow(k, 4) / denom)) ++violations;
  }

  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 2 + static_cast<std::size_t>(t % 10);
    step_function_1d f;
    f.masses.resize(m);
    f.values.resize(m);
    for (auto& v : f.masses) v = 0.1 + 2.0 * r.u01();
    for (auto& v : f.values) v = 2.0 * r.u01() - 1.0;
    const double j = bilinear_set_norm(f, set_norm_kind::jumble, exact).value;
    const double l2 = l2_norm(f);
    if (!(j <= l2 + 1e-9)) ++violations;
    const double denom = std::sqrt(2.0 * l1_norm(f) * inf_norm(f));
    if (denom > 1e-12 && !(j + 1e-9 >= l2 * l2 / denom)) ++violations;
  }

  return {violations == 0,
          fmt("%zu violations across 200 kernel chains and 200 one-dimensional chains", violations)};
}

// ---- criterion 5: heuristic set norms against the exhaustive oracle -----------------

outcome heuristic_vs_oracle() {
  rng r(0xACC5);
  std::size_t agree_jumble = 0, agree_cut = 0, exceed = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const std::size_t m = 2 + static_cast<std::size_t>(t % 9); // up to 10 atoms
    step_function_2d u;
    u.masses.resize(m);
    for (auto& v : u.masses) v = 0.1 + 2.0 * r.u01();
    u.values.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) u.values[i][j] = u.values[j][i] = 2.0 * r.u01() - 1.0;

    for (const auto kind : {set_norm_kind::jumble, set_norm_kind::cut}) {
      set_norm_options ho;
      ho.mode = set_norm_mode::heuristic;
      ho.restarts = 20;
      ho.seed = 0xACC5u + static_cast<std::uint64_t>(t);
      set_norm_options eo;
      eo.mode = set_norm_mode::exact;
      const double h = bilinear_set_norm(u, kind, ho).value;
      const double ex = bilinear_set_norm(u, kind, eo).value;
      if (h > ex + 1e-12) ++exceed;
      if (std::abs(h - ex) <= 1e-9) ++(kind == set_norm_kind::jumble ? agree_jumble : agree_cut);
    }
  }
  const std::size_t need = trials * 95 / 100;
  const bool ok = exceed == 0 && agree_jumble >= need && agree_cut >= need;
  return {ok, fmt("jumble %zu/%d exact, cut %zu/%d exact (need %zu), %zu oracle exceedances",
                  agree_jumble, trials, agree_cut, trials, need, exceed)};
}

// ---- criterion 6: weak regularity on an empirical graphex ---------------------------

outcome regularity_on_sampled_graph() {
  const auto g = fixtures::constant(0.5);
  const auto s = sample_process(g, 200.0, 0xACC6);
  const auto emp = empirical_graphex(to_plain(s), 1.0 / 200.0);

  const double eps = 0.3;
  const auto res = weak_regularity_partition(emp, eps, 1.0, 1.0, 1.0, nullptr, 20, 0xACC6);
  const int round_cap = 34; // ceil((2BC + CD) / eps^2)
  const bool reg_ok = res.rounds <= round_cap && res.certificate <= eps &&
                      !res.budget_exhausted &&
                      static_cast<double>(part_count(res.partition)) <= res.part_bound;

  // Averaging over any partition contracts both distances and keeps densities.
  rng r(0xACC6);
  std::size_t bad = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 2 + static_cast<std::size_t>(t % 11);
    step_graphex a, b;
    a.masses.assign(m, 1.0 / static_cast<double>(m));
    a.graphon.assign(m, std::vector<double>(m, 0.0));
    a.star.assign(m, 0.0);
    b = a;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        a.graphon[i][j] = a.graphon[j][i] = r.bernoulli(0.5) ? 1.0 : 0.0;
        b.graphon[i][j] = b.graphon[j][i] = r.bernoulli(0.5) ? 1.0 : 0.0;
      }
    subspace_partition p;
    const long long parts = 1 + static_cast<long long>(r.next_u64() % m);
    for (std::size_t i = 0; i < m; ++i) p.part_of.push_back(static_cast<long long>(i) % parts);
    const auto before = d22(a, b);
    const auto after = d22(step_average(a, p), step_average(b, p));
    if (after.d22 > before.d22 + 1e-12 || after.d_jbl > before.d_jbl + 1e-12 ||
        std::abs(after.density_gap_component - before.density_gap_component) > 1e-12)
      ++bad;
  }

  return {reg_ok && bad == 0,
          fmt("n=%zu sample: %d rounds (<= %d), certificate %.4f (<= %.1f), %zu parts; "
              "%zu contraction violations of 100",
              emp.size(), res.rounds, round_cap, res.certificate, eps, part_count(res.partition),
              bad)};
}

// ---- criterion 7: sampling converges in the estimated distance ----------------------

outcome convergence_trend() {
  experiment_config cfg;
  cfg.trials = 20;
  cfg.workers = 8;
  cfg.seed = 1;
  const std::vector<double> horizons = {5.0, 10.0, 20.0, 40.0};

  const auto check = [&](const step_graphex& g, const char* name, std::string& note) {
    const auto rep = convergence_experiment(g, horizons, cfg);
    std::vector<double> med;
    for (const auto& s : rep.summary) med.push_back(s.median);
    int inversions = 0;
    for (std::size_t i = 0; i + 1 < med.size(); ++i)
      if (med[i + 1] > med[i] + 1e-12) ++inversions;
    const bool ok = inversions <= 1 && med.back() < 0.35;
    note += fmt("%s medians %.4f/%.4f/%.4f/%.4f (%d inversions)%s", name, med[0], med[1], med[2],
                med[3], inversions, ok ? "" : " [FAIL]");
    return ok;
  };

  std::string note;
  const bool a = check(fixtures::constant(0.5), "constant", note);
  note += ", ";
  const bool b = check(fixtures::example_ex1(0.25), "ex1", note);
  return {a && b, note};
}

// ---- criterion 8: canonical form and invariance under atom splitting ----------------

outcome canonical_invariance() {
  rng r(0xACC8);
  std::size_t bad = 0;
  std::string first;
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(t % 4);
    step_graphex g;
    g.masses.resize(m);
    for (auto& v : g.masses) v = 0.2 + r.u01();
    g.graphon.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) g.graphon[i][j] = g.graphon[j][i] = r.u01();
    g.star.assign(m, 0.0);
    if (t % 3 == 0)
      for (auto& v : g.star) v = r.u01();
    if (t % 4 == 0) g.dust = r.u01();

    const auto split = split_atom(g, static_cast<std::size_t>(t) % m, 2 + t % 2);

    const auto note = [&](const char* what) {
      ++bad;
      if (first.empty()) first = fmt("trial %d: %s", t, what);
    };
    if (!equivalent(g, split).equal) note("split not equivalent");
    const auto canon = serialize(canonicalize(g).canonical);
    if (serialize(canonicalize(canonicalize(g).canonical).canonical) != canon)
      note("canonical form not idempotent");
    if (serialize(canonicalize(split).canonical) != canon) note("split canonicalizes differently");

    coupling_opts opts;
    opts.seed = 0xACC8u + static_cast<std::uint64_t>(t);
    const auto est = delta_gp_estimate(g, split, default_degree_grid(g, split), opts);
    if (est.value > 1e-6) note("distance estimate above 1e-6");

    for (const auto& name : preset_pattern_names()) {
      const auto pat = preset_pattern(name);
      if (std::abs(hom_density(pat, g) - hom_density(pat, split)) > 1e-12) {
        note("density shifted under split");
        break;
      }
    }
  }
  return {bad == 0, bad == 0 ? "50 random graphexes: split-invariant, idempotent, distance <= 1e-6"
                             : fmt("%zu failures; first: %s", bad, first.c_str())};
}

// ---- criterion 9: counting lemma domination -----------------------------------------

outcome counting_lemma() {
  rng r(0xACC9);
  set_norm_options exact;
  exact.mode = set_norm_mode::exact;
  const std::vector<std::string> pats = {"path2", "triangle", "c4"};
  std::size_t violations = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 2 + static_cast<std::size_t>(t % 5);
    std::vector<double> masses(m);
    for (auto& v : masses) v = 0.2 + r.u01();
    step_graphex g1, g2;
    g1.masses = g2.masses = masses;
    g1.graphon.assign(m, std::vector<double>(m, 0.0));
    g2.graphon.assign(m, std::vector<double>(m, 0.0));
    g1.star.assign(m, 0.0);
    g2.star.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        g1.graphon[i][j] = g1.graphon[j][i] = r.u01();
        g2.graphon[i][j] = g2.graphon[j][i] = r.u01();
      }

    step_function_2d diff{masses, g1.graphon};
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) diff.values[i][j] -= g2.graphon[i][j];
    const double eps = bilinear_set_norm(diff, set_norm_kind::jumble, exact).value;

    const auto dmax = [](const step_graphex& g) {
      double best = 0.0;
      for (double v : marginal(g).values) best = std::max(best, v);
      return best;
    };
    const double c_bound = std::max(l1_norm(g1), l1_norm(g2));
    const double d_bound = std::max(dmax(g1), dmax(g2));

    for (const auto& name : pats) {
      const auto pat = preset_pattern(name);
      const double gap = std::abs(hom_density(pat, g1) - hom_density(pat, g2));
      if (gap > counting_lemma_bound(pat, c_bound, d_bound, eps) + 1e-12) ++violations;
    }
  }
  return {violations == 0, fmt("%zu violations across 100 pairs x 3 patterns (exact jumble gap)",
                               violations)};
}

// ---- criterion 10: uniform integrability against l1 ---------------------------------

outcome uniform_integrability() {
  std::string note;
  bool ok = true;
  for (double n : {2.0, 4.0, 8.0, 16.0}) {
    const auto g = fixtures::ui_family(n);
    const bool l1_exact = l1_norm(g) == 2.0;
    const bool ui_exact = uniform_integrability_metric(g, 2.0) == 1.0;
    coupling_opts opts;
    opts.seed = 0xACCA;
    opts.restarts = 8;
    const auto est = delta_gp_estimate(g, fixtures::zero(), default_degree_grid(g, fixtures::zero()), opts);
    const bool close = est.value <= std::max(std::sqrt(1.0 / n) + 1e-12, 1e-6);
    if (!(l1_exact && ui_exact && close)) {
      ok = false;
      note += fmt("n=%g: l1 %.17g, ui %.17g, dist %.4f; ", n, l1_norm(g),
                  uniform_integrability_metric(g, 2.0), est.value);
    }
  }

  // Degree truncations of a fixed graphex recover its full l1 norm.
  auto g = fixtures::example_ex1(0.25);
  g.star = {0.3, 0.1};
  g.dust = 0.2;
  const auto rows = tightness_profile(g, {0.25, 0.5, 1.0, 1.05, 2.0});
  bool trunc_ok = std::abs(rows.back().truncated_l1 - l1_norm(g)) <= 1e-9;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (rows[i].truncated_l1 > rows[i + 1].truncated_l1 + 1e-12) trunc_ok = false;
  if (!trunc_ok) {
    ok = false;
    note += fmt("truncation family: l1 %.6f vs %.6f; ", rows.back().truncated_l1, l1_norm(g));
  }
  if (ok)
    note = "l1 pinned at 2 with vanishing distance for n in {2,4,8,16}; truncations recover l1";
  return {ok, note};
}

// ---- criterion 11: seeded reruns are byte identical ----------------------------------

std::string run_capture(const std::string& args, const std::filesystem::path& dir, int idx) {
  const auto out = dir / ("cap_" + std::to_string(idx) + ".txt");
  const std::string cmd = "'" + g_cli + "' " + args + " > '" + out.string() + "' 2>/dev/null";
  if (std::system(cmd.c_str()) != 0) return "<<command failed: " + args + ">>";
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

outcome seeded_determinism() {
  // Library side: the experiment driver must not depend on its worker count.
  experiment_config c1;
  c1.trials = 6;
  c1.seed = 5;
  c1.workers = 1;
  experiment_config c8 = c1;
  c8.workers = 8;
  const auto g = fixtures::example_ex1(0.25);
  const auto r1 = convergence_experiment(g, {3.0, 6.0}, c1);
  const auto r8 = convergence_experiment(g, {3.0, 6.0}, c8);
  bool lib_ok = r1.rows.size() == r8.rows.size();
  for (std::size_t i = 0; lib_ok && i < r1.rows.size(); ++i)
    lib_ok = r1.rows[i].distance == r8.rows[i].distance &&
             r1.rows[i].vertices == r8.rows[i].vertices && r1.rows[i].edges == r8.rows[i].edges;

  if (g_cli.empty()) return {false, "CLI binary path not supplied on the command line"};

  const auto dir = std::filesystem::temp_directory_path() /
                   ("graphex_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto fx = dir / "fx.json";
  std::ofstream(fx) << serialize(g);
  const auto fx2 = dir / "fx2.json";
  std::ofstream(fx2) << serialize(fixtures::constant(0.4));
  const std::string fxq = "'" + fx.string() + "'";
  const std::string fx2q = "'" + fx2.string() + "'";

  int idx = 0;
  std::size_t bad = 0;
  std::string first;
  const auto same = [&](const std::string& a, const std::string& b, const char* what) {
    const std::string ra = run_capture(a, dir, idx++);
    const std::string rb = run_capture(b, dir, idx++);
    if (ra.empty() || ra != rb) {
      ++bad;
      if (first.empty()) first = what;
    }
  };

  const std::string conv = "converge " + fxq + " --T 3,6 --trials 4 --seed 5";
  same(conv + " --workers 1", conv + " --workers 8", "converge across worker counts");
  same(conv + " --workers 8", conv + " --workers 8", "converge rerun");
  const std::string norm = "norm " + fxq + " --kind cut --mode heuristic --seed 7";
  same(norm, norm, "heuristic norm rerun");
  const std::string dist = "distance " + fxq + " " + fx2q + " --metric deltagp --seed 11";
  same(dist, dist, "distance rerun");
  const std::string reg = "regularize " + fxq + " --eps 0.2 --seed 3";
  same(reg, reg, "regularize rerun");

  // Sample output goes to files; compare the graph bytes across two runs.
  for (int run = 0; run < 2; ++run) {
    const auto sd = dir / ("s" + std::to_string(run));
    run_capture("sample " + fxq + " --T 6 --trials 3 --seed 9 --out-dir '" + sd.string() + "'",
                dir, idx++);
  }
  for (int i = 0; i < 3; ++i) {
    const auto name = fmt("sample_%03d.graph", i);
    const auto a = slurp(dir / "s0" / name);
    if (a.empty() || a != slurp(dir / "s1" / name)) {
      ++bad;
      if (first.empty()) first = "sample files";
    }
  }
  std::filesystem::remove_all(dir);

  const bool ok = lib_ok && bad == 0;
  std::string note = lib_ok ? "experiment rows equal at 1 and 8 workers"
                            : "experiment rows differ across worker counts";
  note += bad == 0 ? "; all seeded CLI reruns byte-identical"
                   : fmt("; %zu CLI mismatches, first: %s", bad, first.c_str());
  return {ok, note};
}

} // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];

  const std::vector<std::pair<const char*, std::function<outcome()>>> criteria = {
      {"sampler edge-count moments", edge_count_moments},
      {"sampler/density consistency", sampler_density_consistency},
      {"coupling slack separation", coupling_slack_separation},
      {"norm sandwich inequalities", norm_sandwiches},
      {"heuristic set norms vs oracle", heuristic_vs_oracle},
      {"regularity on sampled graphs", regularity_on_sampled_graph},
      {"convergence of sampled distance", convergence_trend},
      {"canonical form invariance", canonical_invariance},
      {"counting lemma domination", counting_lemma},
      {"uniform integrability metric", uniform_integrability},
      {"seeded rerun determinism", seeded_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failures;
    std::printf("criterion %2zu: %s  %s (%s)\n", i + 1, r.pass ? "PASS" : "FAIL",
                criteria[i].first, r.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
