#include <gtest/gtest.h>

#include <cmath>

#include "graphex/distances.hpp"
#include "graphex/fixtures.hpp"
#include "graphex/rng.hpp"

using namespace graphex;

TEST(d22, hand_breakdown_and_root_schedule) {
  const auto a = fixtures::constant(0.5);
  const auto b = fixtures::constant(0.3);
  const auto bd = d22(a, b);
  EXPECT_NEAR(bd.kernel_component, 0.2, 1e-12);
  EXPECT_NEAR(bd.marginal_l2_component, 0.2, 1e-12);
  EXPECT_NEAR(bd.density_gap_component, 0.2, 1e-12);
  // Kernel enters raw, the marginal under a square root, the density gap
  // under a cube root; the cube root dominates here.
  EXPECT_NEAR(bd.d22, std::cbrt(0.2), 1e-12);
  EXPECT_NEAR(bd.d_jbl, 0.2, 1e-12);

  EXPECT_DOUBLE_EQ(d22(a, a).d22, 0.0);
  EXPECT_THROW(d22(a, fixtures::example_ex1(0.25)), std::invalid_argument);
}

TEST(d22, frozen_mixed_sign_kernel) {
  step_graphex a, b;
  a.masses = b.masses = {1.0, 1.0};
  a.graphon = {{0.9, 0.5}, {0.5, 0.2}};
  b.graphon = {{0.7, 0.1}, {0.1, 0.1}};
  a.star = b.star = {0.0, 0.0};
  // Difference [[0.2, 0.4], [0.4, 0.1]]; spectral radius via the quadratic
  // characteristic polynomial in long double arithmetic.
  EXPECT_NEAR(d22(a, b).kernel_component, 0.553112887414927, 1e-12);
}

TEST(coupling, transport_plan_is_well_formed) {
  const auto a = fixtures::example_ex1(0.25);
  const auto b = fixtures::constant(0.4);
  coupling_opts opts;
  opts.seed = 7;
  const auto r = optimize_coupling(a, b, 1.0, opts);
  EXPECT_TRUE(graphex::validate(r.nu).empty());
  EXPECT_GE(r.certificate, 0.0);
  EXPECT_EQ(r.nu.row_targets.size(), 3u); // two atoms plus slack
  EXPECT_EQ(r.nu.col_targets.size(), 2u);
}

TEST(coupling, identity_is_found_for_identical_inputs) {
  coupling_opts opts;
  opts.seed = 3;
  for (const auto& g : {fixtures::example_ex1(0.25), fixtures::constant(0.7)}) {
    const auto r = optimize_coupling_auto(g, g, opts);
    EXPECT_NEAR(r.certificate, 0.0, 1e-9);
  }
}

TEST(coupling, atom_split_is_free) {
  const auto g = fixtures::example_ex1(0.25);
  const auto h = split_atom(g, 1, 2);
  coupling_opts opts;
  opts.seed = 5;
  EXPECT_NEAR(optimize_coupling_auto(g, h, opts).certificate, 0.0, 1e-9);
}

TEST(coupling, trivial_extension_strictly_helps_on_bipartite_pair) {
  const auto g = fixtures::example_ex1(0.25);
  const auto partner = fixtures::example_ex1_partner(0.25);
  coupling_opts opts;
  opts.objective = coupling_objective::kernel;
  opts.seed = 2;

  // Without slack the transport plan is forced: the single partner atom
  // receives both blocks, and the difference kernel has spectral radius
  // 0.48482563... (quadratic characteristic polynomial, high precision).
  const auto forced = optimize_coupling(g, partner, 0.0, opts);
  EXPECT_NEAR(forced.breakdown.kernel_component, 0.484825632382271, 1e-9);

  // Extending both sides lets mismatched mass hide in the slack block and
  // brings the kernel component down toward sqrt(p(1-p)).
  const auto relaxed = optimize_coupling(g, partner, 1.0, opts);
  EXPECT_LT(relaxed.breakdown.kernel_component, forced.breakdown.kernel_component - 0.01);
  EXPECT_LE(relaxed.breakdown.kernel_component, 0.4340127);
}

TEST(coupling, deterministic_given_seed) {
  const auto a = fixtures::example_ex1(0.3);
  const auto b = fixtures::constant(0.45);
  coupling_opts opts;
  opts.seed = 17;
  opts.restarts = 6;
  const auto r1 = optimize_coupling(a, b, 0.8, opts);
  const auto r2 = optimize_coupling(a, b, 0.8, opts);
  EXPECT_EQ(r1.certificate, r2.certificate);
  EXPECT_EQ(r1.nu.matrix, r2.nu.matrix);
}

TEST(degree_grid, covers_marginals_and_stays_small) {
  const auto a = fixtures::example_ex1(0.25);
  const auto b = fixtures::ui_family(8);
  const auto grid = default_degree_grid(a, b);
  ASSERT_FALSE(grid.empty());
  EXPECT_LE(grid.size(), 34u);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LT(grid[i - 1], grid[i]);
  EXPECT_GT(grid.back(), 8.0); // beyond every marginal value, so one row removes nothing
}

TEST(delta_gp, zero_for_identical_and_split_inputs) {
  const auto g = fixtures::example_ex1(0.25);
  coupling_opts opts;
  opts.seed = 9;
  const auto r = delta_gp_estimate(g, g, default_degree_grid(g, g), opts);
  EXPECT_NEAR(r.value, 0.0, 1e-9);
  for (const auto& row : r.rows)
    EXPECT_NEAR(row.value, std::max(std::sqrt(row.removed_mass), row.coupling_certificate),
                1e-12);
}

TEST(delta_gp, truncation_certifies_escaping_mass_family) {
  // All l1 mass rides on a light atom: dropping it costs sqrt(1/n) of measure
  // and leaves the zero graphex.
  coupling_opts opts;
  opts.seed = 13;
  opts.restarts = 8;
  for (double n : {4.0, 16.0}) {
    const auto g = fixtures::ui_family(n);
    const auto z = fixtures::zero();
    const auto r = delta_gp_estimate(g, z, default_degree_grid(g, z), opts);
    EXPECT_LE(r.value, std::sqrt(1.0 / n) + 1e-9);
    EXPECT_GT(r.value, 0.0);
  }
}

TEST(delta_gp, density_equalization_reaches_target_exactly) {
  const auto g = fixtures::example_ex1(0.25); // edge density 0.375
  const auto trim = detail::trim_to_density(g, 0.2);
  EXPECT_TRUE(trim.feasible);
  EXPECT_NEAR(edge_density(trim.g), 0.2, 1e-9);
  EXPECT_GT(trim.removed, 0.0);
  EXPECT_LT(trim.removed, total_mass(g));

  const auto noop = detail::trim_to_density(g, 0.5);
  EXPECT_DOUBLE_EQ(noop.removed, 0.0);
  EXPECT_DOUBLE_EQ(edge_density(noop.g), 0.375);
}

TEST(delta_gp, lower_bound_solves_gap_cubic) {
  const auto z = fixtures::zero();
  // e^3 + 4 e^2 D = density gap, bisected to 1e-12.
  EXPECT_NEAR(delta_gp_lower_bound(fixtures::constant(1.0), z, 1.0), 0.472833908995256, 1e-9);
  EXPECT_NEAR(delta_gp_lower_bound(fixtures::constant(0.2), z, 0.5), 0.295192577069172, 1e-9);
  EXPECT_DOUBLE_EQ(delta_gp_lower_bound(z, z, 1.0), 0.0);
}

TEST(delta_gp, lower_bound_never_exceeds_estimate) {
  rng r(41);
  coupling_opts opts;
  opts.restarts = 6;
  for (int t = 0; t < 10; ++t) {
    step_graphex a, b;
    const std::size_t m = 2 + t % 3;
    a.masses.resize(m);
    b.masses.resize(m);
    for (auto& v : a.masses) v = 0.2 + r.u01();
    for (auto& v : b.masses) v = 0.2 + r.u01();
    a.graphon.assign(m, std::vector<double>(m, 0.0));
    b.graphon.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        a.graphon[i][j] = a.graphon[j][i] = r.u01();
        b.graphon[i][j] = b.graphon[j][i] = r.u01();
      }
    a.star.assign(m, 0.0);
    b.star.assign(m, 0.0);
    opts.seed = 100 + t;
    const auto grid = default_degree_grid(a, b);
    const auto est = delta_gp_estimate(a, b, grid, opts);
    double dmax = 0.0;
    for (double v : marginal(a).values) dmax = std::max(dmax, v);
    for (double v : marginal(b).values) dmax = std::max(dmax, v);
    EXPECT_LE(delta_gp_lower_bound(a, b, dmax), est.value + 1e-9);
  }
}
