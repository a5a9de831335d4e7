#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>

#include "graphex/core.hpp"
#include "graphex/fixtures.hpp"
#include "graphex/io.hpp"

using namespace graphex;

TEST(validate, rejects_malformed_inputs) {
  step_graphex g = fixtures::example_ex1(0.25);
  EXPECT_TRUE(graphex::validate(g).empty());

  step_graphex bad = g;
  bad.masses[0] = -0.25;
  EXPECT_FALSE(graphex::validate(bad).empty());

  bad = g;
  bad.graphon[0][1] = 0.3; // breaks symmetry against [1][0] == 1
  EXPECT_FALSE(graphex::validate(bad).empty());

  bad = g;
  bad.graphon[0][1] = bad.graphon[1][0] = 1.5;
  EXPECT_FALSE(graphex::validate(bad).empty());

  bad = g;
  bad.star.pop_back();
  EXPECT_FALSE(graphex::validate(bad).empty());

  bad = g;
  bad.dust = -1.0;
  EXPECT_FALSE(graphex::validate(bad).empty());

  bad = g;
  bad.graphon[1][1] = std::nan("");
  EXPECT_FALSE(graphex::validate(bad).empty());
  EXPECT_THROW(require_valid(bad), std::invalid_argument);
}

TEST(validate, signed_mode_allows_negative_entries) {
  step_graphex g;
  g.masses = {1.0, 2.0};
  g.graphon = {{0.5, -0.5}, {-0.5, 0.0}};
  g.star = {0.0, 0.0};
  EXPECT_FALSE(graphex::validate(g).empty()); // unsigned mode rejects -0.5
  g.signed_mode = true;
  EXPECT_TRUE(graphex::validate(g).empty());
  g.graphon[0][0] = -1.5; // any finite value is fine once signed
  EXPECT_TRUE(graphex::validate(g).empty());
  g.graphon[0][0] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(graphex::validate(g).empty());
}

TEST(summaries, fixture_values_by_hand) {
  const auto c = fixtures::constant(0.5);
  EXPECT_DOUBLE_EQ(total_mass(c), 1.0);
  EXPECT_DOUBLE_EQ(l1_norm(c), 0.5);
  EXPECT_DOUBLE_EQ(edge_density(c), 0.5);

  const auto ex1 = fixtures::example_ex1(0.25);
  EXPECT_DOUBLE_EQ(l1_norm(ex1), 0.375);
  EXPECT_DOUBLE_EQ(edge_density(ex1), 0.375);
  const auto prof = marginal(ex1);
  EXPECT_DOUBLE_EQ(prof.values[0], 0.75); // mass-1/4 block sees the 3/4 block
  EXPECT_DOUBLE_EQ(prof.values[1], 0.25);
  EXPECT_DOUBLE_EQ(prof.infinity_value, 0.0);

  // Star intensity enters the l1 norm and the density with weight two.
  const auto s = fixtures::star_only(1.0, 1.0);
  EXPECT_DOUBLE_EQ(l1_norm(s), 2.0);
  EXPECT_DOUBLE_EQ(edge_density(s), 2.0);
  EXPECT_DOUBLE_EQ(marginal(s).values[0], 1.0);
  EXPECT_DOUBLE_EQ(marginal(s).infinity_value, 1.0);

  const auto d = fixtures::dust_only(1.0);
  EXPECT_DOUBLE_EQ(l1_norm(d), 2.0);
  EXPECT_DOUBLE_EQ(edge_density(d), 2.0);
  EXPECT_DOUBLE_EQ(marginal(d).infinity_value, 2.0);

  for (double n : {2.0, 4.0, 8.0, 16.0})
    EXPECT_DOUBLE_EQ(l1_norm(fixtures::ui_family(n)), 2.0);
}

TEST(transforms, truncate_by_degree_keeps_sublevel_set) {
  const auto ex1 = fixtures::example_ex1(0.25);
  const auto [rest, removed] = truncate_by_degree(ex1, 0.5);
  EXPECT_DOUBLE_EQ(removed, 0.25); // the high-degree block
  ASSERT_EQ(rest.size(), 1u);
  EXPECT_DOUBLE_EQ(rest.masses[0], 0.75);
  EXPECT_DOUBLE_EQ(l1_norm(rest), 0.0); // every edge crossed the removed block

  const auto [all, none] = truncate_by_degree(ex1, 1.0);
  EXPECT_DOUBLE_EQ(none, 0.0);
  EXPECT_EQ(all.size(), 2u);
}

TEST(transforms, split_atom_preserves_every_functional) {
  const auto g = fixtures::example_ex1(0.25);
  const auto h = split_atom(g, 1, 3);
  ASSERT_EQ(h.size(), 4u);
  // Pieces are binary shares of 0.75 summing back to it exactly.
  EXPECT_DOUBLE_EQ(h.masses[1] + h.masses[2] + h.masses[3], 0.75);
  EXPECT_DOUBLE_EQ(total_mass(h), total_mass(g));
  EXPECT_DOUBLE_EQ(l1_norm(h), l1_norm(g));
  EXPECT_DOUBLE_EQ(edge_density(h), edge_density(g));
  // The marginal value of each fragment matches the parent atom's.
  const auto prof = marginal(h);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_DOUBLE_EQ(prof.values[i], 0.25);

  EXPECT_THROW(split_atom_masses(g, 0, {0.1, 0.2}), std::invalid_argument);
  EXPECT_THROW(split_atom(g, 5, 2), std::invalid_argument);
}

TEST(transforms, dilate_scales_measure_not_values) {
  const auto g = dilate(fixtures::constant(0.5), 2.0);
  EXPECT_DOUBLE_EQ(total_mass(g), 2.0);
  EXPECT_DOUBLE_EQ(l1_norm(g), 2.0);          // quadratic in the measure
  EXPECT_DOUBLE_EQ(marginal(g).values[0], 1.0); // linear
}

TEST(transforms, trivial_extension_adds_isolated_mass_only) {
  const auto g = trivially_extend(fixtures::constant(0.5), 3.0);
  EXPECT_DOUBLE_EQ(g.isolated_mass, 3.0);
  EXPECT_DOUBLE_EQ(l1_norm(g), 0.5);
  EXPECT_DOUBLE_EQ(edge_density(g), 0.5);
}

TEST(format, shortest_round_trip_doubles) {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / 3.0, 1e-17, 12345.6789, -0.0703125, 1e300}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(io, serialize_parse_round_trip) {
  step_graphex g = fixtures::example_ex1(1.0 / 3.0);
  g.star = {0.25, 1.0 / 7.0};
  g.dust = 0.125;
  g.isolated_mass = infinity;
  const auto back = parse_graphex(serialize(g));
  EXPECT_EQ(back.masses, g.masses);
  EXPECT_EQ(back.graphon, g.graphon);
  EXPECT_EQ(back.star, g.star);
  EXPECT_EQ(back.dust, g.dust);
  EXPECT_TRUE(std::isinf(back.isolated_mass));
  EXPECT_EQ(back.signed_mode, g.signed_mode);
  // Reserialization is byte-stable.
  EXPECT_EQ(serialize(back), serialize(g));
}

TEST(io, parse_rejects_garbage) {
  EXPECT_THROW(parse_graphex("not json"), std::exception);
  EXPECT_THROW(parse_graphex("{\"graphon\": []}"), std::invalid_argument); // no masses
  EXPECT_THROW(parse_graphex("{\"masses\": [1], \"isolated_mass\": \"lots\"}"),
               std::invalid_argument);
}
