// Independent oracles for the frozen constants used in the test suite.
// Everything here is closed-form or bisection on long double, deliberately
// sharing no code with the library headers.
//
// Build: g++ -std=c++20 -O2 tools/derive_constants.cpp -o derive_constants

#include <cmath>
#include <cstdio>

namespace {

// Spectral radius of a real 2x2 matrix via the characteristic polynomial.
long double spectral_radius_2x2(long double a, long double b, long double c, long double d) {
  const long double t = a + d;
  const long double det = a * d - b * c;
  const long double disc = t * t - 4.0L * det;
  if (disc >= 0.0L) {
    const long double s = std::sqrt(disc);
    return std::max(std::fabs((t + s) / 2.0L), std::fabs((t - s) / 2.0L));
  }
  return std::sqrt(det); // complex pair, |lambda| = sqrt(det)
}

// Unique nonnegative root of e^3 + 4 e^2 D = gap.
long double density_gap_root(long double gap, long double degree_bound) {
  auto f = [&](long double e) { return e * e * e + 4.0L * e * e * degree_bound; };
  long double lo = 0.0L, hi = 1.0L;
  while (f(hi) < gap) hi *= 2.0L;
  for (int it = 0; it < 200; ++it) {
    const long double mid = (lo + hi) / 2.0L;
    (f(mid) < gap ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0L;
}

} // namespace

int main() {
  // Kernel norm of the step function masses=[1,1], values=[[0.2,0.4],[0.4,0.1]]:
  // operator matrix equals the value matrix itself.
  std::printf("kernel_2x2_mixed          = %.15Lf\n",
              spectral_radius_2x2(0.2L, 0.4L, 0.4L, 0.1L));

  // Two-block bipartite graphon (masses p, 1-p, cross value 1) against the
  // constant sqrt(p(1-p)) graphon under the diagonal coupling: the difference
  // kernel acts as [[-pa, (1-p)(1-a)], [p(1-a), -(1-p)a]] with a = sqrt(p(1-p)).
  const long double p = 0.25L;
  const long double a = std::sqrt(p * (1.0L - p));
  std::printf("bipartite_forced_kernel   = %.15Lf\n",
              spectral_radius_2x2(-p * a, (1.0L - p) * (1.0L - a), p * (1.0L - a),
                                  -(1.0L - p) * a));
  std::printf("bipartite_slack_target    = %.15Lf\n", static_cast<long double>(a));

  // Density-gap lower bound roots: e^3 + 4 e^2 D = gap.
  std::printf("gap_root_1_D1             = %.15Lf\n", density_gap_root(1.0L, 1.0L));
  std::printf("gap_root_0.2_D0.5         = %.15Lf\n", density_gap_root(0.2L, 0.5L));

  // Hand sums used by the density tests, written as explicit type sums.
  // 2-path density on the bipartite fixture: sum_y m_y D(y)^2.
  const long double path2_bip =
      p * (1.0L - p) * (1.0L - p) + (1.0L - p) * p * p;
  std::printf("path2_bipartite           = %.15Lf\n", path2_bip);
  // 3-star density: sum_y m_y D(y)^3.
  const long double star3_bip =
      p * (1.0L - p) * (1.0L - p) * (1.0L - p) + (1.0L - p) * p * p * p;
  std::printf("star3_bipartite           = %.15Lf\n", star3_bip);
  // Two disjoint edges: (edge density)^2 with rho = 2 p (1-p).
  const long double rho_bip = 2.0L * p * (1.0L - p);
  std::printf("two_edges_bipartite       = %.15Lf\n", rho_bip * rho_bip);
  // C4 density: sum over type assignments of the 4-cycle, bipartite forces
  // alternating types: 2 * (p(1-p))^2.
  std::printf("c4_bipartite              = %.15Lf\n", 2.0L * p * p * (1.0L - p) * (1.0L - p));
  return 0;
}
