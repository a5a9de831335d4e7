#pragma once

// Homomorphism densities of patterns in graphexes, evaluated as exact finite
// sums over atom assignments: pendant vertices integrate to marginal factors,
// the degree>=2 core enumerates atoms, single-edge components contribute the
// edge density. Also per-edge mixed densities, rooted densities with one
// vertex pinned, and injective homomorphism counting in finite graphs.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphex/core.hpp"
#include "graphex/sampling.hpp"

namespace graphex {

// Multigraph pattern, no loops; vertices 0..n-1.
struct pattern_graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline pattern_graph parse_pattern(const std::string& text) {
  pattern_graph f;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string token = text.substr(pos, comma - pos);
    token.erase(std::remove(token.begin(), token.end(), ' '), token.end());
    const std::size_t dash = token.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == token.size())
      throw std::invalid_argument("pattern: expected \"u-v\" tokens, got \"" + token + "\"");
    const std::size_t u = std::stoul(token.substr(0, dash));
    const std::size_t v = std::stoul(token.substr(dash + 1));
    if (u == v) throw std::invalid_argument("pattern: loops are not allowed");
    f.edges.emplace_back(u, v);
    f.n = std::max({f.n, u + 1, v + 1});
    pos = comma + 1;
  }
  if (f.edges.empty()) throw std::invalid_argument("pattern: no edges");
  return f;
}

inline const std::vector<std::string>& preset_pattern_names() {
  static const std::vector<std::string> names = {"edge",  "path2", "triangle",
                                                 "star3", "c4",    "two_edges"};
  return names;
}

inline pattern_graph preset_pattern(const std::string& name) {
  if (name == "edge") return parse_pattern("0-1");
  if (name == "path2") return parse_pattern("0-1,1-2");
  if (name == "triangle") return parse_pattern("0-1,1-2,2-0");
  if (name == "star3") return parse_pattern("0-1,0-2,0-3");
  if (name == "c4") return parse_pattern("0-1,1-2,2-3,3-0");
  if (name == "two_edges") return parse_pattern("0-1,2-3");
  throw std::invalid_argument("unknown pattern preset: " + name);
}

struct density_opts {
  std::size_t core_cap = 8;  // largest degree>=2 core enumerated per component
  std::size_t atom_cap = 64; // largest atom count enumerated
};

namespace detail {

inline std::vector<std::size_t> pattern_degrees(const pattern_graph& f) {
  if (f.edges.empty()) throw std::invalid_argument("pattern: no edges");
  std::vector<std::size_t> deg(f.n, 0);
  for (const auto& [u, v] : f.edges) {
    if (u >= f.n || v >= f.n) throw std::invalid_argument("pattern: endpoint out of range");
    if (u == v) throw std::invalid_argument("pattern: loops are not allowed");
    ++deg[u];
    ++deg[v];
  }
  for (std::size_t v = 0; v < f.n; ++v)
    if (deg[v] == 0) throw std::invalid_argument("pattern: isolated vertex " + std::to_string(v));
  return deg;
}

// Edge indices grouped into connected components.
inline std::vector<std::vector<std::size_t>> pattern_components(const pattern_graph& f) {
  std::vector<std::size_t> comp(f.n, static_cast<std::size_t>(-1));
  std::vector<std::vector<std::size_t>> adj(f.n);
  for (std::size_t e = 0; e < f.edges.size(); ++e) {
    adj[f.edges[e].first].push_back(e);
    adj[f.edges[e].second].push_back(e);
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < f.n; ++s) {
    if (comp[s] != static_cast<std::size_t>(-1)) continue;
    const std::size_t id = out.size();
    out.emplace_back();
    std::vector<std::size_t> stack = {s};
    comp[s] = id;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t e : adj[v]) {
        const auto [a, b] = f.edges[e];
        const std::size_t w = a == v ? b : a;
        if (comp[w] == static_cast<std::size_t>(-1)) {
          comp[w] = id;
          stack.push_back(w);
        }
      }
    }
  }
  for (std::size_t e = 0; e < f.edges.size(); ++e) out[comp[f.edges[e].first]].push_back(e);
  return out;
}

// Per-edge view: graphon matrix plus full marginal (graphon part + star).
struct edge_view {
  const step_graphex* g = nullptr;
  std::vector<double> degree; // D at each atom
};

inline std::vector<edge_view> make_edge_views(const pattern_graph& f,
                                              const std::vector<const step_graphex*>& per_edge) {
  if (per_edge.size() != f.edges.size())
    throw std::invalid_argument("mixed density: one graphex per edge required");
  std::map<const step_graphex*, std::vector<double>> cache;
  const auto& base = per_edge.at(0)->masses;
  std::vector<edge_view> views(per_edge.size());
  for (std::size_t e = 0; e < per_edge.size(); ++e) {
    const step_graphex* g = per_edge[e];
    if (g->masses.size() != base.size())
      throw std::invalid_argument("mixed density: graphexes live on different spaces");
    for (std::size_t i = 0; i < base.size(); ++i)
      if (std::abs(g->masses[i] - base[i]) > 1e-12 * std::max(1.0, std::abs(base[i])))
        throw std::invalid_argument("mixed density: graphexes live on different spaces");
    auto it = cache.find(g);
    if (it == cache.end()) it = cache.emplace(g, marginal(*g).values).first;
    views[e].g = g;
    views[e].degree = it->second;
  }
  return views;
}

// One connected component with >= 2 edges, optionally with one vertex pinned
// to a fixed atom (pin < 0 means unrooted).
inline double component_sum(const pattern_graph& f, const std::vector<std::size_t>& comp_edges,
                            const std::vector<std::size_t>& deg,
                            const std::vector<edge_view>& views, long long pin_vertex,
                            std::size_t pin_atom, const density_opts& opts) {
  const auto& masses = views[comp_edges[0]].g->masses;
  const std::size_t m = masses.size();
  if (m > opts.atom_cap) throw std::invalid_argument("density: atom count exceeds cap");

  // Core = degree>=2 vertices, plus the pinned vertex when rooted.
  std::vector<std::size_t> core;
  std::set<std::size_t> seen;
  for (std::size_t e : comp_edges)
    for (std::size_t v : {f.edges[e].first, f.edges[e].second})
      if ((deg[v] >= 2 || static_cast<long long>(v) == pin_vertex) && seen.insert(v).second)
        core.push_back(v);
  std::sort(core.begin(), core.end());
  if (pin_vertex >= 0) {
    // Enumerating slots exclude the pin; keep the pin at slot 0 for lookup.
    auto it = std::find(core.begin(), core.end(), static_cast<std::size_t>(pin_vertex));
    std::rotate(core.begin(), it, it + 1);
  }
  const std::size_t free_from = pin_vertex >= 0 ? 1 : 0;
  if (core.size() - free_from > opts.core_cap)
    throw std::invalid_argument("density: component core exceeds cap");

  std::vector<long long> slot_of(f.n, -1);
  for (std::size_t k = 0; k < core.size(); ++k) slot_of[core[k]] = static_cast<long long>(k);

  // Factors attached to the moment a slot is assigned: core edges whose later
  // endpoint it is, and pendant marginals hanging off it.
  struct slot_factors {
    std::vector<std::pair<std::size_t, std::size_t>> back_edges; // (earlier slot, edge idx)
    std::vector<std::size_t> pendant_edges;
  };
  std::vector<slot_factors> factors(core.size());
  for (std::size_t e : comp_edges) {
    const auto [u, v] = f.edges[e];
    const long long su = slot_of[u], sv = slot_of[v];
    if (su >= 0 && sv >= 0) {
      const auto later = static_cast<std::size_t>(std::max(su, sv));
      const auto earlier = static_cast<std::size_t>(std::min(su, sv));
      factors[later].back_edges.emplace_back(earlier, e);
    } else {
      // Pendant endpoint: degree 1 and not the pin. The marginal factor sits
      // on the core endpoint. A rooted degree-1 pin never reaches here.
      const std::size_t core_end = su >= 0 ? u : v;
      factors[static_cast<std::size_t>(slot_of[core_end])].pendant_edges.push_back(e);
    }
  }

  std::vector<std::size_t> assign(core.size(), 0);
  if (pin_vertex >= 0) assign[0] = pin_atom;

  double total = 0.0;
  // Iterative depth-first product accumulation with early zero pruning.
  std::vector<double> partial(core.size() + 1, 1.0);
  const auto slot_value = [&](std::size_t k, std::size_t z) {
    double val = 1.0;
    assign[k] = z;
    if (k >= free_from) val *= masses[z];
    for (const auto& [earlier, e] : factors[k].back_edges) {
      val *= views[e].g->graphon[assign[earlier]][z];
      if (val == 0.0) return 0.0;
    }
    for (std::size_t e : factors[k].pendant_edges) {
      val *= views[e].degree[z];
      if (val == 0.0) return 0.0;
    }
    return val;
  };

  // Slot 0 is fixed when rooted.
  std::size_t k = free_from;
  if (pin_vertex >= 0) {
    partial[1] = slot_value(0, pin_atom);
    if (partial[1] == 0.0) return 0.0;
    if (core.size() == 1) return partial[1];
  }
  std::vector<std::size_t> cursor(core.size(), 0);
  while (true) {
    if (cursor[k] == m) {
      if (k == free_from) break;
      cursor[k] = 0;
      --k;
      ++cursor[k];
      continue;
    }
    const double v = slot_value(k, cursor[k]);
    if (v == 0.0) {
      ++cursor[k];
      continue;
    }
    partial[k + 1] = partial[k] * v;
    if (k + 1 == core.size()) {
      total += partial[k + 1];
      ++cursor[k];
    } else {
      ++k;
      cursor[k] = 0;
    }
  }
  return total;
}

} // namespace detail

inline double mixed_density(const pattern_graph& f,
                            const std::vector<const step_graphex*>& per_edge,
                            const density_opts& opts = {}) {
  const auto deg = detail::pattern_degrees(f);
  const auto views = detail::make_edge_views(f, per_edge);
  double product = 1.0;
  for (const auto& comp : detail::pattern_components(f)) {
    if (comp.size() == 1)
      product *= edge_density(*views[comp[0]].g);
    else
      product *= detail::component_sum(f, comp, deg, views, -1, 0, opts);
  }
  return product;
}

inline double hom_density(const pattern_graph& f, const step_graphex& g,
                          const density_opts& opts = {}) {
  return mixed_density(f, std::vector<const step_graphex*>(f.edges.size(), &g), opts);
}

// Density conditioned on one vertex landing on atom x; no mass factor for the
// root. Integrating against the masses recovers mixed_density when the root
// has degree >= 2.
inline double rooted_density(const pattern_graph& f, std::size_t root, std::size_t x,
                             const std::vector<const step_graphex*>& per_edge,
                             const density_opts& opts = {}) {
  const auto deg = detail::pattern_degrees(f);
  if (root >= f.n) throw std::invalid_argument("rooted density: root out of range");
  const auto views = detail::make_edge_views(f, per_edge);
  if (x >= views[0].g->size()) throw std::invalid_argument("rooted density: atom out of range");
  const auto comps = detail::pattern_components(f);
  if (comps.size() != 1) throw std::invalid_argument("rooted density: pattern must be connected");
  if (f.edges.size() == 1) return views[0].degree[x];
  return detail::component_sum(f, comps[0], deg, views, static_cast<long long>(root), x, opts);
}

inline double rooted_density(const pattern_graph& f, std::size_t root, std::size_t x,
                             const step_graphex& g, const density_opts& opts = {}) {
  return rooted_density(f, root, x, std::vector<const step_graphex*>(f.edges.size(), &g), opts);
}

// Ordered injective maps of f into g that carry every pattern edge to an edge.
inline long long inj_count(const pattern_graph& f, const plain_graph& g) {
  const auto deg_f = detail::pattern_degrees(f);
  {
    std::set<std::pair<std::size_t, std::size_t>> uniq;
    for (auto [u, v] : f.edges) {
      if (u > v) std::swap(u, v);
      if (!uniq.emplace(u, v).second)
        throw std::invalid_argument("inj_count: pattern must be simple");
    }
  }
  std::vector<std::set<std::size_t>> adj(g.n);
  for (const auto& [u, v] : g.edges) {
    if (u >= g.n || v >= g.n) throw std::invalid_argument("inj_count: edge endpoint out of range");
    if (u == v) continue;
    adj[u].insert(v);
    adj[v].insert(u);
  }

  // Visit order: greedy BFS from high degree, so each vertex after the first
  // of its component has an already-assigned neighbor.
  std::vector<std::size_t> order;
  std::vector<std::vector<std::size_t>> fadj(f.n);
  for (std::size_t e = 0; e < f.edges.size(); ++e) {
    fadj[f.edges[e].first].push_back(f.edges[e].second);
    fadj[f.edges[e].second].push_back(f.edges[e].first);
  }
  std::vector<char> queued(f.n, 0);
  while (order.size() < f.n) {
    std::size_t best = f.n;
    for (std::size_t v = 0; v < f.n; ++v)
      if (!queued[v] && (best == f.n || deg_f[v] > deg_f[best])) best = v;
    std::vector<std::size_t> frontier = {best};
    queued[best] = 1;
    while (!frontier.empty()) {
      const std::size_t v = frontier.front();
      frontier.erase(frontier.begin());
      order.push_back(v);
      for (std::size_t w : fadj[v])
        if (!queued[w]) {
          queued[w] = 1;
          frontier.push_back(w);
        }
    }
  }
  std::vector<std::vector<std::size_t>> earlier(f.n); // assigned neighbors at each step
  {
    std::vector<long long> pos(f.n, -1);
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<long long>(k);
    for (std::size_t k = 0; k < order.size(); ++k)
      for (std::size_t w : fadj[order[k]])
        if (pos[w] < static_cast<long long>(k)) earlier[k].push_back(w);
  }

  std::vector<long long> image(f.n, -1);
  std::vector<char> used(g.n, 0);
  long long count = 0;
  const std::function<void(std::size_t)> descend = [&](std::size_t k) {
    if (k == order.size()) {
      ++count;
      return;
    }
    const std::size_t v = order[k];
    const auto try_cand = [&](std::size_t cand) {
      if (used[cand] || adj[cand].size() < deg_f[v]) return;
      for (std::size_t w : earlier[k])
        if (!adj[cand].count(static_cast<std::size_t>(image[w]))) return;
      used[cand] = 1;
      image[v] = static_cast<long long>(cand);
      descend(k + 1);
      used[cand] = 0;
      image[v] = -1;
    };
    if (!earlier[k].empty()) {
      for (std::size_t cand : adj[static_cast<std::size_t>(image[earlier[k][0]])]) try_cand(cand);
    } else {
      for (std::size_t cand = 0; cand < g.n; ++cand) try_cand(cand);
    }
  };
  descend(0);
  return count;
}

inline long long inj_count(const pattern_graph& f, const sampled_graph& s) {
  return inj_count(f, to_plain(s));
}

// Density deviation bound for a simple connected pattern with n >= 3 vertices
// on (C,D)-bounded graphexes sharing a space, in terms of the kernel norm of
// the graphon gap and the L2 norm of the marginal gap.
inline double counting_lemma_bound(const pattern_graph& f, double c_bound, double d_bound,
                                   double eps) {
  detail::pattern_degrees(f);
  if (detail::pattern_components(f).size() != 1)
    throw std::invalid_argument("counting bound: pattern must be connected");
  if (f.n < 3) throw std::invalid_argument("counting bound: need at least 3 vertices");
  const double c_tilde = std::max(c_bound, std::sqrt(c_bound * d_bound));
  return static_cast<double>(f.edges.size()) * eps * c_tilde *
         std::pow(d_bound, static_cast<double>(f.n) - 3.0);
}

} // namespace graphex
