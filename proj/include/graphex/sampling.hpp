#pragma once

// Generators for the graphex process: Poisson vertex clouds, Bernoulli
// graphon edges, Poisson star leaves and dust edges, the loop variant, the
// weighted intermediate graph and its realization, and vertex subsampling.
//
// Every random draw is addressed by a dedicated substream (per atom, per
// vertex, per pair), so skipping zero-probability draws never shifts other
// draws, parallel trials reproduce serial output, and realize() with the
// same seed reproduces sample_process's graphon edges bit for bit.

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphex/core.hpp"
#include "graphex/rng.hpp"

namespace graphex {

inline constexpr long long infinity_feature = -1;

enum class edge_kind { graphon, star, dust, loop };

struct sampled_vertex {
  double birth_time = 0.0;
  long long feature = infinity_feature; // atom index, or -1 for star/dust endpoints
};

struct sampled_edge {
  std::size_t u = 0, v = 0;
  edge_kind kind = edge_kind::graphon;
};

struct sampled_graph {
  double horizon = 0.0;
  bool loop_mode = false;
  bool keep_isolated = false;
  std::vector<sampled_vertex> vertices;
  std::vector<sampled_edge> edges;
};

struct weight_entry {
  std::size_t u = 0, v = 0; // u < v
  double value = 0.0;
};

struct weighted_graph {
  double horizon = 0.0;
  std::vector<sampled_vertex> vertices;
  std::vector<weight_entry> weights; // nonzero entries only
};

namespace detail {

// Stream ids for the independent draw families of one sample.
inline constexpr std::uint64_t stream_counts = 0x10;
inline constexpr std::uint64_t stream_births = 0x20;
inline constexpr std::uint64_t stream_pairs = 0x30;
inline constexpr std::uint64_t stream_star_counts = 0x40;
inline constexpr std::uint64_t stream_star_births = 0x41;
inline constexpr std::uint64_t stream_dust = 0x50;
inline constexpr std::uint64_t stream_loops = 0x60;

inline std::vector<sampled_vertex> poisson_cloud(const step_graphex& g, double t, const rng& root) {
  std::vector<sampled_vertex> cloud;
  const rng counts = root.substream(stream_counts);
  const rng births = root.substream(stream_births);
  for (std::size_t i = 0; i < g.size(); ++i) {
    rng ci = counts.substream(i);
    const long long n = ci.poisson(t * g.masses[i]);
    const rng bi = births.substream(i);
    for (long long k = 0; k < n; ++k) {
      rng bk = bi.substream(static_cast<std::uint64_t>(k));
      cloud.push_back({bk.u01() * t, static_cast<long long>(i)});
    }
  }
  return cloud;
}

inline void graphon_edges(const step_graphex& g, const std::vector<sampled_vertex>& cloud,
                          const rng& pair_root, std::vector<sampled_edge>& edges) {
  for (std::size_t u = 0; u < cloud.size(); ++u) {
    const rng ru = pair_root.substream(u);
    const auto fu = static_cast<std::size_t>(cloud[u].feature);
    for (std::size_t v = u + 1; v < cloud.size(); ++v) {
      const double p = g.graphon[fu][static_cast<std::size_t>(cloud[v].feature)];
      if (p <= 0.0) continue;
      rng rv = ru.substream(v);
      if (p >= 1.0 || rv.bernoulli(p)) edges.push_back({u, v, edge_kind::graphon});
    }
  }
}

inline void strip_isolated(sampled_graph& s) {
  std::vector<int> touched(s.vertices.size(), 0);
  for (const auto& e : s.edges) touched[e.u] = touched[e.v] = 1;
  std::vector<std::size_t> remap(s.vertices.size(), 0);
  std::vector<sampled_vertex> kept;
  for (std::size_t i = 0; i < s.vertices.size(); ++i)
    if (touched[i]) {
      remap[i] = kept.size();
      kept.push_back(s.vertices[i]);
    }
  s.vertices = std::move(kept);
  for (auto& e : s.edges) {
    e.u = remap[e.u];
    e.v = remap[e.v];
  }
}

// Star leaves and dust endpoints append to the vertex list; graphon-edge
// draws only ever touch the first n_roots vertices, so the two stages commute.
inline void append_stars_and_dust(const step_graphex& g, double t, const rng& root,
                                  sampled_graph& s, std::size_t n_roots) {
  const rng star_counts = root.substream(stream_star_counts);
  const rng star_births = root.substream(stream_star_births);
  for (std::size_t u = 0; u < n_roots; ++u) {
    const double rate = t * g.star[static_cast<std::size_t>(s.vertices[u].feature)];
    if (rate <= 0.0) continue;
    rng cu = star_counts.substream(u);
    const long long leaves = cu.poisson(rate);
    const rng bu = star_births.substream(u);
    for (long long k = 0; k < leaves; ++k) {
      rng bk = bu.substream(static_cast<std::uint64_t>(k));
      s.vertices.push_back({bk.u01() * t, infinity_feature});
      s.edges.push_back({u, s.vertices.size() - 1, edge_kind::star});
    }
  }

  if (g.dust > 0.0) {
    rng d = root.substream(stream_dust);
    const long long dust_edges = d.poisson(t * t * g.dust);
    for (long long k = 0; k < dust_edges; ++k) {
      rng dk = d.substream(static_cast<std::uint64_t>(k));
      s.vertices.push_back({dk.u01() * t, infinity_feature});
      s.vertices.push_back({dk.u01() * t, infinity_feature});
      s.edges.push_back({s.vertices.size() - 2, s.vertices.size() - 1, edge_kind::dust});
    }
  }
}

inline sampled_graph sample_impl(const step_graphex& g, double t, std::uint64_t seed,
                                 bool keep_isolated, bool loops) {
  require_valid(g);
  if (g.signed_mode) throw std::invalid_argument("sample: unsigned graphexes only");
  if (!(t > 0.0)) throw std::domain_error("sample: horizon must be positive");
  const rng root(seed);
  sampled_graph s;
  s.horizon = t;
  s.loop_mode = loops;
  s.keep_isolated = keep_isolated;
  s.vertices = poisson_cloud(g, t, root);
  const std::size_t n_roots = s.vertices.size();
  graphon_edges(g, s.vertices, root.substream(stream_pairs), s.edges);
  append_stars_and_dust(g, t, root, s, n_roots);

  if (loops) {
    const rng lp = root.substream(stream_loops);
    for (std::size_t u = 0; u < n_roots; ++u) {
      const auto fu = static_cast<std::size_t>(s.vertices[u].feature);
      const double p = g.graphon[fu][fu];
      if (p <= 0.0) continue;
      rng lu = lp.substream(u);
      if (p >= 1.0 || lu.bernoulli(p)) s.edges.push_back({u, u, edge_kind::loop});
    }
  }

  if (!keep_isolated) detail::strip_isolated(s);
  return s;
}

} // namespace detail

inline sampled_graph sample_process(const step_graphex& g, double t, std::uint64_t seed,
                                    bool keep_isolated = false) {
  return detail::sample_impl(g, t, seed, keep_isolated, false);
}

inline sampled_graph sample_with_loops(const step_graphex& g, double t, std::uint64_t seed,
                                       bool keep_isolated = false) {
  return detail::sample_impl(g, t, seed, keep_isolated, true);
}

// Two samples over one shared Poisson vertex cloud; edge, star, and dust
// draws are independent between the two. Both graphs keep isolated vertices
// so the shared cloud stays aligned by index.
inline std::pair<sampled_graph, sampled_graph> sample_coupled(const step_graphex& g1,
                                                              const step_graphex& g2, double t,
                                                              std::uint64_t seed) {
  require_valid(g1);
  require_valid(g2);
  if (g1.signed_mode || g2.signed_mode)
    throw std::invalid_argument("sample: unsigned graphexes only");
  if (!(t > 0.0)) throw std::domain_error("sample: horizon must be positive");
  if (g1.masses.size() != g2.masses.size())
    throw std::invalid_argument("sample_coupled: graphexes live on different spaces");
  for (std::size_t i = 0; i < g1.masses.size(); ++i)
    if (std::abs(g1.masses[i] - g2.masses[i]) > 1e-12 * std::max(1.0, g1.masses[i]))
      throw std::invalid_argument("sample_coupled: graphexes live on different spaces");

  const rng root(seed);
  const auto cloud = detail::poisson_cloud(g1, t, root.substream(0xC0));
  std::pair<sampled_graph, sampled_graph> out;
  const step_graphex* gs[2] = {&g1, &g2};
  sampled_graph* ss[2] = {&out.first, &out.second};
  for (int k = 0; k < 2; ++k) {
    sampled_graph& s = *ss[k];
    s.horizon = t;
    s.keep_isolated = true;
    s.vertices = cloud;
    const rng own = root.substream(k == 0 ? 0xE1 : 0xE2);
    detail::graphon_edges(*gs[k], cloud, own.substream(detail::stream_pairs), s.edges);
    detail::append_stars_and_dust(*gs[k], t, own, s, cloud.size());
  }
  return out;
}

// Vertex cloud plus edge probabilities; shares the cloud streams with
// sample_process, so matched seeds give matched vertices.
inline weighted_graph sample_weighted(const step_graphex& g, double t, std::uint64_t seed) {
  require_valid(g);
  if (g.signed_mode) throw std::invalid_argument("sample: unsigned graphexes only");
  if (!(t > 0.0)) throw std::domain_error("sample: horizon must be positive");
  weighted_graph h;
  h.horizon = t;
  h.vertices = detail::poisson_cloud(g, t, rng(seed));
  for (std::size_t u = 0; u < h.vertices.size(); ++u) {
    const auto fu = static_cast<std::size_t>(h.vertices[u].feature);
    for (std::size_t v = u + 1; v < h.vertices.size(); ++v) {
      const double w = g.graphon[fu][static_cast<std::size_t>(h.vertices[v].feature)];
      if (w > 0.0) h.weights.push_back({u, v, w});
    }
  }
  return h;
}

inline sampled_graph realize(const weighted_graph& h, std::uint64_t seed,
                             bool keep_isolated = false) {
  sampled_graph s;
  s.horizon = h.horizon;
  s.keep_isolated = keep_isolated;
  s.vertices = h.vertices;
  const rng pair_root = rng(seed).substream(detail::stream_pairs);
  for (const auto& [u, v, w] : h.weights) {
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("realize: weight outside [0,1]");
    if (u == v) throw std::invalid_argument("realize: loop weight");
    rng rv = pair_root.substream(u).substream(v);
    if (w >= 1.0 || rv.bernoulli(w)) s.edges.push_back({u, v, edge_kind::graphon});
  }
  if (!keep_isolated) detail::strip_isolated(s);
  return s;
}

// Labeled sample to a plain simple graph; loop edges are dropped.
inline plain_graph to_plain(const sampled_graph& s) {
  plain_graph g;
  g.n = s.vertices.size();
  for (const auto& e : s.edges)
    if (e.kind != edge_kind::loop) g.edges.emplace_back(e.u, e.v);
  return g;
}

inline plain_graph subsample(const plain_graph& g, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("subsample: p outside [0,1]");
  const rng root(seed);
  std::vector<int> kept(g.n, 0);
  for (std::size_t v = 0; v < g.n; ++v) {
    rng rv = root.substream(v);
    kept[v] = p >= 1.0 || (p > 0.0 && rv.bernoulli(p));
  }
  std::vector<int> touched(g.n, 0);
  for (const auto& [u, v] : g.edges)
    if (kept[u] && kept[v]) touched[u] = touched[v] = 1;
  std::vector<std::size_t> remap(g.n, 0);
  std::size_t next = 0;
  for (std::size_t v = 0; v < g.n; ++v)
    if (touched[v]) remap[v] = next++;
  plain_graph out;
  out.n = next;
  for (const auto& [u, v] : g.edges)
    if (kept[u] && kept[v]) out.edges.emplace_back(remap[u], remap[v]);
  return out;
}

inline plain_graph subsample(const sampled_graph& s, double p, std::uint64_t seed) {
  return subsample(to_plain(s), p, seed);
}

inline const char* to_string(edge_kind k) {
  switch (k) {
    case edge_kind::graphon: return "graphon";
    case edge_kind::star: return "star";
    case edge_kind::dust: return "dust";
    case edge_kind::loop: return "loop";
  }
  return "graphon";
}

inline std::string write_graph(const sampled_graph& s) {
  std::string out = "T=" + format_double(s.horizon) + " mode=";
  out += s.loop_mode ? "loops" : "plain";
  out += '\n';
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    out += "v " + std::to_string(i) + ' ' + format_double(s.vertices[i].birth_time) + ' ';
    out += s.vertices[i].feature < 0 ? std::string("inf") : std::to_string(s.vertices[i].feature);
    out += '\n';
  }
  for (const auto& e : s.edges) {
    out += "e " + std::to_string(e.u) + ' ' + std::to_string(e.v) + ' ';
    out += to_string(e.kind);
    out += '\n';
  }
  return out;
}

inline sampled_graph read_graph(const std::string& text) {
  sampled_graph s;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("graph file: missing header");
  {
    std::istringstream h(line);
    std::string tpart, mpart;
    h >> tpart >> mpart;
    if (tpart.rfind("T=", 0) != 0 || mpart.rfind("mode=", 0) != 0)
      throw std::invalid_argument("graph file: malformed header");
    s.horizon = std::stod(tpart.substr(2));
    const std::string mode = mpart.substr(5);
    if (mode != "plain" && mode != "loops") throw std::invalid_argument("graph file: unknown mode");
    s.loop_mode = mode == "loops";
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::size_t id;
      double birth;
      std::string feat;
      if (!(ls >> id >> birth >> feat)) throw std::invalid_argument("graph file: bad vertex line");
      if (id != s.vertices.size()) throw std::invalid_argument("graph file: vertex ids must be dense");
      s.vertices.push_back({birth, feat == "inf" ? infinity_feature : std::stoll(feat)});
    } else if (tag == "e") {
      std::size_t u, v;
      std::string kind;
      if (!(ls >> u >> v >> kind)) throw std::invalid_argument("graph file: bad edge line");
      if (u >= s.vertices.size() || v >= s.vertices.size())
        throw std::invalid_argument("graph file: edge endpoint out of range");
      edge_kind k;
      if (kind == "graphon")
        k = edge_kind::graphon;
      else if (kind == "star")
        k = edge_kind::star;
      else if (kind == "dust")
        k = edge_kind::dust;
      else if (kind == "loop")
        k = edge_kind::loop;
      else
        throw std::invalid_argument("graph file: unknown edge kind");
      s.edges.push_back({u, v, k});
    } else {
      throw std::invalid_argument("graph file: unknown line tag");
    }
  }
  return s;
}

} // namespace graphex
