#include "sirmax/live_edge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sirmax {

namespace {

void require_model(const Instance& inst, Model m, const char* fn) {
  if (inst.params.model != m)
    throw std::invalid_argument(std::string(fn) + ": instance model is " +
                                std::string(model_name(inst.params.model)));
}

}  // namespace

LiveEdgeGraph sample_live_ic(const Instance& inst, Rng& rng) {
  require_model(inst, Model::ic, "sample_live_ic");
  LiveEdgeGraph out;
  const DirectedGraph& g = inst.graph;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (const Arc& a : g.out(u))
      if (rng.chance(inst.params.edge_prob[a.edge])) out.live.push_back(a.edge);
  std::sort(out.live.begin(), out.live.end());
  return out;
}

LiveEdgeGraph sample_live_sir(const Instance& inst, Rng& rng) {
  require_model(inst, Model::sir, "sample_live_sir");
  LiveEdgeGraph out;
  const DirectedGraph& g = inst.graph;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto arcs = g.out(u);
    if (arcs.empty()) continue;
    // The node's out-edges stay correlated through its recovery round t:
    // given t, each edge fires within the window independently with
    // probability 1 - (1-beta)^t.
    double t = rng.first_success(inst.params.node_recovery[u]);
    for (const Arc& a : arcs) {
      double beta = inst.params.edge_prob[a.edge];
      double live_p = beta >= 1.0 ? 1.0 : -std::expm1(t * std::log1p(-beta));
      if (rng.chance(live_p)) out.live.push_back(a.edge);
    }
  }
  std::sort(out.live.begin(), out.live.end());
  return out;
}

LiveEdgeGraph sample_live_tsir(const Instance& inst, Rng& rng) {
  require_model(inst, Model::tsir, "sample_live_tsir");
  LiveEdgeGraph out;
  const DirectedGraph& g = inst.graph;
  const std::uint32_t T = inst.params.horizon;
  std::vector<std::pair<EdgeId, std::uint32_t>> picked;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto arcs = g.out(u);
    if (arcs.empty()) continue;
    std::uint32_t rec = rng.first_success_capped(inst.params.node_recovery[u], T);
    std::uint32_t window = std::min(rec, T);
    if (window == 0) continue;
    for (const Arc& a : arcs) {
      std::uint32_t s = rng.first_success_capped(inst.params.edge_prob[a.edge], window);
      if (s <= window) picked.emplace_back(a.edge, s);
    }
  }
  std::sort(picked.begin(), picked.end());
  out.live.reserve(picked.size());
  out.span.reserve(picked.size());
  for (auto [e, s] : picked) {
    out.live.push_back(e);
    out.span.push_back(s);
  }
  return out;
}

LiveEdgeGraph sample_live(const Instance& inst, Rng& rng) {
  switch (inst.params.model) {
    case Model::ic: return sample_live_ic(inst, rng);
    case Model::sir: return sample_live_sir(inst, rng);
    case Model::tsir: return sample_live_tsir(inst, rng);
  }
  throw std::invalid_argument("sample_live: unknown model");
}

std::vector<NodeId> reachable(const Instance& inst, const LiveEdgeGraph& le,
                              std::span<const NodeId> seeds) {
  const DirectedGraph& g = inst.graph;
  for (NodeId v : seeds)
    if (v >= g.num_nodes()) throw std::invalid_argument("seed node out of range");

  if (inst.params.model != Model::tsir) {
    // Plain BFS over the live subgraph.
    std::vector<std::uint8_t> live(g.num_edges(), 0);
    for (EdgeId e : le.live) live[e] = 1;
    std::vector<std::uint8_t> seen(g.num_nodes(), 0);
    std::vector<NodeId> queue, outv;
    for (NodeId v : seeds)
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (const Arc& a : g.out(queue[i]))
        if (live[a.edge] && !seen[a.node]) {
          seen[a.node] = 1;
          queue.push_back(a.node);
        }
    outv = std::move(queue);
    std::sort(outv.begin(), outv.end());
    return outv;
  }

  // tsir: multi-source shortest span-distance, keep nodes within the horizon.
  if (le.span.size() != le.live.size())
    throw std::invalid_argument("reachable: tsir live-edge sample is missing spans");
  const std::uint32_t T = inst.params.horizon;
  constexpr std::uint32_t kFar = 0xFFFFFFFF;
  std::vector<std::uint32_t> weight(g.num_edges(), 0);  // 0 = not live
  for (std::size_t i = 0; i < le.live.size(); ++i) weight[le.live[i]] = le.span[i];

  std::vector<std::uint32_t> dist(g.num_nodes(), kFar);
  std::vector<std::vector<NodeId>> bucket(T + 1);
  for (NodeId v : seeds) {
    dist[v] = 0;
    bucket[0].push_back(v);
  }
  for (std::uint32_t d = 0; d <= T; ++d)
    for (std::size_t i = 0; i < bucket[d].size(); ++i) {
      NodeId u = bucket[d][i];
      if (dist[u] != d) continue;  // stale entry
      for (const Arc& a : g.out(u)) {
        std::uint32_t w = weight[a.edge];
        if (w == 0) continue;
        std::uint32_t nd = d + w;
        if (nd <= T && nd < dist[a.node]) {
          dist[a.node] = nd;
          bucket[nd].push_back(a.node);
        }
      }
    }
  std::vector<NodeId> outv;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (dist[v] != kFar) outv.push_back(v);
  return outv;
}

}  // namespace sirmax
