#include "sirmax/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace sirmax {

std::string_view model_name(Model m) {
  switch (m) {
    case Model::ic: return "ic";
    case Model::sir: return "sir";
    case Model::tsir: return "tsir";
  }
  return "?";
}

bool parse_model(std::string_view name, Model& out) {
  if (name == "ic") { out = Model::ic; return true; }
  if (name == "sir") { out = Model::sir; return true; }
  if (name == "tsir") { out = Model::tsir; return true; }
  return false;
}

DirectedGraph::DirectedGraph(NodeId n, std::vector<std::pair<NodeId, NodeId>> edges)
    : n_(n), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    auto [u, v] = edges_[i];
    if (u >= n_ || v >= n_)
      throw std::invalid_argument("edge " + std::to_string(i) + " endpoint out of range");
    if (u == v)
      throw std::invalid_argument("self-loop at node " + std::to_string(u));
  }

  out_off_.assign(n_ + 1, 0);
  in_off_.assign(n_ + 1, 0);
  for (auto [u, v] : edges_) {
    ++out_off_[u + 1];
    ++in_off_[v + 1];
  }
  for (NodeId i = 0; i < n_; ++i) {
    out_off_[i + 1] += out_off_[i];
    in_off_[i + 1] += in_off_[i];
  }

  out_.resize(edges_.size());
  in_.resize(edges_.size());
  std::vector<std::size_t> opos(out_off_.begin(), out_off_.end() - 1);
  std::vector<std::size_t> ipos(in_off_.begin(), in_off_.end() - 1);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    auto [u, v] = edges_[e];
    out_[opos[u]++] = {v, e};
    in_[ipos[v]++] = {u, e};
  }

  // Parallel edges would make per-edge probabilities ambiguous; reject them.
  std::vector<NodeId> targets;
  for (NodeId u = 0; u < n_; ++u) {
    auto arcs = out(u);
    if (arcs.size() < 2) continue;
    targets.clear();
    for (const Arc& a : arcs) targets.push_back(a.node);
    std::sort(targets.begin(), targets.end());
    if (std::adjacent_find(targets.begin(), targets.end()) != targets.end())
      throw std::invalid_argument("parallel edge out of node " + std::to_string(u));
  }
}

Instance make_instance(NodeId n, Model model,
                       std::vector<std::pair<NodeId, NodeId>> edges,
                       std::vector<double> edge_prob,
                       std::vector<double> node_recovery,
                       std::uint32_t horizon) {
  if (n == 0) throw std::invalid_argument("node count must be positive");
  if (edge_prob.size() != edges.size())
    throw std::invalid_argument("edge probability count does not match edge count");
  // IC allows p = 0 (an edge that never fires); SIR/TSIR transmission
  // probabilities live in (0,1].
  const double lo = model == Model::ic ? 0.0 : std::numeric_limits<double>::denorm_min();
  for (std::size_t i = 0; i < edge_prob.size(); ++i)
    if (!(edge_prob[i] >= lo && edge_prob[i] <= 1.0))
      throw std::invalid_argument("edge " + std::to_string(i) + " probability out of " +
                                  (model == Model::ic ? "[0,1]" : "(0,1]"));

  if (model == Model::ic) {
    if (!node_recovery.empty())
      throw std::invalid_argument("recovery probabilities are not meaningful under ic");
  } else {
    if (node_recovery.size() != n)
      throw std::invalid_argument("need one recovery probability per node");
    for (NodeId v = 0; v < n; ++v)
      if (!(node_recovery[v] > 0.0 && node_recovery[v] <= 1.0))
        throw std::invalid_argument("node " + std::to_string(v) +
                                    " recovery probability out of (0,1]");
  }
  if (model != Model::tsir && horizon != 0)
    throw std::invalid_argument("horizon is only meaningful under tsir");

  Instance inst;
  inst.graph = DirectedGraph(n, std::move(edges));
  inst.params.model = model;
  inst.params.edge_prob = std::move(edge_prob);
  inst.params.node_recovery = std::move(node_recovery);
  inst.params.horizon = horizon;
  return inst;
}

}  // namespace sirmax
