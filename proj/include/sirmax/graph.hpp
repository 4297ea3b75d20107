#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace sirmax {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class Model { ic, sir, tsir };

std::string_view model_name(Model m);
bool parse_model(std::string_view name, Model& out);

// Neighbor entry: adjacent node plus the id of the connecting edge.
struct Arc {
  NodeId node;
  EdgeId edge;
};

// Directed graph in compressed sparse row form, kept in both directions so
// forward cascades and reverse (toward-root) traversals are equally cheap.
// Edge ids follow construction order and every adjacency list preserves that
// order, so a node's out-list is sorted by edge id.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  // Throws std::invalid_argument on self-loops, parallel edges, or endpoints
  // outside [0, n).
  DirectedGraph(NodeId n, std::vector<std::pair<NodeId, NodeId>> edges);

  NodeId num_nodes() const { return n_; }
  EdgeId num_edges() const { return static_cast<EdgeId>(edges_.size()); }
  std::pair<NodeId, NodeId> edge(EdgeId e) const { return edges_[e]; }

  std::span<const Arc> out(NodeId u) const {
    return {out_.data() + out_off_[u], out_.data() + out_off_[u + 1]};
  }
  std::span<const Arc> in(NodeId u) const {
    return {in_.data() + in_off_[u], in_.data() + in_off_[u + 1]};
  }
  std::size_t out_degree(NodeId u) const { return out_off_[u + 1] - out_off_[u]; }
  std::size_t in_degree(NodeId u) const { return in_off_[u + 1] - in_off_[u]; }

  bool operator==(const DirectedGraph& o) const {
    return n_ == o.n_ && edges_ == o.edges_;
  }

 private:
  NodeId n_ = 0;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::vector<std::size_t> out_off_, in_off_;
  std::vector<Arc> out_, in_;
};

// Per-edge and per-node cascade parameters.  edge_prob holds the IC
// activation probability or the SIR/TSIR per-round transmission probability,
// indexed by edge id.  node_recovery holds per-node recovery probabilities
// and stays empty under IC.  horizon is the TSIR round budget and must be 0
// for the other models.
struct DiffusionParams {
  Model model = Model::ic;
  std::vector<double> edge_prob;
  std::vector<double> node_recovery;
  std::uint32_t horizon = 0;

  bool operator==(const DiffusionParams&) const = default;
};

struct Instance {
  DirectedGraph graph;
  DiffusionParams params;

  bool operator==(const Instance&) const = default;
};

// Builds and validates an instance.  Rules: n >= 1; edge probabilities in
// [0, 1]; recovery probabilities in (0, 1] and given for every node when the
// model is sir/tsir (and absent under ic); horizon only meaningful for tsir.
// Throws std::invalid_argument on violations.
Instance make_instance(NodeId n, Model model,
                       std::vector<std::pair<NodeId, NodeId>> edges,
                       std::vector<double> edge_prob,
                       std::vector<double> node_recovery = {},
                       std::uint32_t horizon = 0);

}  // namespace sirmax
