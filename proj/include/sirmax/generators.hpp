#pragma once

#include "sirmax/graph.hpp"
#include "sirmax/rng.hpp"

namespace sirmax {

// Synthetic instance families.  `beta` is the per-edge transmission
// probability (used directly as the activation probability under ic for the
// plain families); `gamma` is the per-node recovery probability and is
// ignored under ic except by the gadget families, which translate their
// dashed edges to the matched IC activation probability so the ic and sir
// versions of a gadget have identical per-edge marginals.
struct GeneratorSpec {
  enum class Kind { erdos_renyi, star, path, fan_gadget, choice_gadget };
  Kind kind = Kind::erdos_renyi;
  Model model = Model::sir;
  std::uint32_t horizon = 0;  // tsir only

  // erdos_renyi: every ordered pair becomes an edge with prob edge_density.
  NodeId n = 0;
  double edge_density = 0.0;

  // star: node 0 points at `leaves` leaves.  path: a chain of `length` edges.
  NodeId leaves = 0;
  NodeId length = 0;

  // fan_gadget: node v fans out through b dashed edges to b middle nodes,
  // which all point at a hub u via deterministic edges; u feeds n0 sinks.
  // Total: 2 + b + n0 nodes, 2b + n0 edges.
  NodeId b = 0;
  NodeId n0 = 0;

  // choice_gadget: a star whose center competes against the fan gadget's v.
  // Node 0 points at star_leaves leaves with transmission left_edge_prob;
  // a separate node v feeds gadget_copies copies of the fan gadget that
  // share only v.
  NodeId star_leaves = 0;
  NodeId gadget_copies = 0;
  double left_edge_prob = 0.0;

  double beta = 0.0;
  double gamma = 0.0;
};

// Deterministic given (spec, rng state); only erdos_renyi consumes
// randomness.  Throws std::invalid_argument on inconsistent specs.
Instance generate(const GeneratorSpec& spec, Rng& rng);

}  // namespace sirmax
