#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sirmax/graph.hpp"
#include "sirmax/rng.hpp"

namespace sirmax {

// A sampled static view of one cascade: the set of live edges, plus (tsir
// only) the infection span of each live edge, parallel to `live`.
struct LiveEdgeGraph {
  std::vector<EdgeId> live;          // ascending edge ids
  std::vector<std::uint32_t> span;   // tsir spans; empty otherwise
};

// ic: every edge is live independently with its activation probability.
LiveEdgeGraph sample_live_ic(const Instance&, Rng&);

// sir: a node's out-edges share its recovery round, so they are sampled
// jointly — draw the round, then each edge is live independently given it.
LiveEdgeGraph sample_live_sir(const Instance&, Rng&);

// tsir: like sir with the recovery round truncated at the horizon; a live
// edge also records its span (the round of its first successful attempt).
LiveEdgeGraph sample_live_tsir(const Instance&, Rng&);

LiveEdgeGraph sample_live(const Instance&, Rng&);  // dispatch on model

// Influenced set implied by a live-edge sample: plain reachability from the
// seeds (ic/sir), or span-weighted distance <= horizon (tsir).  Ascending.
std::vector<NodeId> reachable(const Instance&, const LiveEdgeGraph&,
                              std::span<const NodeId> seeds);

}  // namespace sirmax
