#pragma once

#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "sirmax/graph.hpp"
#include "sirmax/rng.hpp"

namespace sirmax {

// One reverse-reachable sample: the nodes that would have influenced `root`
// in a cascade drawn from the model's live-edge distribution.
struct RRSet {
  NodeId root = 0;
  std::vector<NodeId> members;  // ascending, includes root
  std::uint64_t work = 0;       // edges examined while sampling
};

// Test hook for the tsir sampler: everything it recorded before the
// horizon prune.
struct TsirSampleTrace {
  std::vector<NodeId> visited;  // nodes reached ignoring the horizon
  std::vector<std::tuple<NodeId, NodeId, std::uint32_t>> arcs;  // (src, dst, span)
};

// ic: reverse BFS revealing each in-edge of a member once.
RRSet sample_rr_ic(const Instance&, NodeId root, Rng&);

// sir: candidates outside the set are visited smallest-id first; a visit
// reveals the candidate's not-yet-revealed edges into the set in edge-id
// order, each live with the probability conditioned on the candidate's
// previously blocked edges, and stops at the first live one.  Revealed
// blocked edges stay blocked for the whole sample.
RRSet sample_rr_sir(const Instance&, NodeId root, Rng&);

// tsir: reverse traversal recording a span for every edge whose first
// transmission success lands inside min(recovery round, horizon); the
// recorded graph is then pruned to span-distance <= horizon from the root.
RRSet sample_rr_tsir(const Instance&, NodeId root, Rng&, TsirSampleTrace* trace = nullptr);

RRSet sample_rr(const Instance&, NodeId root, Rng&);  // dispatch on model

// A growable batch of RR samples with an inverted member index.  Sample i
// draws its root uniformly and consumes Rng::stream(master_seed, i), so the
// collection's contents depend only on (instance, master_seed, size) — not
// on the thread count or on how growth was split into calls.
class RRCollection {
 public:
  explicit RRCollection(const Instance& inst);

  // Injects literal member sets instead of sampling (deterministic fixture
  // for tests and benchmarks).  Each set must be non-empty with in-range
  // nodes; its smallest node doubles as the root.
  RRCollection(const Instance& inst, const std::vector<std::vector<NodeId>>& sets);

  const Instance& instance() const { return *inst_; }

  // Samples until the collection holds `count` sets (count must be
  // positive; a target at or below the current size is already satisfied).
  void grow(std::uint64_t count, std::uint64_t master_seed, int threads = 0);

  std::uint64_t size() const { return roots_.size(); }
  NodeId root(std::uint64_t i) const { return roots_[i]; }
  std::span<const NodeId> members(std::uint64_t i) const {
    return {flat_.data() + offsets_[i], flat_.data() + offsets_[i + 1]};
  }
  std::uint64_t total_work() const { return total_work_; }

  // Sets containing v, ascending.
  std::span<const std::uint32_t> sets_containing(NodeId v) const {
    return {inv_.data() + inv_off_[v], inv_.data() + inv_off_[v + 1]};
  }

  // Fraction of samples hit by `seeds`; times num_nodes this estimates the
  // seed set's influence.
  double coverage_fraction(std::span<const NodeId> seeds) const;

 private:
  void rebuild_index();

  const Instance* inst_;
  std::vector<NodeId> roots_;
  std::vector<std::uint32_t> offsets_;  // size()+1, indexes into flat_
  std::vector<NodeId> flat_;
  std::vector<std::uint32_t> inv_off_;  // num_nodes+1, indexes into inv_
  std::vector<std::uint32_t> inv_;
  std::uint64_t total_work_ = 0;
};

}  // namespace sirmax
