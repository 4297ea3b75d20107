#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sirmax/graph.hpp"
#include "sirmax/rng.hpp"

namespace sirmax {

struct SigmaEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(runs)
  std::uint64_t runs = 0;
};

// One forward cascade from `seeds`; returns the influenced (ever-infected)
// nodes in ascending order, seeds included.  Each run_* checks the instance
// is of the matching model; run_cascade dispatches on it.
//
// Round structure: nodes infected at timestamp t act at timestamp t+1, in
// ascending node order; an acting node first attempts each still-susceptible
// out-neighbor in adjacency order, then (sir/tsir) draws its own recovery.
// tsir stops after `horizon` rounds, so horizon = 0 returns the seeds.
std::vector<NodeId> run_ic(const Instance&, std::span<const NodeId> seeds, Rng&);
std::vector<NodeId> run_sir(const Instance&, std::span<const NodeId> seeds, Rng&);
std::vector<NodeId> run_tsir(const Instance&, std::span<const NodeId> seeds, Rng&);
std::vector<NodeId> run_cascade(const Instance&, std::span<const NodeId> seeds, Rng&);

// Monte-Carlo influence estimate over `runs` cascades.  Run r consumes
// Rng::stream(master_seed, r); runs are distributed over `threads` workers
// (<= 0 means hardware concurrency) and the tallies are integer sums, so the
// result is bit-identical for every thread count.
SigmaEstimate estimate_sigma(const Instance&, std::span<const NodeId> seeds,
                             std::uint64_t runs, std::uint64_t master_seed, int threads = 0);

// Exact expected influence by enumerating every live-edge configuration
// (per-node joint distributions multiplied across nodes).  Feasible only for
// tiny instances: n <= 10, out-degree <= 12, tsir horizon <= 16, and a
// bounded configuration count; throws std::invalid_argument beyond that.
double exact_sigma(const Instance&, std::span<const NodeId> seeds);

}  // namespace sirmax
