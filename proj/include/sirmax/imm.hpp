#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sirmax/graph.hpp"
#include "sirmax/rr.hpp"

namespace sirmax {

// Derived constants of the two-phase sampling schedule.  All logarithms are
// natural except where a name says otherwise; binomials enter through
// ln C(n,k) computed from log-gamma so nothing overflows.
struct ImmParams {
  NodeId n = 0;
  std::uint32_t k = 0;
  double eps = 0.0;
  double ell = 0.0;
  double eps_prime = 0.0;     // sqrt(2) * eps
  double alpha = 0.0;         // sqrt(ell ln n + ln 2)
  double beta_hat = 0.0;      // sqrt((1 - 1/e)(ln C(n,k) + ell ln n + ln 2))
  double gamma_hat = 0.0;     // 4 + ln(8 ln n) / ln n
  double ell_prime = 0.0;     // ell + ln 2 / ln n + gamma_hat
  double lambda_prime = 0.0;  // phase-1 budget numerator
  double lambda_star = 0.0;   // phase-2 budget numerator
};

// n >= 2, 1 <= k <= n, eps in (0,1), ell >= 1; throws std::invalid_argument
// outside those domains.
ImmParams imm_params(NodeId n, std::uint32_t k, double eps, double ell);

// Greedy max-coverage over the collection's samples: k picks, each the node
// covering the most still-uncovered samples, ties to the smallest id.
// Stops early once every sample is covered, so seeds may be fewer than k.
struct SelectionResult {
  std::vector<NodeId> seeds;         // in pick order
  std::vector<std::uint64_t> gains;  // newly covered samples per pick; non-increasing
  double coverage = 0.0;             // fraction of samples covered
};
SelectionResult node_selection(const RRCollection& coll, std::uint32_t k);

struct SeedSelectionResult {
  std::vector<NodeId> seeds;  // ascending
  double coverage = 0.0;
  double spread_estimate = 0.0;  // n * coverage
  std::uint64_t samples_used = 0;
  double lb = 0.0;  // phase-1 lower bound on the optimum (1 when nothing triggered)
  ImmParams params;
};

// Two-phase RR-sampling seed selection.  Phase 1 doubles down on a shrinking
// influence guess x = n/2^i, growing one persistent collection to
// lambda_prime/x samples each round until the greedy coverage certifies a
// lower bound; phase 2 grows the same collection to lambda_star/lb and picks
// the final seeds.  Deterministic given (instance, master_seed), whatever
// the thread count.
SeedSelectionResult imm(const Instance& inst, std::uint32_t k, double eps, double ell,
                        std::uint64_t master_seed, int threads = 0);

// Exhaustive optimum over all k-subsets scored by exact_sigma, first
// lexicographic subset on ties.  Requires C(n,k) <= 10^4 on top of
// exact_sigma's own size limits.
std::pair<std::vector<NodeId>, double> brute_force_opt(const Instance& inst, std::uint32_t k);

}  // namespace sirmax
