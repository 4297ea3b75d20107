#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sirmax {

// Probability that an SIR edge ends up live: the source transmits with
// probability beta each round and recovers with probability gamma per round,
// so the edge fires before the source recovers with probability
// beta / (gamma + beta * (1 - gamma)).  This is the activation probability
// of the matched IC edge.
double aggregate_edge_prob(double beta, double gamma);

// Running product over sibling edges of the same source that were already
// revealed blocked.  q = prod(1 - beta_f); omq = 1 - q is carried alongside
// so the complement never suffers cancellation when the betas are tiny.
struct BlockedProduct {
  double q = 1.0;
  double omq = 0.0;
  void add(double beta) {
    omq += q * beta;
    q *= 1.0 - beta;
  }
};

// Probability that an out-edge of a node is live given that the sibling
// edges folded into `blocked` were revealed blocked.  Blocked siblings are
// evidence the source recovered early, so this is at most
// aggregate_edge_prob(beta, gamma), with equality when `blocked` is empty.
double conditional_live_prob(double beta, double gamma, const BlockedProduct& blocked);
double conditional_live_prob(double beta, double gamma, std::span<const double> blocked_betas);

// Hub infection probabilities in the fan gadget: a node with b out-edges of
// transmission beta and recovery gamma, whose targets all point at one hub.
// p_ic treats the edges as independent with the matched IC activation
// probability; p_sir keeps them correlated through the shared recovery.
// p_ic >= p_sir, strictly when b >= 2 and the probabilities are interior.
struct GadgetProbs {
  double p_ic;
  double p_sir;
};
GadgetProbs gadget_infection_probs(std::uint64_t b, double beta, double gamma);

// Joint live/blocked distribution over one node's out-edges under SIR,
// computed by summing over the source's recovery round until the geometric
// tail drops below tol.  prob[pattern] is the probability that exactly the
// edges whose bit is set in `pattern` are live (bit i = betas[i]).
// trunc_error bounds the probability mass left unassigned.
struct OutEdgeJointDist {
  std::vector<double> prob;
  double trunc_error = 0.0;
};
OutEdgeJointDist joint_outedge_distribution(std::span<const double> betas, double gamma,
                                            double tol = 1e-12);

}  // namespace sirmax
