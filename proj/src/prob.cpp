#include "sirmax/prob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sirmax {

double aggregate_edge_prob(double beta, double gamma) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta out of (0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma out of (0,1]");
  // All terms positive: no cancellation anywhere on the parameter square.
  return beta / (gamma + beta * (1.0 - gamma));
}

double conditional_live_prob(double beta, double gamma, const BlockedProduct& blocked) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta out of (0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma out of (0,1]");
  // 1 - (1-gamma) * q * (1-beta), expanded so every term stays positive:
  // the complement of q*(1-beta) is omq + q*beta exactly.
  double denom = gamma + (1.0 - gamma) * (blocked.omq + blocked.q * beta);
  return beta / denom;
}

double conditional_live_prob(double beta, double gamma, std::span<const double> blocked_betas) {
  BlockedProduct blocked;
  for (double b : blocked_betas) {
    if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("blocked beta out of (0,1]");
    blocked.add(b);
  }
  return conditional_live_prob(beta, gamma, blocked);
}

GadgetProbs gadget_infection_probs(std::uint64_t b, double beta, double gamma) {
  if (b == 0) throw std::invalid_argument("gadget width must be positive");
  double p = aggregate_edge_prob(beta, gamma);
  if (b == 1) return {p, p};  // one edge: nothing to correlate

  double bd = static_cast<double>(b);
  GadgetProbs out;
  // 1 - (1-p)^b via the log to keep precision when p*b is small.
  out.p_ic = -std::expm1(bd * std::log1p(-p));
  // 1 - gamma*(1-beta)^b / (1 - (1-gamma)(1-beta)^b) simplifies to
  // omw / (gamma + (1-gamma)*omw) with omw = 1 - (1-beta)^b.  When omw
  // saturates at 1 the quotient can round an ulp above 1; clamp it back.
  double omw = -std::expm1(bd * std::log1p(-beta));
  out.p_sir = std::min(omw / (gamma + (1.0 - gamma) * omw), 1.0);
  return out;
}

OutEdgeJointDist joint_outedge_distribution(std::span<const double> betas, double gamma,
                                            double tol) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma out of (0,1]");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const std::size_t d = betas.size();
  if (d < 1 || d > 12)
    throw std::invalid_argument("joint table needs between 1 and 12 out-edges");
  for (double b : betas)
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("beta out of [0,1]");

  OutEdgeJointDist dist;
  dist.prob.assign(std::size_t{1} << d, 0.0);

  // Condition on the recovery round t: given t, edge i is live independently
  // with probability 1 - (1-beta_i)^t.  Accumulate the pattern table term by
  // term; after the last term the unassigned mass is exactly (1-gamma)^t.
  std::vector<double> pow_blocked(d, 1.0);  // (1-beta_i)^t, updated per round
  std::vector<double> pattern(dist.prob.size());
  double coef = gamma;      // gamma * (1-gamma)^(t-1)
  double tail = 1.0;        // (1-gamma)^t after processing round t
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) pow_blocked[i] *= 1.0 - betas[i];
    // Tensor the per-edge (blocked, live) pair across edges.
    pattern[0] = 1.0;
    std::size_t width = 1;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t s = 0; s < width; ++s) {
        double base = pattern[s];
        pattern[s] = base * pow_blocked[i];
        pattern[s + width] = base * (1.0 - pow_blocked[i]);
      }
      width <<= 1;
    }
    for (std::size_t s = 0; s < dist.prob.size(); ++s) dist.prob[s] += coef * pattern[s];
    tail *= 1.0 - gamma;
    if (tail < tol) break;
    coef *= 1.0 - gamma;
  }
  dist.trunc_error = tail;
  return dist;
}

}  // namespace sirmax
