#include "sirmax/imm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "sirmax/simulate.hpp"

namespace sirmax {

namespace {

double ln_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::uint64_t sample_target(double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("imm: sample budget is not a number");
  if (theta >= 9.0e15) throw std::runtime_error("imm: sample budget out of range");
  return static_cast<std::uint64_t>(theta) + 1;  // strictly more than theta
}

}  // namespace

ImmParams imm_params(NodeId n, std::uint32_t k, double eps, double ell) {
  if (n < 2) throw std::invalid_argument("imm_params: n must be at least 2");
  if (k < 1 || k > n) throw std::invalid_argument("imm_params: k must be in [1, n]");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("imm_params: eps must be in (0, 1)");
  if (!(ell >= 1.0)) throw std::invalid_argument("imm_params: ell must be at least 1");

  constexpr double kGreedyFactor = 1.0 - 1.0 / std::numbers::e;
  const double ln_n = std::log(static_cast<double>(n));
  const double ln_2 = std::numbers::ln2;
  const double ln_nk = ln_binomial(n, k);

  ImmParams p;
  p.n = n;
  p.k = k;
  p.eps = eps;
  p.ell = ell;
  p.eps_prime = std::numbers::sqrt2 * eps;
  p.alpha = std::sqrt(ell * ln_n + ln_2);
  p.beta_hat = std::sqrt(kGreedyFactor * (ln_nk + ell * ln_n + ln_2));
  p.gamma_hat = 4.0 + std::log(8.0 * ln_n) / ln_n;
  p.ell_prime = ell + ln_2 / ln_n + p.gamma_hat;
  p.lambda_prime = (2.0 + 2.0 * p.eps_prime / 3.0) *
                   (ln_nk + p.ell_prime * ln_n + std::log(std::log2(static_cast<double>(n)))) *
                   static_cast<double>(n) / (p.eps_prime * p.eps_prime);
  const double spread_dev = kGreedyFactor * p.alpha + p.beta_hat;
  p.lambda_star = 2.0 * static_cast<double>(n) * spread_dev * spread_dev / (eps * eps);
  return p;
}

SelectionResult node_selection(const RRCollection& coll, std::uint32_t k) {
  SelectionResult out;
  const std::uint64_t total = coll.size();
  if (k == 0 || total == 0) return out;
  const NodeId n = coll.instance().graph.num_nodes();

  // Exact marginal gains, decremented eagerly whenever a sample gets
  // covered.  The heap keeps possibly stale (gain, node) keys; a popped key
  // matching the node's current gain is the true argmax, because keys only
  // ever overstate gains.  Packing ~node into the low bits makes the heap
  // order itself resolve ties toward the smallest id.
  std::vector<std::uint64_t> gain(n);
  auto pack = [](std::uint64_t g, NodeId v) {
    return (g << 32) | static_cast<std::uint32_t>(~v);
  };
  std::priority_queue<std::uint64_t> heap;
  for (NodeId v = 0; v < n; ++v) {
    gain[v] = coll.sets_containing(v).size();
    if (gain[v] > 0) heap.push(pack(gain[v], v));
  }

  std::vector<char> covered(total, 0);
  std::uint64_t covered_cnt = 0;
  while (out.seeds.size() < k && covered_cnt < total && !heap.empty()) {
    std::uint64_t key = heap.top();
    heap.pop();
    NodeId v = ~static_cast<NodeId>(key & 0xFFFFFFFF);
    std::uint64_t g = key >> 32;
    if (gain[v] != g) {  // stale: re-offer at the current gain
      if (gain[v] > 0) heap.push(pack(gain[v], v));
      continue;
    }
    if (!out.gains.empty() && g > out.gains.back())
      throw std::logic_error("node_selection: marginal gains increased");
    out.seeds.push_back(v);
    out.gains.push_back(g);
    for (std::uint32_t si : coll.sets_containing(v)) {
      if (covered[si]) continue;
      covered[si] = 1;
      ++covered_cnt;
      for (NodeId w : coll.members(si)) --gain[w];
    }
  }
  out.coverage = static_cast<double>(covered_cnt) / static_cast<double>(total);
  return out;
}

SeedSelectionResult imm(const Instance& inst, std::uint32_t k, double eps, double ell,
                        std::uint64_t master_seed, int threads) {
  const NodeId n = inst.graph.num_nodes();
  if (k > n) throw std::invalid_argument("imm: k exceeds the node count");
  ImmParams par = imm_params(n, k, eps, ell);

  RRCollection coll(inst);
  SelectionResult sel;
  double lb = 1.0;  // conservative fallback when no round certifies a bound
  const int rounds = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) - 1;
  for (int i = 1; i <= rounds; ++i) {
    const double x = std::ldexp(static_cast<double>(n), -i);
    coll.grow(sample_target(par.lambda_prime / x), master_seed, threads);
    sel = node_selection(coll, k);
    if (static_cast<double>(n) * sel.coverage >= (1.0 + par.eps_prime) * x) {
      lb = static_cast<double>(n) * sel.coverage / (1.0 + par.eps_prime);
      break;
    }
  }
  // The collection only ever grows; if phase 1 already overshot this target
  // the extra samples stay and sharpen the estimate.
  coll.grow(sample_target(par.lambda_star / lb), master_seed, threads);
  sel = node_selection(coll, k);

  SeedSelectionResult out;
  out.seeds = sel.seeds;
  std::sort(out.seeds.begin(), out.seeds.end());
  out.coverage = sel.coverage;
  out.spread_estimate = static_cast<double>(n) * sel.coverage;
  out.samples_used = coll.size();
  out.lb = lb;
  out.params = par;
  return out;
}

std::pair<std::vector<NodeId>, double> brute_force_opt(const Instance& inst, std::uint32_t k) {
  const NodeId n = inst.graph.num_nodes();
  if (k < 1 || k > n) throw std::invalid_argument("brute_force_opt: k must be in [1, n]");
  if (ln_binomial(n, k) > std::log(1.0e4) + 1e-9)
    throw std::invalid_argument("brute_force_opt: too many k-subsets");

  std::vector<NodeId> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<NodeId> best;
  double best_val = -1.0;
  while (true) {
    double val = exact_sigma(inst, pick);
    if (val > best_val) {  // strict: ties keep the earlier (lexicographic) subset
      best_val = val;
      best = pick;
    }
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return {best, best_val};
}

}  // namespace sirmax
