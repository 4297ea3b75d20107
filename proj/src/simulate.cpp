#include "sirmax/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sirmax/parallel.hpp"
#include "sirmax/prob.hpp"

namespace sirmax {

namespace {

constexpr std::uint8_t kSusceptible = 0, kInfected = 1, kRemoved = 2;

struct Scratch {
  std::vector<std::uint8_t> status;
  std::vector<NodeId> active, next_active, touched;

  void init(NodeId n) { status.assign(n, kSusceptible); }
  void reset() {
    for (NodeId v : touched) status[v] = kSusceptible;
    touched.clear();
    active.clear();
    next_active.clear();
  }
  void infect(NodeId v) {
    status[v] = kInfected;
    touched.push_back(v);
    next_active.push_back(v);
  }
};

std::vector<NodeId> checked_seeds(const Instance& inst, std::span<const NodeId> seeds) {
  std::vector<NodeId> s(seeds.begin(), seeds.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (NodeId v : s)
    if (v >= inst.graph.num_nodes()) throw std::invalid_argument("seed node out of range");
  return s;
}

void require_model(const Instance& inst, Model m, const char* fn) {
  if (inst.params.model != m)
    throw std::invalid_argument(std::string(fn) + ": instance model is " +
                                std::string(model_name(inst.params.model)));
}

// Core cascade; assumes seeds are validated, sorted, unique.  Returns the
// influenced count and leaves influenced nodes marked in scratch.touched.
std::uint64_t cascade(const Instance& inst, std::span<const NodeId> seeds, Rng& rng,
                      Scratch& sc) {
  const DirectedGraph& g = inst.graph;
  const DiffusionParams& par = inst.params;
  sc.reset();
  for (NodeId v : seeds) sc.infect(v);

  std::uint64_t rounds_left =
      par.model == Model::tsir ? par.horizon : ~std::uint64_t{0};
  while (rounds_left > 0 && !sc.next_active.empty()) {
    --rounds_left;
    std::swap(sc.active, sc.next_active);
    sc.next_active.clear();
    std::sort(sc.active.begin(), sc.active.end());
    for (NodeId u : sc.active) {
      for (const Arc& a : g.out(u)) {
        if (sc.status[a.node] != kSusceptible) continue;
        if (rng.chance(par.edge_prob[a.edge])) sc.infect(a.node);
      }
      if (par.model == Model::ic) continue;  // activated nodes act once
      if (rng.chance(par.node_recovery[u]))
        sc.status[u] = kRemoved;  // stays in touched: still influenced
      else
        sc.next_active.push_back(u);
    }
  }
  return sc.touched.size();
}

std::vector<NodeId> run_one(const Instance& inst, std::span<const NodeId> seeds, Rng& rng) {
  Scratch sc;
  sc.init(inst.graph.num_nodes());
  auto s = checked_seeds(inst, seeds);
  cascade(inst, s, rng, sc);
  std::vector<NodeId> influenced = sc.touched;
  std::sort(influenced.begin(), influenced.end());
  return influenced;
}

}  // namespace

std::vector<NodeId> run_ic(const Instance& inst, std::span<const NodeId> seeds, Rng& rng) {
  require_model(inst, Model::ic, "run_ic");
  return run_one(inst, seeds, rng);
}

std::vector<NodeId> run_sir(const Instance& inst, std::span<const NodeId> seeds, Rng& rng) {
  require_model(inst, Model::sir, "run_sir");
  return run_one(inst, seeds, rng);
}

std::vector<NodeId> run_tsir(const Instance& inst, std::span<const NodeId> seeds, Rng& rng) {
  require_model(inst, Model::tsir, "run_tsir");
  return run_one(inst, seeds, rng);
}

std::vector<NodeId> run_cascade(const Instance& inst, std::span<const NodeId> seeds, Rng& rng) {
  return run_one(inst, seeds, rng);
}

SigmaEstimate estimate_sigma(const Instance& inst, std::span<const NodeId> seeds,
                             std::uint64_t runs, std::uint64_t master_seed, int threads) {
  if (runs == 0) throw std::invalid_argument("estimate_sigma: runs must be positive");
  auto s = checked_seeds(inst, seeds);

  // Integer tallies per block; combining them is order-independent, so the
  // estimate is identical for any worker count.
  std::uint64_t nblocks = std::min<std::uint64_t>(
      runs, threads > 0 ? static_cast<std::uint64_t>(threads)
                        : std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::uint64_t> sums(std::max<std::uint64_t>(nblocks, 1), 0);
  std::vector<std::uint64_t> sumsqs(std::max<std::uint64_t>(nblocks, 1), 0);

  parallel_blocks(runs, static_cast<int>(nblocks), [&](std::uint64_t lo, std::uint64_t hi,
                                                       std::size_t slot) {
    Scratch sc;
    sc.init(inst.graph.num_nodes());
    std::uint64_t sum = 0, sumsq = 0;
    for (std::uint64_t r = lo; r < hi; ++r) {
      Rng rng = Rng::stream(master_seed, r);
      std::uint64_t x = cascade(inst, s, rng, sc);
      sum += x;
      sumsq += x * x;
    }
    sums[slot] = sum;
    sumsqs[slot] = sumsq;
  });

  std::uint64_t sum = 0, sumsq = 0;
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    sum += sums[b];
    sumsq += sumsqs[b];
  }

  SigmaEstimate est;
  est.runs = runs;
  est.mean = static_cast<double>(sum) / static_cast<double>(runs);
  if (runs > 1) {
    long double num = static_cast<long double>(sumsq) -
                      static_cast<long double>(sum) * sum / static_cast<long double>(runs);
    if (num < 0) num = 0;
    long double var = num / static_cast<long double>(runs - 1);
    est.stderr_ = static_cast<double>(std::sqrt(var / static_cast<long double>(runs)));
  }
  return est;
}

namespace {

// Per-node live-edge pattern tables for the exact enumerator.
struct NodePatterns {
  // prob[i] and either mask[i] (ic/sir: bitmask of live out-arc positions)
  // or spans[i] (tsir: 5 bits per out-arc, 0 = blocked, else the span).
  std::vector<double> prob;
  std::vector<std::uint32_t> mask;
  std::vector<std::uint64_t> spans;
};

constexpr double kMaxConfigs = 1.6e7;  // enumeration budget

double exact_sigma_reach(const Instance& inst, std::span<const NodeId> seeds);
double exact_sigma_tsir(const Instance& inst, std::span<const NodeId> seeds);

}  // namespace

double exact_sigma(const Instance& inst, std::span<const NodeId> seeds) {
  const DirectedGraph& g = inst.graph;
  if (g.num_nodes() > 10)
    throw std::invalid_argument("exact_sigma: instance too large (n > 10)");
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (g.out_degree(u) > 12)
      throw std::invalid_argument("exact_sigma: instance too large (out-degree > 12)");
  auto s = checked_seeds(inst, seeds);
  if (s.empty()) return 0.0;
  if (inst.params.model == Model::tsir) return exact_sigma_tsir(inst, s);
  return exact_sigma_reach(inst, s);
}

namespace {

// ic / sir: enumerate per-node live-out-edge patterns, take the product
// across nodes, and average reachability from the seeds.
double exact_sigma_reach(const Instance& inst, std::span<const NodeId> seeds) {
  const DirectedGraph& g = inst.graph;
  const NodeId n = g.num_nodes();

  double configs = 1.0;
  for (NodeId u = 0; u < n; ++u) configs *= std::ldexp(1.0, static_cast<int>(g.out_degree(u)));
  if (configs > kMaxConfigs)
    throw std::invalid_argument("exact_sigma: instance too large (too many configurations)");

  std::vector<NodePatterns> pats(n);
  for (NodeId u = 0; u < n; ++u) {
    auto arcs = g.out(u);
    const std::size_t d = arcs.size();
    NodePatterns& np = pats[u];
    np.prob.assign(std::size_t{1} << d, 1.0);
    np.mask.assign(std::size_t{1} << d, 0);

    if (inst.params.model == Model::sir && d > 0) {
      std::vector<double> betas;
      for (const Arc& a : arcs) betas.push_back(inst.params.edge_prob[a.edge]);
      auto joint = joint_outedge_distribution(betas, inst.params.node_recovery[u], 1e-13);
      np.prob = std::move(joint.prob);
    } else {
      for (std::size_t i = 0; i < d; ++i) {
        double p = inst.params.edge_prob[arcs[i].edge];
        std::size_t width = std::size_t{1} << i;
        for (std::size_t s = 0; s < width; ++s) {
          double base = np.prob[s];
          np.prob[s] = base * (1.0 - p);
          np.prob[s + width] = base * p;
        }
      }
    }
    for (std::size_t pat = 0; pat < np.mask.size(); ++pat) {
      std::uint32_t m = 0;
      for (std::size_t i = 0; i < d; ++i)
        if (pat >> i & 1) m |= std::uint32_t{1} << arcs[i].node;
      np.mask[pat] = m;
    }
  }

  std::uint32_t seed_mask = 0;
  for (NodeId v : seeds) seed_mask |= std::uint32_t{1} << v;

  std::vector<std::uint32_t> adj(n, 0);
  double sigma = 0.0;
  auto leaf = [&](double p) {
    std::uint32_t reach = seed_mask, frontier = seed_mask;
    while (frontier != 0) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f != 0; f &= f - 1)
        next |= adj[static_cast<unsigned>(__builtin_ctz(f))];
      frontier = next & ~reach;
      reach |= next;
    }
    sigma += p * __builtin_popcount(reach);
  };
  // Iterative product over nodes' pattern tables.
  auto rec = [&](auto&& self, NodeId u, double p) -> void {
    if (u == n) {
      leaf(p);
      return;
    }
    const NodePatterns& np = pats[u];
    for (std::size_t pat = 0; pat < np.prob.size(); ++pat) {
      if (np.prob[pat] == 0.0) continue;
      adj[u] = np.mask[pat];
      self(self, u + 1, p * np.prob[pat]);
    }
    adj[u] = 0;
  };
  rec(rec, 0, 1.0);
  return sigma;
}

// tsir: per-edge state is blocked or a span in 1..T; a node's states are
// tied together by its recovery round.  At each full configuration the
// influenced set is everything within span-distance T of the seeds.
double exact_sigma_tsir(const Instance& inst, std::span<const NodeId> seeds) {
  const DirectedGraph& g = inst.graph;
  const std::uint32_t T = inst.params.horizon;
  const NodeId n = g.num_nodes();
  if (T > 16) throw std::invalid_argument("exact_sigma: tsir horizon > 16");
  if (T == 0) return static_cast<double>(seeds.size());

  double configs = 1.0;
  for (NodeId u = 0; u < n; ++u)
    configs *= std::pow(static_cast<double>(T) + 1.0, static_cast<double>(g.out_degree(u)));
  if (configs > kMaxConfigs)
    throw std::invalid_argument("exact_sigma: instance too large (too many configurations)");

  // Window weights: the usable window is min(recovery round, T), so windows
  // 1..T-1 carry the plain geometric mass and window T absorbs the tail.
  std::vector<double> wweight(T + 1, 0.0);
  std::vector<NodePatterns> pats(n);
  for (NodeId u = 0; u < n; ++u) {
    auto arcs = g.out(u);
    const std::size_t d = arcs.size();
    double gamma = inst.params.node_recovery[u];
    for (std::uint32_t c = 1; c <= T; ++c)
      wweight[c] = c < T ? gamma * std::pow(1.0 - gamma, c - 1.0)
                         : std::pow(1.0 - gamma, static_cast<double>(T) - 1.0);

    // geo[i][s] = P(first success at round s), pow1m[i][c] = P(no success in c rounds)
    std::vector<std::vector<double>> geo(d), pow1m(d);
    for (std::size_t i = 0; i < d; ++i) {
      double beta = inst.params.edge_prob[arcs[i].edge];
      geo[i].assign(T + 1, 0.0);
      pow1m[i].assign(T + 1, 1.0);
      for (std::uint32_t s = 1; s <= T; ++s) {
        geo[i][s] = beta * std::pow(1.0 - beta, s - 1.0);
        pow1m[i][s] = std::pow(1.0 - beta, static_cast<double>(s));
      }
    }

    NodePatterns& np = pats[u];
    std::vector<std::uint32_t> state(d, 0);  // 0 = blocked, else span
    auto emit = [&] {
      std::uint32_t max_span = 0;
      double live_prod = 1.0;
      for (std::size_t i = 0; i < d; ++i)
        if (state[i] != 0) {
          max_span = std::max(max_span, state[i]);
          live_prod *= geo[i][state[i]];
        }
      double p = 0.0;
      for (std::uint32_t c = std::max(max_span, 1u); c <= T; ++c) {
        double blocked_prod = 1.0;
        for (std::size_t i = 0; i < d; ++i)
          if (state[i] == 0) blocked_prod *= pow1m[i][c];
        p += wweight[c] * blocked_prod;
      }
      p *= live_prod;
      if (p == 0.0) return;
      std::uint64_t packed = 0;
      for (std::size_t i = 0; i < d; ++i) packed |= std::uint64_t(state[i]) << (5 * i);
      np.prob.push_back(p);
      np.spans.push_back(packed);
    };
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == d) {
        emit();
        return;
      }
      for (std::uint32_t st = 0; st <= T; ++st) {
        state[i] = st;
        self(self, i + 1);
      }
    };
    rec(rec, 0);
  }

  constexpr std::uint32_t kFar = 0xFFFFFFFF;
  std::vector<std::uint32_t> dist(n);
  std::vector<std::uint64_t> chosen(n, 0);
  double sigma = 0.0;
  auto leaf = [&](double p) {
    std::fill(dist.begin(), dist.end(), kFar);
    for (NodeId v : seeds) dist[v] = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      for (NodeId u = 0; u < n; ++u) {
        if (dist[u] > T) continue;
        auto arcs = g.out(u);
        for (std::size_t i = 0; i < arcs.size(); ++i) {
          std::uint32_t span = (chosen[u] >> (5 * i)) & 0x1F;
          if (span == 0) continue;
          std::uint32_t nd = dist[u] + span;
          if (nd < dist[arcs[i].node]) {
            dist[arcs[i].node] = nd;
            changed = true;
          }
        }
      }
    }
    std::uint32_t count = 0;
    for (NodeId v = 0; v < n; ++v) count += dist[v] <= T;
    sigma += p * count;
  };
  auto rec = [&](auto&& self, NodeId u, double p) -> void {
    if (u == n) {
      leaf(p);
      return;
    }
    const NodePatterns& np = pats[u];
    for (std::size_t i = 0; i < np.prob.size(); ++i) {
      chosen[u] = np.spans[i];
      self(self, u + 1, p * np.prob[i]);
    }
    chosen[u] = 0;
  };
  rec(rec, 0, 1.0);
  return sigma;
}

}  // namespace

}  // namespace sirmax
