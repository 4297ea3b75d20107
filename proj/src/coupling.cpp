#include "sirmax/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "sirmax/parallel.hpp"
#include "sirmax/prob.hpp"
#include "sirmax/simulate.hpp"

namespace sirmax {

namespace {

void require_sir(const Instance& inst, const char* fn) {
  if (inst.params.model != Model::sir)
    throw std::invalid_argument(std::string(fn) + ": instance model is " +
                                std::string(model_name(inst.params.model)));
}

// Reusable per-thread state, epoch-stamped like the plain RR samplers'.
struct CoScratch {
  std::uint32_t epoch = 0;
  std::vector<std::uint32_t> sir_mark, ic_mark, cand_mark, rec_mark, join_mark;
  std::vector<std::uint32_t> edge_mark, edge_ic, edge_sir;
  std::vector<double> q, omq;        // blocked product per candidate
  std::vector<double> join_beta;     // probability of the edge a member joined by

  void init(const Instance& inst) {
    NodeId n = inst.graph.num_nodes();
    EdgeId m = inst.graph.num_edges();
    sir_mark.assign(n, 0);
    ic_mark.assign(n, 0);
    cand_mark.assign(n, 0);
    rec_mark.assign(n, 0);
    join_mark.assign(n, 0);
    edge_mark.assign(m, 0);
    edge_ic.assign(m, 0);
    edge_sir.assign(m, 0);
    q.assign(n, 1.0);
    omq.assign(n, 0.0);
    join_beta.assign(n, 0.0);
    epoch = 0;
  }
  void next_sample() { ++epoch; }
};

// Draws every edge the pairing loop never revealed.  Per node, the recovery
// round is drawn from its posterior given the revealed outcomes (blocked
// edges thin the geometric tail; a live joining edge is folded in by
// rejection), after which the remaining out-edges are conditionally
// independent.  The result is a complete sample of each model's live-edge
// law, consistent with the loop's reveals.
void reveal_remaining(const Instance& inst, Rng& rng, CoScratch& sc, CoupledOutcome& out) {
  const DirectedGraph& g = inst.graph;
  const DiffusionParams& par = inst.params;
  std::vector<EdgeId> live_ic, live_sir;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (g.out_degree(u) == 0) continue;
    double gamma = par.node_recovery[u];
    double omq_blocked = sc.rec_mark[u] == sc.epoch ? sc.omq[u] : 0.0;
    // Pr[no more evidence per round] given the blocked edges: recover, or
    // survive and have one of the blocked edges fire anyway -- the round
    // count given all-blocked is geometric in this combined rate.
    double p_stop = gamma + (1.0 - gamma) * omq_blocked;
    double t;
    if (sc.join_mark[u] == sc.epoch) {
      double lb0 = std::log1p(-sc.join_beta[u]);  // joining edge had beta > 0
      do {
        t = rng.first_success(p_stop);
      } while (!(rng.uniform() < -std::expm1(t * lb0)));
    } else {
      t = rng.first_success(p_stop);
    }
    for (const Arc& a : g.out(u)) {
      if (sc.edge_mark[a.edge] == sc.epoch) {
        if (sc.edge_ic[a.edge] == sc.epoch) live_ic.push_back(a.edge);
        if (sc.edge_sir[a.edge] == sc.epoch) live_sir.push_back(a.edge);
        continue;
      }
      double beta = par.edge_prob[a.edge];
      double live_p = beta >= 1.0 ? 1.0 : -std::expm1(t * std::log1p(-beta));
      double d = rng.uniform();
      if (d < aggregate_edge_prob(beta, gamma)) live_ic.push_back(a.edge);
      if (d < live_p) live_sir.push_back(a.edge);
    }
  }
  std::sort(live_ic.begin(), live_ic.end());
  std::sort(live_sir.begin(), live_sir.end());
  out.full_ic.live = std::move(live_ic);
  out.full_sir.live = std::move(live_sir);
}

CoupledOutcome coupled_rr_impl(const Instance& inst, NodeId root, Rng& rng, CoScratch& sc,
                               const CouplingOptions& opt) {
  const DirectedGraph& g = inst.graph;
  const DiffusionParams& par = inst.params;
  sc.next_sample();
  CoupledOutcome out;
  out.root = root;
  out.rr_sir.push_back(root);
  out.rr_ic.push_back(root);
  sc.sir_mark[root] = sc.epoch;
  sc.ic_mark[root] = sc.epoch;

  // Frontier identical to sample_rr_sir: smallest-id candidate first, edges
  // revealed in id order, blocked products persisted across visits.
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> cand;
  auto in_sir = [&](NodeId v) { return sc.sir_mark[v] == sc.epoch; };
  auto offer = [&](NodeId u) {
    if (sc.cand_mark[u] == sc.epoch) return;
    sc.cand_mark[u] = sc.epoch;
    cand.push(u);
  };
  auto ic_add = [&](NodeId u) {
    if (sc.ic_mark[u] == sc.epoch) return;
    sc.ic_mark[u] = sc.epoch;
    out.rr_ic.push_back(u);
  };
  auto join = [&](NodeId u, double beta) {
    sc.sir_mark[u] = sc.epoch;
    out.rr_sir.push_back(u);
    sc.join_mark[u] = sc.epoch;
    sc.join_beta[u] = beta;
    for (const Arc& a : g.in(u))
      if (!in_sir(a.node)) offer(a.node);
  };
  for (const Arc& a : g.in(root))
    if (!in_sir(a.node)) offer(a.node);

  while (!cand.empty()) {
    NodeId u = cand.top();
    cand.pop();
    sc.cand_mark[u] = sc.epoch - 1;  // may be offered again later
    if (sc.rec_mark[u] != sc.epoch) {
      sc.rec_mark[u] = sc.epoch;
      sc.q[u] = 1.0;
      sc.omq[u] = 0.0;
    }
    for (const Arc& a : g.out(u)) {
      if (!in_sir(a.node) || sc.edge_mark[a.edge] == sc.epoch) continue;
      sc.edge_mark[a.edge] = sc.epoch;
      double beta = par.edge_prob[a.edge];
      double gamma = par.node_recovery[u];
      // omq + q*beta = 1 - q*(1 - beta) >= beta exactly; the max() only
      // absorbs last-ulp rounding so the conditional threshold can never
      // poke above the aggregate one and break per-sample containment.
      double mass = std::max(sc.omq[u] + sc.q[u] * beta, beta);
      double thr_sir = beta / (gamma + (1.0 - gamma) * mass);
      double thr_ic = aggregate_edge_prob(beta, gamma);
      double d = rng.uniform();
      if (d < thr_ic) {
        sc.edge_ic[a.edge] = sc.epoch;
        out.edges_ic.push_back(a.edge);
        ic_add(u);
      }
      if (d < thr_sir) {
        sc.edge_sir[a.edge] = sc.epoch;
        out.edges_sir.push_back(a.edge);
        join(u, beta);
        break;
      }
      sc.omq[u] += sc.q[u] * beta;
      sc.q[u] *= 1.0 - beta;
    }
  }

  if (opt.reveal_remaining) reveal_remaining(inst, rng, sc, out);

  std::sort(out.rr_ic.begin(), out.rr_ic.end());
  std::sort(out.rr_sir.begin(), out.rr_sir.end());
  std::sort(out.edges_ic.begin(), out.edges_ic.end());
  std::sort(out.edges_sir.begin(), out.edges_sir.end());
  return out;
}

thread_local CoScratch tl_scratch;
thread_local const Instance* tl_scratch_for = nullptr;

CoScratch& scratch_for(const Instance& inst) {
  if (tl_scratch_for != &inst ||
      tl_scratch.sir_mark.size() != inst.graph.num_nodes() ||
      tl_scratch.edge_mark.size() != inst.graph.num_edges()) {
    tl_scratch.init(inst);
    tl_scratch_for = &inst;
  }
  return tl_scratch;
}

bool intersects(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) ++i; else ++j;
  }
  return false;
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag) {
  return Rng::stream(master, tag).next_u64();
}

}  // namespace

Instance matched_ic_instance(const Instance& inst_sir) {
  require_sir(inst_sir, "matched_ic_instance");
  const DirectedGraph& g = inst_sir.graph;
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(g.num_edges());
  std::vector<double> probs(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edge(e);
    edges.emplace_back(u, v);
    probs[e] = aggregate_edge_prob(inst_sir.params.edge_prob[e],
                                   inst_sir.params.node_recovery[u]);
  }
  return make_instance(g.num_nodes(), Model::ic, std::move(edges), std::move(probs));
}

CoupledOutcome coupled_rr(const Instance& inst_sir, NodeId root, Rng& rng,
                          const CouplingOptions& opt) {
  require_sir(inst_sir, "coupled_rr");
  if (root >= inst_sir.graph.num_nodes())
    throw std::invalid_argument("root node out of range");
  return coupled_rr_impl(inst_sir, root, rng, scratch_for(inst_sir), opt);
}

DominanceReport dominance_report(const Instance& inst_sir,
                                 std::span<const std::vector<NodeId>> seed_sets,
                                 std::uint64_t runs, std::uint64_t master_seed,
                                 int threads) {
  require_sir(inst_sir, "dominance_report");
  Instance inst_ic = matched_ic_instance(inst_sir);

  DominanceReport rep;
  rep.rows.reserve(seed_sets.size());
  for (std::size_t j = 0; j < seed_sets.size(); ++j) {
    SigmaEstimate sir =
        estimate_sigma(inst_sir, seed_sets[j], runs, sub_seed(master_seed, 2 * j + 1), threads);
    SigmaEstimate ic =
        estimate_sigma(inst_ic, seed_sets[j], runs, sub_seed(master_seed, 2 * j + 2), threads);
    rep.rows.push_back({ic.mean, sir.mean, std::hypot(ic.stderr_, sir.stderr_), runs});
  }

  std::vector<std::vector<NodeId>> sorted_sets(seed_sets.begin(), seed_sets.end());
  for (auto& s : sorted_sets) std::sort(s.begin(), s.end());

  const std::uint64_t couple_master = sub_seed(master_seed, 0);
  const NodeId n = inst_sir.graph.num_nodes();
  std::uint64_t nblocks = std::min<std::uint64_t>(
      std::max<std::uint64_t>(runs, 1),
      threads > 0 ? static_cast<std::uint64_t>(threads)
                  : std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::uint64_t> violations(nblocks, 0);
  parallel_blocks(runs, static_cast<int>(nblocks),
                  [&](std::uint64_t lo, std::uint64_t hi, std::size_t slot) {
                    CoScratch sc;
                    sc.init(inst_sir);
                    std::uint64_t bad = 0;
                    for (std::uint64_t r = lo; r < hi; ++r) {
                      Rng rng = Rng::stream(couple_master, r);
                      NodeId root = static_cast<NodeId>(rng.below(n));
                      CoupledOutcome o = coupled_rr_impl(inst_sir, root, rng, sc, {});
                      if (!std::includes(o.rr_ic.begin(), o.rr_ic.end(),
                                         o.rr_sir.begin(), o.rr_sir.end()))
                        ++bad;
                      for (const auto& s : sorted_sets)
                        if (intersects(o.rr_sir, s) && !intersects(o.rr_ic, s)) ++bad;
                    }
                    violations[slot] = bad;
                  });
  rep.coupled_samples = runs;
  for (std::uint64_t v : violations) rep.containment_violations += v;
  return rep;
}

}  // namespace sirmax
