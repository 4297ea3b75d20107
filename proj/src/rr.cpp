#include "sirmax/rr.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "sirmax/parallel.hpp"
#include "sirmax/prob.hpp"

namespace sirmax {

namespace {

void require_model(const Instance& inst, Model m, const char* fn) {
  if (inst.params.model != m)
    throw std::invalid_argument(std::string(fn) + ": instance model is " +
                                std::string(model_name(inst.params.model)));
}

void check_root(const Instance& inst, NodeId root) {
  if (root >= inst.graph.num_nodes()) throw std::invalid_argument("root node out of range");
}

// Reusable per-thread state; epoch stamps avoid clearing O(n + m) arrays on
// every sample.
struct RRScratch {
  std::uint32_t epoch = 0;
  std::vector<std::uint32_t> node_mark, edge_mark, cand_mark, rec_mark;
  std::vector<double> q, omq;          // sir: blocked product per candidate
  std::vector<std::uint32_t> rec;      // tsir: recovery window per node
  std::vector<std::uint32_t> dist;     // tsir prune
  std::vector<std::uint32_t> idx;      // tsir prune: node -> queue position
  std::vector<NodeId> queue;

  void init(const Instance& inst) {
    NodeId n = inst.graph.num_nodes();
    EdgeId m = inst.graph.num_edges();
    node_mark.assign(n, 0);
    cand_mark.assign(n, 0);
    rec_mark.assign(n, 0);
    edge_mark.assign(m, 0);
    q.assign(n, 1.0);
    omq.assign(n, 0.0);
    rec.assign(n, 0);
    dist.assign(n, 0);
    idx.assign(n, 0);
    epoch = 0;
  }
  void next_sample() { ++epoch; }

  bool in_set(NodeId v) const { return node_mark[v] == epoch; }
  void add(NodeId v) { node_mark[v] = epoch; }
  bool revealed(EdgeId e) const { return edge_mark[e] == epoch; }
  void reveal(EdgeId e) { edge_mark[e] = epoch; }
};

RRSet sample_rr_ic_impl(const Instance& inst, NodeId root, Rng& rng, RRScratch& sc) {
  const DirectedGraph& g = inst.graph;
  sc.next_sample();
  RRSet out;
  out.root = root;
  sc.queue.clear();
  sc.add(root);
  sc.queue.push_back(root);
  for (std::size_t i = 0; i < sc.queue.size(); ++i) {
    NodeId w = sc.queue[i];
    for (const Arc& a : g.in(w)) {
      if (sc.in_set(a.node)) continue;
      ++out.work;
      if (rng.chance(inst.params.edge_prob[a.edge])) {
        sc.add(a.node);
        sc.queue.push_back(a.node);
      }
    }
  }
  out.members = sc.queue;
  std::sort(out.members.begin(), out.members.end());
  return out;
}

RRSet sample_rr_sir_impl(const Instance& inst, NodeId root, Rng& rng, RRScratch& sc) {
  const DirectedGraph& g = inst.graph;
  const DiffusionParams& par = inst.params;
  sc.next_sample();
  RRSet out;
  out.root = root;

  // Min-heap of candidate nodes (outside the set, with an unrevealed edge
  // into it); cand_mark deduplicates entries.
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> cand;
  std::vector<NodeId> members{root};
  sc.add(root);
  auto offer = [&](NodeId u) {
    if (sc.cand_mark[u] == sc.epoch) return;
    sc.cand_mark[u] = sc.epoch;
    cand.push(u);
  };
  auto join = [&](NodeId u) {
    sc.add(u);
    members.push_back(u);
    for (const Arc& a : g.in(u))
      if (!sc.in_set(a.node)) offer(a.node);
  };
  for (const Arc& a : g.in(root))
    if (!sc.in_set(a.node)) offer(a.node);

  while (!cand.empty()) {
    NodeId u = cand.top();
    cand.pop();
    sc.cand_mark[u] = sc.epoch - 1;  // may be offered again later
    if (sc.rec_mark[u] != sc.epoch) {  // first touch: reset blocked product
      sc.rec_mark[u] = sc.epoch;
      sc.q[u] = 1.0;
      sc.omq[u] = 0.0;
    }
    // Reveal u's unrevealed edges into the current set in edge-id order
    // (out-lists are id-sorted); stop the visit at the first live edge.
    for (const Arc& a : g.out(u)) {
      if (!sc.in_set(a.node) || sc.revealed(a.edge)) continue;
      sc.reveal(a.edge);
      ++out.work;
      double beta = par.edge_prob[a.edge];
      double gamma = par.node_recovery[u];
      double thr = beta / (gamma + (1.0 - gamma) * (sc.omq[u] + sc.q[u] * beta));
      if (rng.uniform() < thr) {
        join(u);
        break;
      }
      sc.omq[u] += sc.q[u] * beta;
      sc.q[u] *= 1.0 - beta;
    }
  }
  out.members = std::move(members);
  std::sort(out.members.begin(), out.members.end());
  return out;
}

RRSet sample_rr_tsir_impl(const Instance& inst, NodeId root, Rng& rng, RRScratch& sc,
                          TsirSampleTrace* trace) {
  const DirectedGraph& g = inst.graph;
  const DiffusionParams& par = inst.params;
  const std::uint32_t T = par.horizon;
  sc.next_sample();
  RRSet out;
  out.root = root;

  // Phase 1: reverse traversal ignoring distances.  Each edge into a visited
  // node is examined once; the tail's recovery window is drawn lazily and
  // kept for the whole sample.
  sc.queue.clear();
  sc.add(root);
  sc.queue.push_back(root);
  // Reverse adjacency of the recorded arcs, laid out per queue position:
  // rev[i] = (tail, span) arcs into queue[i], walking away from the root.
  std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> rev(1);
  for (std::size_t i = 0; i < sc.queue.size(); ++i) {
    NodeId w = sc.queue[i];
    for (const Arc& a : g.in(w)) {
      NodeId u = a.node;
      ++out.work;
      if (sc.rec_mark[u] != sc.epoch) {
        sc.rec_mark[u] = sc.epoch;
        sc.rec[u] = std::min(rng.first_success_capped(par.node_recovery[u], T), T);
      }
      std::uint32_t window = sc.rec[u];
      std::uint32_t s = window == 0
                            ? 1  // no usable rounds: blocked without a draw
                            : rng.first_success_capped(par.edge_prob[a.edge], window);
      if (window == 0 || s > window) continue;
      rev[i].emplace_back(u, s);
      if (trace) trace->arcs.emplace_back(u, w, s);
      if (!sc.in_set(u)) {
        sc.add(u);
        sc.queue.push_back(u);
        rev.emplace_back();
      }
    }
  }
  if (trace) trace->visited = sc.queue;

  // Phase 2: Dial prune — keep nodes whose span-distance to the root is
  // within the horizon.  rev[i] holds arcs leaving queue[i] away from root;
  // idx maps a visited node back to its queue position (only read for nodes
  // of this sample, so stale entries are harmless).
  constexpr std::uint32_t kFar = 0xFFFFFFFF;
  for (std::size_t i = 0; i < sc.queue.size(); ++i) {
    sc.dist[sc.queue[i]] = kFar;
    sc.idx[sc.queue[i]] = static_cast<std::uint32_t>(i);
  }
  std::vector<std::vector<NodeId>> bucket(T + 1);
  sc.dist[root] = 0;
  bucket[0].push_back(root);
  for (std::uint32_t d = 0; d <= T; ++d)
    for (std::size_t bi = 0; bi < bucket[d].size(); ++bi) {
      NodeId v = bucket[d][bi];
      if (sc.dist[v] != d) continue;
      for (auto [u, s] : rev[sc.idx[v]]) {
        std::uint32_t nd = d + s;
        if (nd <= T && nd < sc.dist[u]) {
          sc.dist[u] = nd;
          bucket[nd].push_back(u);
        }
      }
    }

  for (NodeId v : sc.queue)
    if (sc.dist[v] != kFar) out.members.push_back(v);
  std::sort(out.members.begin(), out.members.end());
  return out;
}

thread_local RRScratch tl_scratch;
thread_local const Instance* tl_scratch_for = nullptr;

RRScratch& scratch_for(const Instance& inst) {
  if (tl_scratch_for != &inst ||
      tl_scratch.node_mark.size() != inst.graph.num_nodes() ||
      tl_scratch.edge_mark.size() != inst.graph.num_edges()) {
    tl_scratch.init(inst);
    tl_scratch_for = &inst;
  }
  return tl_scratch;
}

}  // namespace

RRSet sample_rr_ic(const Instance& inst, NodeId root, Rng& rng) {
  require_model(inst, Model::ic, "sample_rr_ic");
  check_root(inst, root);
  return sample_rr_ic_impl(inst, root, rng, scratch_for(inst));
}

RRSet sample_rr_sir(const Instance& inst, NodeId root, Rng& rng) {
  require_model(inst, Model::sir, "sample_rr_sir");
  check_root(inst, root);
  return sample_rr_sir_impl(inst, root, rng, scratch_for(inst));
}

RRSet sample_rr_tsir(const Instance& inst, NodeId root, Rng& rng, TsirSampleTrace* trace) {
  require_model(inst, Model::tsir, "sample_rr_tsir");
  check_root(inst, root);
  return sample_rr_tsir_impl(inst, root, rng, scratch_for(inst), trace);
}

RRSet sample_rr(const Instance& inst, NodeId root, Rng& rng) {
  check_root(inst, root);
  RRScratch& sc = scratch_for(inst);
  switch (inst.params.model) {
    case Model::ic: return sample_rr_ic_impl(inst, root, rng, sc);
    case Model::sir: return sample_rr_sir_impl(inst, root, rng, sc);
    case Model::tsir: return sample_rr_tsir_impl(inst, root, rng, sc, nullptr);
  }
  throw std::invalid_argument("sample_rr: unknown model");
}

RRCollection::RRCollection(const Instance& inst) : inst_(&inst) {
  offsets_.push_back(0);
  inv_off_.assign(inst.graph.num_nodes() + 1, 0);
}

RRCollection::RRCollection(const Instance& inst, const std::vector<std::vector<NodeId>>& sets)
    : RRCollection(inst) {
  for (const auto& set : sets) {
    if (set.empty()) throw std::invalid_argument("RRCollection: empty member set");
    std::vector<NodeId> members = set;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.back() >= inst.graph.num_nodes())
      throw std::invalid_argument("RRCollection: member node out of range");
    roots_.push_back(members.front());
    std::uint64_t next = offsets_.back() + std::uint64_t{members.size()};
    if (next > 0xFFFFFFFFull) throw std::runtime_error("RR collection overflow");
    offsets_.push_back(static_cast<std::uint32_t>(next));
    flat_.insert(flat_.end(), members.begin(), members.end());
  }
  rebuild_index();
}

void RRCollection::grow(std::uint64_t count, std::uint64_t master_seed, int threads) {
  if (count == 0) throw std::invalid_argument("RRCollection::grow: count must be positive");
  if (count <= size()) return;
  const Instance& inst = *inst_;
  const std::uint64_t first = size(), added = count - first;

  struct Block {
    std::vector<NodeId> flat;
    std::vector<std::uint32_t> len;
    std::vector<NodeId> roots;
    std::uint64_t work = 0;
  };
  std::uint64_t nblocks = std::min<std::uint64_t>(
      added, threads > 0 ? static_cast<std::uint64_t>(threads)
                         : std::max(1u, std::thread::hardware_concurrency()));
  std::vector<Block> blocks(nblocks);

  parallel_blocks(added, static_cast<int>(nblocks),
                  [&](std::uint64_t lo, std::uint64_t hi, std::size_t slot) {
                    Block& blk = blocks[slot];
                    RRScratch sc;
                    sc.init(inst);
                    for (std::uint64_t i = lo; i < hi; ++i) {
                      Rng rng = Rng::stream(master_seed, first + i);
                      NodeId root = static_cast<NodeId>(rng.below(inst.graph.num_nodes()));
                      RRSet rr;
                      switch (inst.params.model) {
                        case Model::ic: rr = sample_rr_ic_impl(inst, root, rng, sc); break;
                        case Model::sir: rr = sample_rr_sir_impl(inst, root, rng, sc); break;
                        case Model::tsir:
                          rr = sample_rr_tsir_impl(inst, root, rng, sc, nullptr);
                          break;
                      }
                      blk.roots.push_back(rr.root);
                      blk.len.push_back(static_cast<std::uint32_t>(rr.members.size()));
                      blk.flat.insert(blk.flat.end(), rr.members.begin(), rr.members.end());
                      blk.work += rr.work;
                    }
                  });

  // Blocks own contiguous ascending index ranges; append them in order.
  for (Block& blk : blocks) {
    roots_.insert(roots_.end(), blk.roots.begin(), blk.roots.end());
    for (std::uint32_t len : blk.len) {
      std::uint64_t next = std::uint64_t{offsets_.back()} + len;
      if (next > 0xFFFFFFFFull) throw std::runtime_error("RR collection overflow");
      offsets_.push_back(static_cast<std::uint32_t>(next));
    }
    flat_.insert(flat_.end(), blk.flat.begin(), blk.flat.end());
    total_work_ += blk.work;
  }

  rebuild_index();
}

// Counting sort of (member -> set index) pairs by member node.
void RRCollection::rebuild_index() {
  const NodeId n = inst_->graph.num_nodes();
  std::vector<std::uint32_t> cnt(n + 1, 0);
  for (NodeId v : flat_) ++cnt[v + 1];
  for (NodeId v = 0; v < n; ++v) cnt[v + 1] += cnt[v];
  inv_off_.assign(cnt.begin(), cnt.end());
  inv_.resize(flat_.size());
  std::vector<std::uint32_t> pos(cnt.begin(), cnt.end() - 1);
  for (std::uint64_t i = 0; i < size(); ++i)
    for (NodeId v : members(i)) inv_[pos[v]++] = static_cast<std::uint32_t>(i);
}

double RRCollection::coverage_fraction(std::span<const NodeId> seeds) const {
  if (size() == 0) return 0.0;
  for (NodeId v : seeds)
    if (v >= inst_->graph.num_nodes()) throw std::invalid_argument("seed node out of range");
  // Seeds are few: count distinct covered sets via a sorted merge over the
  // inverted lists.
  std::vector<std::uint32_t> hit;
  for (NodeId v : seeds) {
    auto lst = sets_containing(v);
    hit.insert(hit.end(), lst.begin(), lst.end());
  }
  std::sort(hit.begin(), hit.end());
  hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
  return static_cast<double>(hit.size()) / static_cast<double>(size());
}

}  // namespace sirmax
