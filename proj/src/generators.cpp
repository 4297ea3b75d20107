#include "sirmax/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "sirmax/prob.hpp"

namespace sirmax {

namespace {

struct Builder {
  Builder(Model m, std::uint32_t h) : model(m), horizon(h) {}

  Model model;
  std::uint32_t horizon;
  NodeId n = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<double> prob;
  std::vector<double> recovery;

  void edge(NodeId u, NodeId v, double p) {
    edges.emplace_back(u, v);
    prob.push_back(p);
  }

  Instance finish(double gamma) {
    if (model != Model::ic) recovery.assign(n, gamma);
    return make_instance(n, model, std::move(edges), std::move(prob), std::move(recovery),
                         model == Model::tsir ? horizon : 0);
  }
};

void check_common(const GeneratorSpec& s) {
  if (!(s.beta >= 0.0 && s.beta <= 1.0))
    throw std::invalid_argument("generator: beta out of [0,1]");
  if (s.model != Model::ic && !(s.gamma > 0.0 && s.gamma <= 1.0))
    throw std::invalid_argument("generator: gamma out of (0,1]");
  if (s.model != Model::tsir && s.horizon != 0)
    throw std::invalid_argument("generator: horizon is only meaningful under tsir");
}

// Dashed-edge probability: per-model view of a transmission-beta edge.
double dashed(const GeneratorSpec& s) {
  return s.model == Model::ic ? aggregate_edge_prob(s.beta, s.gamma) : s.beta;
}

Instance gen_erdos_renyi(const GeneratorSpec& s, Rng& rng) {
  if (s.n == 0) throw std::invalid_argument("generator: n must be positive");
  if (!(s.edge_density >= 0.0 && s.edge_density <= 1.0))
    throw std::invalid_argument("generator: edge_density out of [0,1]");
  Builder b{s.model, s.horizon};
  b.n = s.n;

  // Skip-sample the n*(n-1) ordered pairs: jump ahead by geometric gaps so
  // the cost is proportional to the number of edges, not pairs.
  const std::uint64_t slots = std::uint64_t(s.n) * (s.n - 1);
  if (s.edge_density >= 1.0) {
    for (NodeId u = 0; u < s.n; ++u)
      for (NodeId v = 0; v < s.n; ++v)
        if (u != v) b.edge(u, v, s.beta);
  } else if (s.edge_density > 0.0) {
    const double log1md = std::log1p(-s.edge_density);
    double at = -1.0;
    for (;;) {
      at += 1.0 + std::floor(std::log1p(-rng.uniform()) / log1md);
      if (at >= static_cast<double>(slots)) break;
      std::uint64_t idx = static_cast<std::uint64_t>(at);
      NodeId u = static_cast<NodeId>(idx / (s.n - 1));
      NodeId r = static_cast<NodeId>(idx % (s.n - 1));
      b.edge(u, r < u ? r : r + 1, s.beta);
    }
  }
  return b.finish(s.gamma);
}

Instance gen_star(const GeneratorSpec& s, Rng&) {
  if (s.leaves == 0) throw std::invalid_argument("generator: star needs leaves >= 1");
  Builder b{s.model, s.horizon};
  b.n = s.leaves + 1;
  for (NodeId i = 1; i <= s.leaves; ++i) b.edge(0, i, s.beta);
  return b.finish(s.gamma);
}

Instance gen_path(const GeneratorSpec& s, Rng&) {
  if (s.length == 0) throw std::invalid_argument("generator: path needs length >= 1");
  Builder b{s.model, s.horizon};
  b.n = s.length + 1;
  for (NodeId i = 0; i < s.length; ++i) b.edge(i, i + 1, s.beta);
  return b.finish(s.gamma);
}

// Fan gadget rooted at `v0`; returns the next free node id.  Dashed edges
// carry the per-model probability of `spec`; the rest are deterministic.
NodeId add_fan(Builder& b, const GeneratorSpec& s, NodeId v0, NodeId first_free) {
  NodeId mid0 = first_free;
  NodeId hub = mid0 + s.b;
  NodeId sink0 = hub + 1;
  for (NodeId i = 0; i < s.b; ++i) b.edge(v0, mid0 + i, dashed(s));
  for (NodeId i = 0; i < s.b; ++i) b.edge(mid0 + i, hub, 1.0);
  for (NodeId i = 0; i < s.n0; ++i) b.edge(hub, sink0 + i, 1.0);
  return sink0 + s.n0;
}

Instance gen_fan_gadget(const GeneratorSpec& s, Rng&) {
  if (s.b == 0) throw std::invalid_argument("generator: gadget needs b >= 1");
  Builder b{s.model, s.horizon};
  b.n = 2 + s.b + s.n0;
  NodeId end = add_fan(b, s, 0, 1);
  if (end != b.n) throw std::logic_error("gadget layout mismatch");
  return b.finish(s.gamma);
}

Instance gen_choice_gadget(const GeneratorSpec& s, Rng&) {
  if (s.b == 0 || s.gadget_copies == 0 || s.star_leaves == 0)
    throw std::invalid_argument("generator: choice gadget needs b, copies, star_leaves >= 1");
  if (!(s.left_edge_prob >= 0.0 && s.left_edge_prob <= 1.0))
    throw std::invalid_argument("generator: left_edge_prob out of [0,1]");
  Builder b{s.model, s.horizon};
  b.n = 1 + s.star_leaves + 1 + s.gadget_copies * (s.b + 1 + s.n0);

  double left = s.left_edge_prob;
  if (s.model == Model::ic) left = aggregate_edge_prob(left, s.gamma);
  for (NodeId i = 1; i <= s.star_leaves; ++i) b.edge(0, i, left);

  NodeId v = s.star_leaves + 1;
  NodeId free = v + 1;
  for (NodeId c = 0; c < s.gadget_copies; ++c) free = add_fan(b, s, v, free);
  if (free != b.n) throw std::logic_error("gadget layout mismatch");
  return b.finish(s.gamma);
}

}  // namespace

Instance generate(const GeneratorSpec& spec, Rng& rng) {
  check_common(spec);
  switch (spec.kind) {
    case GeneratorSpec::Kind::erdos_renyi: return gen_erdos_renyi(spec, rng);
    case GeneratorSpec::Kind::star: return gen_star(spec, rng);
    case GeneratorSpec::Kind::path: return gen_path(spec, rng);
    case GeneratorSpec::Kind::fan_gadget: return gen_fan_gadget(spec, rng);
    case GeneratorSpec::Kind::choice_gadget: return gen_choice_gadget(spec, rng);
  }
  throw std::invalid_argument("generator: unknown kind");
}

}  // namespace sirmax
