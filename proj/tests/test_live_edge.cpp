#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "sirmax/live_edge.hpp"
#include "sirmax/prob.hpp"
#include "sirmax/simulate.hpp"

using namespace sirmax;

namespace {

// Pattern index of node u's out-edges in a live-edge sample: bit i set iff
// u's i-th out-edge (adjacency order) is live.
unsigned pattern_of(const Instance& inst, const LiveEdgeGraph& g, NodeId u) {
  unsigned pat = 0;
  auto arcs = inst.graph.out(u);
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (std::binary_search(g.live.begin(), g.live.end(), arcs[i].edge))
      pat |= 1u << i;
  return pat;
}

}  // namespace

TEST_CASE("ic live-edge sampling includes everything or nothing at the extremes") {
  Instance all = make_instance(3, Model::ic, {{0, 1}, {1, 2}, {0, 2}}, {1, 1, 1});
  Instance none = make_instance(3, Model::ic, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 0});
  for (int r = 0; r < 20; ++r) {
    Rng rng = Rng::stream(1u, static_cast<std::uint64_t>(r));
    CHECK(sample_live_ic(all, rng).live == std::vector<EdgeId>{0, 1, 2});
    CHECK(sample_live_ic(none, rng).live.empty());
  }
}

TEST_CASE("single-edge ic live frequency matches its activation probability") {
  Instance inst = oracles::single_edge_ic(0.5);
  Rng rng(33u);
  const int runs = 100000;
  int live = 0;
  for (int r = 0; r < runs; ++r)
    if (!sample_live_ic(inst, rng).live.empty()) ++live;
  double freq = static_cast<double>(live) / runs;
  double se = std::sqrt(0.25 / runs);
  CHECK(std::abs(freq - 0.5) < 3.0 * se);
}

TEST_CASE("live-edge samplers reject mismatched models and tsir spans stay within the horizon") {
  Rng rng(1u);
  CHECK_THROWS_AS(sample_live_ic(oracles::diamond_sir(), rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_live_sir(oracles::diamond_matched_ic(), rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_live_tsir(oracles::diamond_sir(), rng), std::invalid_argument);

  Rng mk(2u);
  Instance tsir = oracles::random_instance(10, 40, Model::tsir, mk, 0.2, 0.9, 5);
  for (int r = 0; r < 300; ++r) {
    Rng s = Rng::stream(3u, static_cast<std::uint64_t>(r));
    auto g = sample_live_tsir(tsir, s);
    REQUIRE(g.span.size() == g.live.size());
    for (std::uint32_t w : g.span) {
      CHECK(w >= 1);
      CHECK(w <= 5);
    }
    CHECK(std::is_sorted(g.live.begin(), g.live.end()));
  }
}

TEST_CASE("sir per-edge live marginals match the aggregated probability") {
  Instance fork = oracles::fork_sir();
  Rng rng(4u);
  const int runs = 100000;
  int live0 = 0, live1 = 0;
  for (int r = 0; r < runs; ++r) {
    auto g = sample_live_sir(fork, rng);
    for (EdgeId e : g.live) (e == 0 ? live0 : live1)++;
  }
  double p = aggregate_edge_prob(0.5, 0.5);  // 2/3
  double se = std::sqrt(p * (1 - p) / runs);
  CHECK(std::abs(live0 / double(runs) - p) < 3.0 * se);
  CHECK(std::abs(live1 / double(runs) - p) < 3.0 * se);
}

TEST_CASE("sir sibling edges are positively correlated through the shared recovery") {
  Instance fork = oracles::fork_sir();
  Rng rng(5u);
  const int runs = 100000;
  int both_blocked = 0;
  for (int r = 0; r < runs; ++r)
    if (sample_live_sir(fork, rng).live.empty()) ++both_blocked;
  double p = 1.0 / 7.0;
  double se = std::sqrt(p * (1 - p) / runs);
  CHECK(std::abs(both_blocked / double(runs) - p) < 3.0 * se);
}

TEST_CASE("sir out-edge patterns follow the joint distribution on wider fans") {
  // node 0 with four heterogeneous out-edges; chi-square over the 16 patterns
  Instance inst = make_instance(
      5, Model::sir, {{0, 1}, {0, 2}, {0, 3}, {0, 4}},
      {0.15, 0.5, 0.8, 0.35}, {0.45, 0.5, 0.5, 0.5, 0.5});
  std::vector<double> betas{0.15, 0.5, 0.8, 0.35};
  auto joint = joint_outedge_distribution(betas, 0.45);

  Rng rng(6u);
  const std::uint64_t runs = 100000;
  std::vector<std::uint64_t> counts(16, 0);
  for (std::uint64_t r = 0; r < runs; ++r)
    counts[pattern_of(inst, sample_live_sir(inst, rng), 0)]++;

  double x2 = oracles::chi_square(counts, joint.prob, runs);
  CHECK(x2 < oracles::chi_square_threshold(15));
}

TEST_CASE("certain recovery makes the sir sampler agree with ic pattern by pattern") {
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {0, 2}, {0, 3}};
  std::vector<double> betas{0.3, 0.6, 0.85};
  Instance sir = make_instance(4, Model::sir, edges, betas, {1, 1, 1, 1});

  std::vector<double> expected(8);
  for (unsigned pat = 0; pat < 8; ++pat) {
    double p = 1.0;
    for (unsigned i = 0; i < 3; ++i) p *= (pat >> i & 1u) ? betas[i] : 1.0 - betas[i];
    expected[pat] = p;
  }

  Rng rng(7u);
  const std::uint64_t runs = 100000;
  std::vector<std::uint64_t> counts(8, 0);
  for (std::uint64_t r = 0; r < runs; ++r)
    counts[pattern_of(sir, sample_live_sir(sir, rng), 0)]++;
  CHECK(oracles::chi_square(counts, expected, runs) < oracles::chi_square_threshold(7));
}

TEST_CASE("live patterns of distinct source nodes are independent") {
  // two unrelated single-edge sources; the four joint cells must factor
  Instance inst = make_instance(4, Model::sir, {{0, 1}, {2, 3}}, {0.5, 0.7},
                                {0.4, 0.5, 0.6, 0.5});
  double pa = aggregate_edge_prob(0.5, 0.4);
  double pb = aggregate_edge_prob(0.7, 0.6);
  std::vector<double> expected{(1 - pa) * (1 - pb), pa * (1 - pb), (1 - pa) * pb, pa * pb};

  Rng rng(8u);
  const std::uint64_t runs = 100000;
  std::vector<std::uint64_t> counts(4, 0);
  for (std::uint64_t r = 0; r < runs; ++r) {
    auto g = sample_live_sir(inst, rng);
    unsigned cell = 0;
    for (EdgeId e : g.live) cell |= 1u << e;
    counts[cell]++;
  }
  CHECK(oracles::chi_square(counts, expected, runs) < oracles::chi_square_threshold(3));
}

TEST_CASE("the sir sampler and the literal per-round process draw the same distribution") {
  // round-by-round coin flipping is the definition; the closed-form sampler
  // must match it on a heterogeneous fan
  Instance inst = make_instance(4, Model::sir, {{0, 1}, {0, 2}, {0, 3}},
                                {0.25, 0.6, 0.45}, {0.35, 0.5, 0.5, 0.5});
  Rng rng_fast(9u), rng_lit(10u);
  const std::uint64_t runs = 100000;
  std::vector<std::uint64_t> fast(8, 0), lit(8, 0);
  for (std::uint64_t r = 0; r < runs; ++r) {
    fast[pattern_of(inst, sample_live_sir(inst, rng_fast), 0)]++;
    LiveEdgeGraph g;
    g.live = oracles::literal_live_edges(inst, rng_lit, 0).live;
    lit[pattern_of(inst, g, 0)]++;
  }
  // score both against the analytic joint; each must pass independently
  std::vector<double> betas{0.25, 0.6, 0.45};
  auto joint = joint_outedge_distribution(betas, 0.35);
  CHECK(oracles::chi_square(fast, joint.prob, runs) < oracles::chi_square_threshold(7));
  CHECK(oracles::chi_square(lit, joint.prob, runs) < oracles::chi_square_threshold(7));
}

TEST_CASE("tsir at horizon zero has no live edges at all") {
  Instance inst = oracles::diamond_tsir(0);
  for (int r = 0; r < 20; ++r) {
    Rng rng = Rng::stream(11u, static_cast<std::uint64_t>(r));
    auto g = sample_live_tsir(inst, rng);
    CHECK(g.live.empty());
    CHECK(g.span.empty());
  }
}

TEST_CASE("certain transmission and recovery make every tsir edge live with span one") {
  Instance inst = make_instance(4, Model::tsir, {{0, 1}, {1, 2}, {2, 3}}, {1, 1, 1},
                                {1, 1, 1, 1}, 3);
  for (int r = 0; r < 20; ++r) {
    Rng rng = Rng::stream(12u, static_cast<std::uint64_t>(r));
    auto g = sample_live_tsir(inst, rng);
    CHECK(g.live == std::vector<EdgeId>{0, 1, 2});
    CHECK(g.span == std::vector<std::uint32_t>{1, 1, 1});
  }
}

TEST_CASE("tsir span distribution matches the per-round analytic terms") {
  // single edge beta=gamma=0.5 with a horizon far beyond the mass:
  // Pr[span=t] = beta(1-beta)^{t-1} * (1-gamma)^{t-1}
  Instance inst = make_instance(2, Model::tsir, {{0, 1}}, {0.5}, {0.5, 0.5}, 30);
  Rng rng(13u);
  const std::uint64_t runs = 100000;
  // buckets: blocked, span 1..10, span > 10
  std::vector<std::uint64_t> counts(12, 0);
  for (std::uint64_t r = 0; r < runs; ++r) {
    auto g = sample_live_tsir(inst, rng);
    if (g.live.empty())
      counts[0]++;
    else if (g.span[0] <= 10)
      counts[g.span[0]]++;
    else
      counts[11]++;
  }
  std::vector<double> expected(12, 0.0);
  double total_live = 0.0;
  for (int t = 1; t <= 10; ++t) {
    expected[t] = 0.5 * std::pow(0.5, t - 1) * std::pow(0.5, t - 1);
    total_live += expected[t];
  }
  double p_live = 2.0 / 3.0;  // aggregate marginal; horizon 30 truncates ~4^-30
  expected[11] = p_live - total_live;
  expected[0] = 1.0 - p_live;
  CHECK(oracles::chi_square(counts, expected, runs) < oracles::chi_square_threshold(11));

  // live frequency alone must match the aggregate marginal
  double freq = 1.0 - counts[0] / double(runs);
  double se = std::sqrt(p_live * (1 - p_live) / runs);
  CHECK(std::abs(freq - p_live) < 3.0 * se);
}

TEST_CASE("the tsir sampler and the literal capped process draw the same spans") {
  Instance inst = make_instance(3, Model::tsir, {{0, 1}, {0, 2}}, {0.4, 0.7},
                                {0.3, 0.5, 0.5}, 4);
  Rng rng_fast(14u), rng_lit(15u);
  const std::uint64_t runs = 100000;
  // per-edge histogram over {blocked, span 1..4}, both edges stacked
  std::vector<std::uint64_t> fast(10, 0), lit(10, 0);
  auto tally = [](std::vector<std::uint64_t>& h, const LiveEdgeGraph& g) {
    std::size_t at0 = 0, at1 = 5;  // edge 0 rows 0-4, edge 1 rows 5-9
    bool seen0 = false, seen1 = false;
    for (std::size_t i = 0; i < g.live.size(); ++i) {
      if (g.live[i] == 0) {
        h[at0 + g.span[i]]++;
        seen0 = true;
      } else {
        h[at1 + g.span[i]]++;
        seen1 = true;
      }
    }
    if (!seen0) h[at0]++;
    if (!seen1) h[at1]++;
  };
  for (std::uint64_t r = 0; r < runs; ++r) {
    tally(fast, sample_live_tsir(inst, rng_fast));
    auto l = oracles::literal_live_edges(inst, rng_lit, 4);
    LiveEdgeGraph g;
    g.live = l.live;
    g.span = l.span;
    tally(lit, g);
  }
  for (std::size_t cell = 0; cell < 10; ++cell) {
    double fa = fast[cell] / double(runs), la = lit[cell] / double(runs);
    double se = std::sqrt((fa * (1 - fa) + la * (1 - la)) / runs);
    CAPTURE(cell);
    CHECK(std::abs(fa - la) <= 4.0 * se + 1e-9);
  }
}

TEST_CASE("reachability over live-edge samples reproduces forward influence estimates") {
  std::vector<NodeId> seeds{0, 5};
  for (Model m : {Model::ic, Model::sir, Model::tsir}) {
    Instance inst = oracles::mixed7(m, 3);
    Rng rng(16u);
    const std::uint64_t runs = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t r = 0; r < runs; ++r) {
      auto g = sample_live(inst, rng);
      double c = static_cast<double>(reachable(inst, g, seeds).size());
      sum += c;
      sumsq += c * c;
    }
    double mean = sum / runs;
    double var = (sumsq - sum * sum / runs) / (runs - 1);
    double se_live = std::sqrt(var / runs);
    auto fwd = estimate_sigma(inst, seeds, runs, 17);
    double joint = std::hypot(se_live, fwd.stderr_);
    CAPTURE(static_cast<int>(m));
    CHECK(std::abs(mean - fwd.mean) < 4.0 * joint);
  }
}

TEST_CASE("reachable respects tsir span weights rather than hop counts") {
  // 0 -> 1 -> 2 all live: spans decide whether 2 is within the horizon
  Instance inst = make_instance(3, Model::tsir, {{0, 1}, {1, 2}}, {0.9, 0.9},
                                {0.9, 0.9, 0.9}, 2);
  LiveEdgeGraph g;
  g.live = {0, 1};
  g.span = {1, 1};
  std::vector<NodeId> seeds{0};
  CHECK(reachable(inst, g, seeds) == std::vector<NodeId>{0, 1, 2});
  g.span = {1, 2};  // total 3 > horizon
  CHECK(reachable(inst, g, seeds) == std::vector<NodeId>{0, 1});
  g.span = {2, 1};
  CHECK(reachable(inst, g, seeds) == std::vector<NodeId>{0, 1});
}
