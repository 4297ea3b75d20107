#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "sirmax/prob.hpp"
#include "sirmax/rr.hpp"
#include "sirmax/simulate.hpp"

using namespace sirmax;

namespace {

double member_freq(const Instance& inst, NodeId root, NodeId who, int runs,
                   std::uint64_t seed) {
  int hits = 0;
  for (int r = 0; r < runs; ++r) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
    auto rr = sample_rr(inst, root, rng);
    if (std::binary_search(rr.members.begin(), rr.members.end(), who)) ++hits;
  }
  return static_cast<double>(hits) / runs;
}

}  // namespace

TEST_CASE("an isolated root yields the singleton reverse set under every model") {
  Instance ic = make_instance(3, Model::ic, {{0, 1}}, {1.0});
  Instance sir = make_instance(3, Model::sir, {{0, 1}}, {1.0}, {0.5, 0.5, 0.5});
  Instance tsir = make_instance(3, Model::tsir, {{0, 1}}, {1.0}, {0.5, 0.5, 0.5}, 4);
  Rng rng(1u);
  for (const Instance* inst : {&ic, &sir, &tsir}) {
    auto rr = sample_rr(*inst, 2, rng);
    CHECK(rr.root == 2);
    CHECK(rr.members == std::vector<NodeId>{2});
    CHECK(rr.work == 0);
  }
}

TEST_CASE("a certain edge always pulls its source into the reverse set") {
  Instance inst = make_instance(2, Model::ic, {{0, 1}}, {1.0});
  for (int r = 0; r < 20; ++r) {
    Rng rng = Rng::stream(2u, static_cast<std::uint64_t>(r));
    auto rr = sample_rr_ic(inst, 1, rng);
    CHECK(rr.members == std::vector<NodeId>{0, 1});
    CHECK(rr.work == 1);
  }
}

TEST_CASE("a half-probability edge admits its source half the time") {
  Instance inst = oracles::single_edge_ic(0.5);
  double freq = member_freq(inst, 1, 0, 100000, 3u);
  double se = std::sqrt(0.25 / 100000.0);
  CHECK(std::abs(freq - 0.5) < 3.0 * se);
}

TEST_CASE("rr samplers reject roots out of range and mismatched models") {
  Rng rng(1u);
  CHECK_THROWS_AS(sample_rr_ic(oracles::single_edge_ic(0.5), 2, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_rr_ic(oracles::diamond_sir(), 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_rr_sir(oracles::diamond_matched_ic(), 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_rr_tsir(oracles::diamond_sir(), 0, rng), std::invalid_argument);
}

TEST_CASE("chain membership probabilities multiply along the reverse path") {
  Instance chain = oracles::chain_sir();
  double p1 = member_freq(chain, 2, 1, 100000, 4u);
  double p0 = member_freq(chain, 2, 0, 100000, 5u);
  double se1 = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / 100000.0);
  double se0 = std::sqrt((4.0 / 9.0) * (5.0 / 9.0) / 100000.0);
  CHECK(std::abs(p1 - 2.0 / 3.0) < 3.0 * se1);
  CHECK(std::abs(p0 - 4.0 / 9.0) < 3.0 * se0);
}

TEST_CASE("a node with two edges into the set joins with the correlated gadget probability") {
  // 0 -> 1 and 0 -> 2 both certain into root-side nodes; root 3 sees 1 and 2
  // through certain edges, so 0's join probability is p_sir of width two.
  Instance inst = make_instance(4, Model::sir, {{0, 1}, {0, 2}, {1, 3}, {2, 3}},
                                {0.5, 0.5, 1.0, 1.0}, {0.5, 0.5, 0.5, 0.5});
  double freq = member_freq(inst, 3, 0, 100000, 6u);
  double want = gadget_infection_probs(2, 0.5, 0.5).p_sir;  // 6/7
  double se = std::sqrt(want * (1 - want) / 100000.0);
  CHECK(std::abs(freq - want) < 3.0 * se);
}

TEST_CASE("certain recovery makes sir reverse sets match ic reverse sets in distribution") {
  // 6-node graph; compare the full member-set distribution via pattern counts
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 2}, {1, 2}, {2, 4}, {3, 4}, {4, 5}, {0, 4}};
  std::vector<double> betas{0.4, 0.7, 0.5, 0.3, 0.8, 0.6};
  Instance sir = make_instance(6, Model::sir, edges, betas, {1, 1, 1, 1, 1, 1});
  Instance ic = make_instance(6, Model::ic, edges, betas);

  const int runs = 100000;
  std::map<std::vector<NodeId>, std::array<std::uint64_t, 2>> hist;
  for (int r = 0; r < runs; ++r) {
    Rng a = Rng::stream(7u, static_cast<std::uint64_t>(r));
    Rng b = Rng::stream(8u, static_cast<std::uint64_t>(r));
    hist[sample_rr_sir(sir, 5, a).members][0]++;
    hist[sample_rr_ic(ic, 5, b).members][1]++;
  }
  // two-sample z-test per observed member set, Bonferroni-style broad bound
  for (const auto& [set, counts] : hist) {
    double fa = counts[0] / double(runs), fb = counts[1] / double(runs);
    double avg = (fa + fb) / 2.0;
    double se = std::sqrt(std::max(avg * (1 - avg) * 2.0 / runs, 1e-12));
    CAPTURE(set.size());
    CHECK(std::abs(fa - fb) < 5.0 * se + 1e-9);
  }
}

TEST_CASE("tsir reverse sets respect span distances on the deterministic chain") {
  Instance t1 = make_instance(3, Model::tsir, {{0, 1}, {1, 2}}, {1, 1}, {1, 1, 1}, 1);
  Instance t2 = make_instance(3, Model::tsir, {{0, 1}, {1, 2}}, {1, 1}, {1, 1, 1}, 2);
  for (int r = 0; r < 20; ++r) {
    Rng a = Rng::stream(9u, static_cast<std::uint64_t>(r));
    Rng b = Rng::stream(10u, static_cast<std::uint64_t>(r));
    CHECK(sample_rr_tsir(t1, 2, a).members == std::vector<NodeId>{1, 2});
    CHECK(sample_rr_tsir(t2, 2, b).members == std::vector<NodeId>{0, 1, 2});
  }
}

TEST_CASE("a horizon beyond any possible span makes tsir reverse sets match sir") {
  Rng mk(11u);
  Instance sir = oracles::random_instance(8, 20, Model::sir, mk, 0.3, 0.8);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (EdgeId e = 0; e < sir.graph.num_edges(); ++e) edges.push_back(sir.graph.edge(e));
  Instance tsir = make_instance(8, Model::tsir, edges, sir.params.edge_prob,
                                sir.params.node_recovery, 4000);

  const int runs = 100000;
  for (NodeId probe : {NodeId{1}, NodeId{4}, NodeId{6}}) {
    double fs = member_freq(sir, 7, probe, runs, 12u);
    double ft = member_freq(tsir, 7, probe, runs, 13u);
    double avg = (fs + ft) / 2.0;
    double se = std::sqrt(std::max(avg * (1 - avg) * 2.0 / runs, 1e-12));
    CHECK(std::abs(fs - ft) < 4.0 * se + 1e-9);
  }
}

TEST_CASE("reverse sampling is unbiased for influence across all models and seed sets") {
  const std::uint64_t runs = 100000;
  for (Model m : {Model::ic, Model::sir, Model::tsir}) {
    Instance inst = oracles::mixed7(m, 3);
    const NodeId n = inst.graph.num_nodes();
    for (std::vector<NodeId> seeds : {std::vector<NodeId>{0}, {2, 4}, {1, 5, 6}}) {
      double want = exact_sigma(inst, seeds);
      std::uint64_t hits = 0;
      for (std::uint64_t r = 0; r < runs; ++r) {
        Rng rng = Rng::stream(14u + static_cast<std::uint64_t>(m) * 100, r);
        NodeId root = rng.below(n);
        auto rr = sample_rr(inst, root, rng);
        bool hit = false;
        for (NodeId s : seeds)
          if (std::binary_search(rr.members.begin(), rr.members.end(), s)) hit = true;
        if (hit) ++hits;
      }
      double f = hits / double(runs);
      double est = n * f;
      double se = n * std::sqrt(f * (1 - f) / runs);
      CAPTURE(static_cast<int>(m));
      CAPTURE(seeds.size());
      CHECK(std::abs(est - want) < 4.0 * se);
    }
  }
}

TEST_CASE("work counts bound the examined edges from below and above") {
  Rng mk(15u);
  for (Model m : {Model::ic, Model::sir}) {
    Instance inst = oracles::random_instance(20, 80, m, mk, 0.2, 0.9);
    for (int r = 0; r < 2000; ++r) {
      Rng rng = Rng::stream(16u, static_cast<std::uint64_t>(r));
      NodeId root = rng.below(20);
      auto rr = sample_rr(inst, root, rng);
      CHECK(rr.work + 1 >= rr.members.size());
      std::uint64_t cap = 0;
      for (NodeId v : rr.members) cap += inst.graph.in_degree(v);
      CHECK(rr.work <= cap);
    }
  }
}

TEST_CASE("tsir work stays within the in-degrees of the pre-prune traversal") {
  Rng mk(17u);
  Instance inst = oracles::random_instance(20, 80, Model::tsir, mk, 0.2, 0.9, 3);
  for (int r = 0; r < 2000; ++r) {
    Rng rng = Rng::stream(18u, static_cast<std::uint64_t>(r));
    NodeId root = rng.below(20);
    TsirSampleTrace trace;
    auto rr = sample_rr_tsir(inst, root, rng, &trace);
    CHECK(rr.work + 1 >= rr.members.size());
    std::uint64_t cap = 0;
    for (NodeId v : trace.visited) cap += inst.graph.in_degree(v);
    CHECK(rr.work <= cap);
    // every member must be reachable within the horizon over recorded arcs
    for (NodeId v : rr.members) {
      if (v == root) continue;
      bool has_arc = false;
      for (auto [src, dst, span] : trace.arcs)
        if (src == v) has_arc = true;
      CHECK(has_arc);
    }
  }
}

TEST_CASE("tsir members are exactly the nodes with span-bounded paths to the root") {
  Rng mk(19u);
  Instance inst = oracles::random_instance(10, 35, Model::tsir, mk, 0.3, 0.9, 3);
  for (int r = 0; r < 3000; ++r) {
    Rng rng = Rng::stream(20u, static_cast<std::uint64_t>(r));
    NodeId root = rng.below(10);
    TsirSampleTrace trace;
    auto rr = sample_rr_tsir(inst, root, rng, &trace);

    // Bellman-Ford over the recorded arcs toward the root
    const std::uint32_t far = 1000;
    std::vector<std::uint32_t> dist(10, far);
    dist[root] = 0;
    for (int it = 0; it < 10; ++it)
      for (auto [src, dst, span] : trace.arcs)
        if (dist[dst] != far) dist[src] = std::min(dist[src], dist[dst] + span);
    for (NodeId v = 0; v < 10; ++v) {
      bool in = std::binary_search(rr.members.begin(), rr.members.end(), v);
      CAPTURE(v);
      CHECK(in == (dist[v] <= 3));
    }
  }
}

TEST_CASE("collections grow deterministically regardless of threads or call batching") {
  Rng mk(21u);
  Instance inst = oracles::random_instance(25, 100, Model::sir, mk);
  RRCollection one(inst);
  one.grow(400, 77u, 1);
  RRCollection two(inst);
  two.grow(400, 77u, 4);
  RRCollection split(inst);
  split.grow(150, 77u, 2);
  split.grow(400, 77u, 3);

  REQUIRE(one.size() == 400);
  for (const RRCollection* other : {&two, &split}) {
    REQUIRE(other->size() == 400);
    for (std::uint64_t i = 0; i < 400; ++i) {
      CHECK(one.root(i) == other->root(i));
      CHECK(std::equal(one.members(i).begin(), one.members(i).end(),
                       other->members(i).begin(), other->members(i).end()));
    }
    CHECK(one.total_work() == other->total_work());
  }
}

TEST_CASE("growing to a smaller target is a no-op and zero is rejected") {
  Instance inst = oracles::diamond_sir();
  RRCollection coll(inst);
  CHECK_THROWS_AS(coll.grow(0, 1u), std::invalid_argument);
  coll.grow(50, 1u);
  coll.grow(10, 1u);
  CHECK(coll.size() == 50);
}

TEST_CASE("on a singleton graph every reverse sample is that lone node") {
  Instance inst = make_instance(1, Model::ic, {}, {});
  RRCollection coll(inst);
  coll.grow(30, 2u);
  for (std::uint64_t i = 0; i < 30; ++i) {
    CHECK(coll.root(i) == 0);
    REQUIRE(coll.members(i).size() == 1);
    CHECK(coll.members(i)[0] == 0);
  }
  std::vector<NodeId> s{0};
  CHECK(coll.coverage_fraction(s) == 1.0);
}

TEST_CASE("coverage fractions on a hand-built collection count intersecting sets") {
  Instance inst = make_instance(5, Model::ic, {{0, 1}}, {0.5});
  RRCollection coll(inst, {{1, 2}, {2, 3}, {4}});
  std::vector<NodeId> none;
  CHECK(coll.coverage_fraction(none) == 0.0);
  std::vector<NodeId> two{2};
  CHECK(coll.coverage_fraction(two) == doctest::Approx(2.0 / 3.0));
  std::vector<NodeId> both{2, 4};
  CHECK(coll.coverage_fraction(both) == 1.0);
  std::vector<NodeId> outside{0};
  CHECK(coll.coverage_fraction(outside) == 0.0);

  CHECK(coll.sets_containing(2).size() == 2);
  CHECK(coll.sets_containing(0).empty());
  CHECK_THROWS_AS(RRCollection(inst, {{1}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(RRCollection(inst, {{9}}), std::invalid_argument);
}

TEST_CASE("collection roots are uniform over the nodes") {
  Instance inst = make_instance(4, Model::ic, {{0, 1}}, {0.3});
  RRCollection coll(inst);
  coll.grow(100000, 5u);
  std::vector<std::uint64_t> counts(4, 0);
  for (std::uint64_t i = 0; i < coll.size(); ++i) counts[coll.root(i)]++;
  std::vector<double> expected(4, 0.25);
  CHECK(oracles::chi_square(counts, expected, coll.size()) <
        oracles::chi_square_threshold(3));
}
