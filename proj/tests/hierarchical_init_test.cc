#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "hara/error.h"
#include "hara/hierarchical_init.h"
#include "hara/metrics.h"
#include "hara/synthetic.h"
#include "hara/triplet.h"
#include "test_util.h"

using namespace hara;
using namespace hara::testing;

namespace {

InitConfig SingleEps(int s_init, double eps) {
  InitConfig c;
  c.s_init = s_init;
  c.eps = LoopThresholds{{eps}};
  return c;
}

std::vector<NodeId> AdditionOrder(const InitResult& r) {
  std::vector<NodeId> order;
  for (const TraceEvent& e : r.trace) {
    if (e.kind == TraceKind::kRoot || e.kind == TraceKind::kAddBySupport ||
        e.kind == TraceKind::kAddByVote) {
      order.push_back(e.node);
    }
  }
  return order;
}

void CheckForest(const ViewGraph& g, const InitResult& r) {
  const int n = g.num_nodes();
  CHECK(static_cast<int>(r.tree_edges.size()) == n - static_cast<int>(r.roots.size()));
  std::vector<int> as_child(n, 0);
  for (const TreeEdge& t : r.tree_edges) {
    ++as_child[t.child];
    const RelEdge& e = g.edge(t.edge);
    CHECK(((e.i == t.parent && e.j == t.child) || (e.j == t.parent && e.i == t.child)));
    // Bit-level propagation.
    CHECK(r.rotations[t.child] == g.Oriented(t.edge, t.child) * r.rotations[t.parent]);
  }
  for (NodeId root : r.roots) CHECK(as_child[root] == 0);
  for (NodeId v = 0; v < n; ++v) {
    const bool is_root = std::find(r.roots.begin(), r.roots.end(), v) != r.roots.end();
    CHECK(as_child[v] == (is_root ? 0 : 1));
  }
  // Acyclic: walking up from any node reaches a root within n steps.
  std::vector<NodeId> parent(n, -1);
  for (const TreeEdge& t : r.tree_edges) parent[t.child] = t.parent;
  for (NodeId v = 0; v < n; ++v) {
    NodeId x = v;
    int steps = 0;
    while (parent[x] >= 0 && steps <= n) {
      x = parent[x];
      ++steps;
    }
    CHECK(steps <= n);
    CHECK(std::find(r.roots.begin(), r.roots.end(), x) != r.roots.end());
  }
}

// After an addition the schedule restarts at (s_init, 1): the next threshold
// event, if any, is the first step away from it.
void CheckResetDiscipline(const InitResult& r, const InitConfig& cfg) {
  const int m = cfg.eps.size();
  bool after_add = false;
  int s = cfg.s_init;
  int y = 1;
  for (const TraceEvent& e : r.trace) {
    switch (e.kind) {
      case TraceKind::kRoot:
      case TraceKind::kAddBySupport:
      case TraceKind::kAddByVote:
        after_add = true;
        s = cfg.s_init;
        y = 1;
        break;
      case TraceKind::kEpsAdvance:
        CHECK(e.s == s);
        CHECK(e.eps_index == y + 1);
        if (after_add) CHECK((e.s == cfg.s_init && e.eps_index == 2));
        y = e.eps_index;
        after_add = false;
        break;
      case TraceKind::kSDecrement:
        CHECK(y == m);
        CHECK(e.s == s - 1);
        CHECK(e.eps_index == 1);
        if (after_add) CHECK(e.s == cfg.s_init - 1);
        s = e.s;
        y = 1;
        after_add = false;
        break;
      case TraceKind::kTierAdvance:
        CHECK(e.s == cfg.s_init);
        CHECK(e.eps_index == 1);
        s = cfg.s_init;
        y = 1;
        break;
    }
    CHECK(s >= 0);
    CHECK(s <= cfg.s_init);
    CHECK(y >= 1);
    CHECK(y <= m);
  }
}

// Between two additions the threshold state only weakens: each threshold
// event is lexicographically below the previous one in (s, -eps_index).
// Support additions from one base report the state they passed, so they are
// ordered the same way.
void CheckHierarchy(const InitResult& r) {
  constexpr std::pair<int, int> kTop{1 << 30, 0};
  std::pair<int, int> thresholds = kTop;
  std::pair<int, int> round = kTop;
  NodeId round_parent = -1;
  for (const TraceEvent& e : r.trace) {
    const std::pair<int, int> tier{e.s, -e.eps_index};
    switch (e.kind) {
      case TraceKind::kAddBySupport:
        if (e.parent == round_parent) CHECK(tier <= round);
        round = tier;
        round_parent = e.parent;
        thresholds = kTop;
        break;
      case TraceKind::kSDecrement:
      case TraceKind::kEpsAdvance:
        CHECK(tier < thresholds);
        thresholds = tier;
        round_parent = -1;
        break;
      default:
        thresholds = kTop;
        round_parent = -1;
        break;
    }
  }
}

}  // namespace

TEST_CASE("single node") {
  const ViewGraph g = ViewGraph::Build(1, {});
  for (InitMode mode : {InitMode::kSimplified, InitMode::kFull}) {
    InitConfig c = SingleEps(3, 0.1);
    c.mode = mode;
    const InitResult r = Initialize(g, c);
    REQUIRE(r.rotations.size() == 1);
    CHECK(r.rotations[0] == Rotation::Identity());
    CHECK(r.tree_edges.empty());
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].kind == TraceKind::kRoot);
  }
}

TEST_CASE("empty graph") {
  const ViewGraph g = ViewGraph::Build(0, {});
  CHECK(InitSimplified(g, SingleEps(3, 0.1)).rotations.empty());
  CHECK(InitFull(g, SingleEps(3, 0.1)).trace.empty());
}

TEST_CASE("walkthrough addition order") {
  const ViewGraph g = WalkthroughFixture();
  const std::vector<int> expected = {1, 3, 11, 2, 4, 9, 10, 12, 13, 14, 15, 5, 6, 7, 8};
  for (InitMode mode : {InitMode::kSimplified, InitMode::kFull}) {
    InitConfig c = SingleEps(2, 0.01);
    c.mode = mode;
    const InitResult r = Initialize(g, c);
    std::vector<int> labels;
    for (NodeId v : AdditionOrder(r)) labels.push_back(Label(v));
    CHECK(labels == expected);
    const auto vote = std::find_if(r.trace.begin(), r.trace.end(), [](const TraceEvent& e) {
      return e.kind == TraceKind::kAddByVote;
    });
    REQUIRE(vote != r.trace.end());
    CHECK(Label(vote->node) == 12);
    CHECK(vote->count == 3);
    // Node 12 takes an inlier-consistent rotation (via 1 or 11, not 3).
    CHECK(Label(vote->parent) != 3);
    CheckForest(g, r);
    const MetricsResult m = Evaluate(r.rotations, g.ground_truth());
    CHECK(m.theta2_deg < 1e-9);
  }
}

TEST_CASE("vote drawing: node 6 wins with 3 votes") {
  const ViewGraph g = VoteFixture();
  std::vector<std::uint8_t> fam(8, 0);
  std::vector<Rotation> fixed(8);
  for (int l = 1; l <= 5; ++l) {
    fam[L(l)] = 1;
    fixed[L(l)] = *g.ground_truth()[L(l)];
  }
  for (NodeId base = 0; base < 5; ++base) {
    for (NodeId c : g.neighbors(base)) {
      if (!fam[c]) CHECK(CountTripletSupports(g, base, c, 1.0) == 0);
    }
  }
  const auto v = AddByVote(g, fam, fixed, InitConfig{}.vote_averaging);
  REQUIRE(v);
  CHECK(Label(v->node) == 6);
  CHECK(v->votes == 3);
  CHECK(ChordalDistance(v->rotation, *g.ground_truth()[L(6)]) < 1e-12);
}

TEST_CASE("vote with a single candidate returns it unchanged") {
  std::mt19937_64 rng(1);
  const auto abs = RandomRotations(rng, 2);
  const ViewGraph g = GraphFromPairs(abs, {{0, 1}});
  std::vector<std::uint8_t> fam = {1, 0};
  std::vector<Rotation> fixed = {RandomRotation(rng), Rotation()};
  const auto v = AddByVote(g, fam, fixed, InitConfig{}.vote_averaging);
  REQUIRE(v);
  CHECK(v->rotation == g.Relative(1, 0) * fixed[0]);
  CHECK(v->parent == 0);
}

TEST_CASE("vote picks a candidate inside the consistent cluster") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto abs = RandomRotations(rng, 7);
    std::vector<RelEdge> edges;
    for (NodeId f = 0; f < 6; ++f) {
      RelEdge e = ConsistentEdge(abs, f, 6);
      if (f == 2) {
        e.rel = RandomRotation(rng);
      } else {
        e.rel = Exp(RandomVector(rng, 0.0, 0.05)) * e.rel;
      }
      edges.push_back(e);
    }
    const ViewGraph g = ViewGraph::Build(7, edges);
    std::vector<std::uint8_t> fam = {1, 1, 1, 1, 1, 1, 0};
    std::vector<Rotation> fixed(abs.begin(), abs.end());
    const auto v = AddByVote(g, fam, fixed, InitConfig{}.vote_averaging);
    REQUIRE(v);
    CHECK(v->votes == 6);
    CHECK(v->parent != 2);

    // Brute force: the candidate minimizing the sum of distances to the
    // others is also a cluster member.
    std::vector<Rotation> cands;
    for (NodeId f = 0; f < 6; ++f) cands.push_back(g.Relative(6, f) * fixed[f]);
    std::size_t best = 0;
    for (std::size_t c = 1; c < cands.size(); ++c) {
      if (SumAngularDistances(cands, cands[c]) < SumAngularDistances(cands, cands[best])) best = c;
    }
    CHECK(best != 2);
    CHECK(AngularDistance(v->rotation, abs[6]) < 0.1);
  }
}

TEST_CASE("noise-free cycle with all triplets recovers ground truth") {
  std::mt19937_64 rng(3);
  const int n = 12;
  const auto abs = RandomRotations(rng, n);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i < n; ++i) {
    pairs.emplace_back(i, (i + 1) % n);
    pairs.emplace_back(i, (i + 2) % n);
  }
  const ViewGraph g = GraphFromPairs(abs, pairs);
  for (InitMode mode : {InitMode::kSimplified, InitMode::kFull}) {
    InitConfig c = SingleEps(1, 1e-6);
    c.mode = mode;
    const InitResult r = Initialize(g, c);
    CheckForest(g, r);
    CHECK(Evaluate(r.rotations, g.ground_truth()).theta2_deg < 1e-9);
  }
}

TEST_CASE("full initializer with one threshold matches the simplified one") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> size(2, 40);
  std::uniform_real_distribution<double> dens(0.1, 0.7);
  std::uniform_int_distribution<int> s_pick(1, 6);
  for (int t = 0; t < 200; ++t) {
    const ViewGraph g = RandomGraph(rng, size(rng), dens(rng), 0.05, 0.2);
    const InitConfig c = SingleEps(s_pick(rng), 0.1);
    const InitResult a = InitSimplified(g, c);
    const InitResult b = InitFull(g, c);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(a.trace == b.trace);
    CHECK(a.tree_edges == b.tree_edges);
    CHECK(a.roots == b.roots);
  }
}

TEST_CASE("weak-inlier bridge is crossed only after a tier advance") {
  std::mt19937_64 rng(5);
  const auto abs = RandomRotations(rng, 10);
  std::vector<RelEdge> edges;
  // Two dense clusters 0..4 and 5..9 joined by the single edge (4, 5).
  for (NodeId a = 0; a < 5; ++a) {
    for (NodeId b = a + 1; b < 5; ++b) {
      edges.push_back(ConsistentEdge(abs, a, b, 100));
      edges.push_back(ConsistentEdge(abs, a + 5, b + 5, 100));
    }
  }
  edges.push_back(ConsistentEdge(abs, 4, 5, 3));
  const ViewGraph g = ViewGraph::Build(10, edges);
  InitConfig c;
  c.s_init = 2;
  c.eps = LoopThresholds{{0.01, 0.02}};
  c.use_inlier_counts = true;
  const InitResult r = InitFull(g, c);
  CHECK(r.roots.size() == 1);
  CHECK(r.tree_edges.size() == 9);
  const auto tier = std::find_if(r.trace.begin(), r.trace.end(), [](const TraceEvent& e) {
    return e.kind == TraceKind::kTierAdvance;
  });
  REQUIRE(tier != r.trace.end());
  CHECK(tier->tier == 1);
  CHECK(tier->count == 0);
  for (auto it = r.trace.begin(); it != tier; ++it) {
    if (it->node >= 0) CHECK((it->node < 5) == (r.roots[0] < 5));
  }
  std::set<NodeId> after;
  for (auto it = tier; it != r.trace.end(); ++it) {
    if (it->node >= 0) after.insert(it->node);
  }
  CHECK(after.size() == 5);
  CheckForest(g, r);
  CheckResetDiscipline(r, c);
}

TEST_CASE("inlier tiers: missing counts are the lowest tier") {
  std::mt19937_64 rng(6);
  const auto abs = RandomRotations(rng, 3);
  const ViewGraph g = ViewGraph::Build(
      3, {ConsistentEdge(abs, 0, 1, 50), ConsistentEdge(abs, 1, 2)});
  InitConfig c = SingleEps(1, 0.1);
  c.use_inlier_counts = true;
  const InitResult r = InitFull(g, c);
  CHECK(r.roots.size() == 1);
  CHECK(std::count_if(r.trace.begin(), r.trace.end(), [](const TraceEvent& e) {
          return e.kind == TraceKind::kTierAdvance;
        }) == 1);
}

TEST_CASE("invariants on synthetic graphs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig sc;
    sc.n = 60;
    sc.p = 0.3;
    sc.q = 0.2;
    sc.seed = seed;
    const SynthDataset d = Generate(sc);
    InitConfig c;
    c.s_init = 6;
    c.eps = PickThresholds(SampleLoopErrors(d.graph));
    HierarchicalInitializer init(d.graph, c);
    while (!init.done()) {
      init.Step();
      const InitState& st = init.state();
      int members = 0;
      for (NodeId v = 0; v < d.graph.num_nodes(); ++v) {
        members += st.in_family[v];
        CHECK((st.join_index[v] >= 0) == (st.in_family[v] != 0));
      }
      CHECK(members == static_cast<int>(st.family.size()));
      CHECK(st.tree_edges.size() + st.roots.size() == st.family.size());
      CHECK(st.s >= 0);
      CHECK(st.s <= c.s_init);
      CHECK(st.eps_index >= 1);
      CHECK(st.eps_index <= c.eps.size());
    }
    const InitResult r = init.Result();
    CheckForest(d.graph, r);
    CheckResetDiscipline(r, c);
    CheckHierarchy(r);

    const InitResult again = InitFull(d.graph, c);
    CHECK(again.trace == r.trace);
    CHECK(again.tree_edges == r.tree_edges);
  }
}

TEST_CASE("stale SN rows still produce a valid forest") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const ViewGraph g = RandomGraph(rng, 30, 0.3, 0.05, 0.3);
    InitConfig c;
    c.s_init = 4;
    c.eps = LoopThresholds{{0.05, 0.1, 0.2}};
    c.sn_refresh = SnRefresh::kStale;
    const InitResult r = InitFull(g, c);
    CheckForest(g, r);
    CheckResetDiscipline(r, c);
  }
}

TEST_CASE("disconnected graph gets one root per component") {
  std::mt19937_64 rng(8);
  const auto abs = RandomRotations(rng, 7);
  const ViewGraph g = GraphFromPairs(abs, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  const InitResult r = InitFull(g, SingleEps(2, 0.1));
  CHECK(r.roots.size() == 3);
  CheckForest(g, r);
  const InitResult s = InitSimplified(g, SingleEps(2, 0.1));
  CHECK(s.trace == r.trace);
}

TEST_CASE("trace serialization") {
  std::ostringstream out;
  WriteTrace({{TraceKind::kRoot, 4, -1, 0, 10, 1, 0},
              {TraceKind::kAddBySupport, 3, 4, 12, 10, 1, 0},
              {TraceKind::kEpsAdvance, -1, -1, 0, 10, 2, 0},
              {TraceKind::kAddByVote, 7, 3, 2, 0, 1, 1}},
             out);
  const std::string s = out.str();
  CHECK(s.find("root node=4") != std::string::npos);
  CHECK(s.find("add-support node=3 parent=4 supports=12 s=10 eps=1 tier=0") !=
        std::string::npos);
  CHECK(s.find("eps-advance") != std::string::npos);
  CHECK(s.find("add-vote node=7 parent=3 votes=2") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}

TEST_CASE("config validation") {
  InitConfig c = SingleEps(0, 0.1);
  CHECK_THROWS_AS(c.Validate(), Error);
  c = SingleEps(2, 0.1);
  c.use_inlier_counts = true;
  c.inlier_tiers = {5, 6, 0};
  CHECK_THROWS_AS(c.Validate(), Error);
  c.inlier_tiers = {5, 1};
  CHECK_THROWS_AS(c.Validate(), Error);
  c.inlier_tiers = {5, 0};
  CHECK_NOTHROW(c.Validate());
  CHECK_THROWS_AS(InitSimplified(ViewGraph::Build(1, {}), InitConfig{.s_init = 2,
                                                                     .eps = {{0.1, 0.2}}}),
                  Error);
}

TEST_CASE("tree rarely uses outlier edges at 30% contamination") {
  std::vector<double> fractions;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SynthConfig sc;
    sc.n = 100;
    sc.p = 0.5;
    sc.q = 0.3;
    sc.sigma_deg = 5;
    sc.seed = seed;
    const SynthDataset d = Generate(sc);
    InitConfig c;
    c.eps = PickThresholds(SampleLoopErrors(d.graph));
    const InitResult r = InitFull(d.graph, c);
    int bad = 0;
    for (const TreeEdge& t : r.tree_edges) bad += d.outlier[t.edge] ? 1 : 0;
    fractions.push_back(static_cast<double>(bad) / r.tree_edges.size());
  }
  std::nth_element(fractions.begin(), fractions.begin() + 50, fractions.end());
  CHECK(fractions[50] <= 0.02);
}
