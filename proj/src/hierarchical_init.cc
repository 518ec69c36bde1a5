#include "hara/hierarchical_init.h"

#include <algorithm>
#include <sstream>

#include "hara/error.h"

namespace hara {
namespace {

const char* KindName(TraceKind k) {
  switch (k) {
    case TraceKind::kRoot: return "root";
    case TraceKind::kAddBySupport: return "add-support";
    case TraceKind::kAddByVote: return "add-vote";
    case TraceKind::kSDecrement: return "s-decrement";
    case TraceKind::kEpsAdvance: return "eps-advance";
    case TraceKind::kTierAdvance: return "tier-advance";
  }
  return "?";
}

// Node with the most neighbors among those accepted by `eligible`; ties go to
// the smallest id.
template <typename Pred>
NodeId MostConnected(const ViewGraph& g, Pred eligible) {
  NodeId best = -1;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!eligible(v)) continue;
    if (best < 0 || g.degree(v) > g.degree(best)) best = v;
  }
  return best;
}

// Removes and returns the member of `pool` with the most neighbors.
NodeId PopMostConnected(const ViewGraph& g, std::vector<NodeId>& pool) {
  auto best = pool.begin();
  for (auto it = pool.begin(); it != pool.end(); ++it) {
    if (g.degree(*it) > g.degree(*best) ||
        (g.degree(*it) == g.degree(*best) && *it < *best)) {
      best = it;
    }
  }
  const NodeId v = *best;
  pool.erase(best);
  return v;
}

}  // namespace

void InitConfig::Validate() const {
  if (s_init < 1) throw Error(ErrorCode::kInvalidConfig, "s_init must be >= 1");
  eps.Validate();
  if (use_inlier_counts) {
    if (inlier_tiers.empty() || inlier_tiers.back() != 0) {
      throw Error(ErrorCode::kInvalidConfig, "inlier tiers must end with 0");
    }
    for (std::size_t k = 1; k < inlier_tiers.size(); ++k) {
      if (!(inlier_tiers[k] < inlier_tiers[k - 1])) {
        throw Error(ErrorCode::kInvalidConfig,
                    "inlier tiers must be strictly descending");
      }
    }
  }
}

std::string FormatTraceEvent(const TraceEvent& e) {
  std::ostringstream os;
  os << KindName(e.kind);
  switch (e.kind) {
    case TraceKind::kRoot:
      os << " node=" << e.node;
      break;
    case TraceKind::kAddBySupport:
      os << " node=" << e.node << " parent=" << e.parent
         << " supports=" << e.count;
      break;
    case TraceKind::kAddByVote:
      os << " node=" << e.node << " parent=" << e.parent
         << " votes=" << e.count;
      break;
    default:
      break;
  }
  os << " s=" << e.s << " eps=" << e.eps_index << " tier=" << e.tier;
  return os.str();
}

void WriteTrace(const std::vector<TraceEvent>& trace, std::ostream& out) {
  for (const TraceEvent& e : trace) out << FormatTraceEvent(e) << '\n';
}

std::optional<VoteOutcome> AddByVote(const ViewGraph& g,
                                     const std::vector<std::uint8_t>& in_family,
                                     const std::vector<Rotation>& fixed,
                                     const SraConfig& averaging) {
  NodeId winner = -1;
  int best_votes = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (in_family[v]) continue;
    int votes = 0;
    for (NodeId f : g.neighbors(v)) votes += in_family[f] ? 1 : 0;
    if (votes > best_votes) {
      best_votes = votes;
      winner = v;
    }
  }
  if (winner < 0) return std::nullopt;

  std::vector<Rotation> candidates;
  std::vector<NodeId> voters;
  std::vector<EdgeId> via;
  const auto nb = g.neighbors(winner);
  const auto ie = g.incident_edges(winner);
  for (std::size_t p = 0; p < nb.size(); ++p) {
    if (!in_family[nb[p]]) continue;
    voters.push_back(nb[p]);
    via.push_back(ie[p]);
    candidates.push_back(g.Oriented(ie[p], winner) * fixed[nb[p]]);
  }

  std::size_t pick = 0;
  if (candidates.size() > 1) {
    const Rotation average = GeodesicL1Mean(candidates, averaging);
    double best = AngularDistance(candidates[0], average);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      const double d = AngularDistance(candidates[c], average);
      if (d < best) {
        best = d;
        pick = c;
      }
    }
  }
  return VoteOutcome{winner, voters[pick], via[pick], best_votes,
                     candidates[pick]};
}

// ---------------------------------------------------------------------------
// Simplified initializer.

InitResult InitSimplified(const ViewGraph& g, const InitConfig& cfg) {
  cfg.Validate();
  if (cfg.eps.size() != 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "the simplified initializer takes exactly one loop threshold");
  }
  const double eps = cfg.eps.eps[0];
  const int n = g.num_nodes();
  InitResult out;
  out.rotations.assign(n, Rotation::Identity());
  if (n == 0) return out;

  std::vector<std::uint8_t> in_family(n, 0);
  std::vector<NodeId> new_family;
  int family_size = 0;
  int s = cfg.s_init;

  auto add = [&](NodeId v, NodeId parent, EdgeId e, const Rotation& r) {
    in_family[v] = 1;
    ++family_size;
    out.rotations[v] = r;
    if (parent >= 0) out.tree_edges.push_back({parent, v, e});
    new_family.push_back(v);
  };
  auto start_root = [&] {
    const NodeId root = MostConnected(g, [&](NodeId v) { return !in_family[v]; });
    add(root, -1, -1, Rotation::Identity());
    out.roots.push_back(root);
    out.trace.push_back({TraceKind::kRoot, root, -1, 0, s, 1, 0});
  };
  // Non-family neighbors of x with at least s supports.
  auto qualifying = [&](NodeId x, int s_min) {
    std::vector<std::pair<NodeId, int>> q;
    for (NodeId c : g.neighbors(x)) {
      if (in_family[c]) continue;
      const int sup = CountTripletSupports(g, x, c, eps);
      if (sup >= s_min) q.emplace_back(c, sup);
    }
    return q;
  };

  start_root();
  while (family_size < n) {
    while (!new_family.empty()) {
      const NodeId base = PopMostConnected(g, new_family);
      const auto q = qualifying(base, s);
      for (const auto& [c, sup] : q) {
        const EdgeId e = *g.FindEdge(base, c);
        add(c, base, e, g.Oriented(e, c) * out.rotations[base]);
        out.trace.push_back({TraceKind::kAddBySupport, c, base, sup, s, 1, 0});
      }
      if (!q.empty()) s = cfg.s_init;
    }
    if (family_size == n) break;

    NodeId best = -1;
    std::size_t best_count = 0;
    for (NodeId x = 0; x < n; ++x) {
      if (!in_family[x]) continue;
      const std::size_t count = qualifying(x, s).size();
      if (count > best_count) {
        best_count = count;
        best = x;
      }
    }
    if (best_count >= 1) {
      new_family.push_back(best);
    } else {
      --s;
      out.trace.push_back({TraceKind::kSDecrement, -1, -1, 0, s, 1, 0});
    }

    if (s == 0) {
      const auto vote = AddByVote(g, in_family, out.rotations, cfg.vote_averaging);
      s = cfg.s_init;
      if (vote) {
        add(vote->node, vote->parent, vote->edge, vote->rotation);
        out.trace.push_back(
            {TraceKind::kAddByVote, vote->node, vote->parent, vote->votes, 0, 1, 0});
      } else {
        start_root();
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full initializer.

HierarchicalInitializer::HierarchicalInitializer(const ViewGraph& g,
                                                 InitConfig cfg)
    : graph_(g), cfg_(std::move(cfg)) {
  cfg_.Validate();
  if (!cfg_.use_inlier_counts) cfg_.inlier_tiers = {0};
  const int n = g.num_nodes();
  state_.in_family.assign(n, 0);
  state_.join_index.assign(n, -1);
  state_.fixed.assign(n, Rotation::Identity());
  state_.s = cfg_.s_init;
  state_.eps_index = 1;
  state_.sn = SnTable(n, cfg_.eps.size(), cfg_.s_init);
  SetTier(0);
  if (n > 0) StartRoot();
}

void HierarchicalInitializer::SetTier(int tier) {
  state_.tier = tier;
  if (cfg_.use_inlier_counts) {
    tier_graph_ = graph_.WithMinInliers(cfg_.inlier_tiers[tier]);
    visible_ = &tier_graph_;
  } else {
    visible_ = &graph_;
  }
}

void HierarchicalInitializer::AddNode(NodeId node, NodeId parent, EdgeId edge,
                                      const Rotation& r) {
  state_.in_family[node] = 1;
  state_.join_index[node] = static_cast<int>(state_.family.size());
  state_.family.push_back(node);
  state_.fixed[node] = r;
  state_.new_family.push_back(node);
  if (parent >= 0) {
    // Report the edge id of the input graph, not of the tier view.
    const EdgeId input_edge =
        visible_ == &graph_ ? edge : *graph_.FindEdge(parent, node);
    state_.tree_edges.push_back({parent, node, input_edge});
  }
}

void HierarchicalInitializer::StartRoot() {
  const ViewGraph& g = *visible_;
  const NodeId root =
      MostConnected(g, [&](NodeId v) { return !state_.in_family[v]; });
  AddNode(root, -1, -1, Rotation::Identity());
  state_.roots.push_back(root);
  state_.trace.push_back({TraceKind::kRoot, root, -1, 0, state_.s,
                          state_.eps_index, state_.tier});
}

NodeId HierarchicalInitializer::PopBase() {
  return PopMostConnected(*visible_, state_.new_family);
}

void HierarchicalInitializer::Propagate(NodeId base) {
  const ViewGraph& g = *visible_;
  auto cands = SupportsOfNonFamily(g, state_.in_family, base, cfg_.eps);
  const int y = state_.eps_index - 1;
  bool added = false;
  for (const auto& c : cands) {
    if (c.supports[y] < state_.s) continue;
    AddNode(c.node, base, c.edge, g.Oriented(c.edge, c.node) * state_.fixed[base]);
    state_.trace.push_back({TraceKind::kAddBySupport, c.node, base,
                            c.supports[y], state_.s, state_.eps_index,
                            state_.tier});
    added = true;
  }
  // Row for the base after the additions above.
  state_.sn.UpdateRow(g, state_.in_family, base, cfg_.eps,
                      static_cast<int>(state_.family.size()));
  if (added) {
    state_.s = cfg_.s_init;
    state_.eps_index = 1;
  }
}

NodeId HierarchicalInitializer::ArgmaxRow() {
  const ViewGraph& g = *visible_;
  const int family_size = static_cast<int>(state_.family.size());
  const int y = state_.eps_index;
  const int z = state_.s;
  const bool lazy = cfg_.sn_refresh == SnRefresh::kLazy;
  if (lazy) {
    // Rows never computed under the current tier carry no bound; count them.
    for (NodeId x : state_.family) {
      if (!state_.sn.row_valid(x)) {
        state_.sn.UpdateRow(g, state_.in_family, x, cfg_.eps, family_size);
      }
    }
  }
  while (true) {
    NodeId best = -1;
    int best_count = -1;
    for (NodeId x = 0; x < g.num_nodes(); ++x) {
      if (!state_.in_family[x]) continue;
      const int c = state_.sn.row_valid(x) ? state_.sn.at(x, y, z) : 0;
      if (c > best_count) {
        best_count = c;
        best = x;
      }
    }
    if (!lazy || state_.sn.row_stamp(best) == family_size) return best;
    state_.sn.UpdateRow(g, state_.in_family, best, cfg_.eps, family_size);
  }
}

void HierarchicalInitializer::SelectBase() {
  const NodeId base = ArgmaxRow();
  const int count = state_.sn.row_valid(base)
                        ? state_.sn.at(base, state_.eps_index, state_.s)
                        : 0;
  if (count >= 1) {
    state_.new_family.push_back(base);
  } else if (state_.eps_index < cfg_.eps.size()) {
    ++state_.eps_index;
    state_.trace.push_back({TraceKind::kEpsAdvance, -1, -1, 0, state_.s,
                            state_.eps_index, state_.tier});
  } else {
    --state_.s;
    state_.eps_index = 1;
    state_.trace.push_back({TraceKind::kSDecrement, -1, -1, 0, state_.s,
                            state_.eps_index, state_.tier});
  }
  if (state_.s == 0) Vote();
}

void HierarchicalInitializer::Vote() {
  const auto vote = AddByVote(*visible_, state_.in_family, state_.fixed,
                              cfg_.vote_averaging);
  state_.s = cfg_.s_init;
  state_.eps_index = 1;
  if (vote) {
    AddNode(vote->node, vote->parent, vote->edge, vote->rotation);
    state_.trace.push_back({TraceKind::kAddByVote, vote->node, vote->parent,
                            vote->votes, 0, 1, state_.tier});
    return;
  }
  if (state_.tier + 1 < static_cast<int>(cfg_.inlier_tiers.size())) {
    SetTier(state_.tier + 1);
    state_.sn.Reset();
    state_.trace.push_back({TraceKind::kTierAdvance, -1, -1,
                            cfg_.inlier_tiers[state_.tier], state_.s,
                            state_.eps_index, state_.tier});
    return;
  }
  // Nothing reachable from the family: the graph has another component.
  StartRoot();
}

void HierarchicalInitializer::Step() {
  if (done() && state_.new_family.empty()) return;
  if (!state_.new_family.empty()) {
    Propagate(PopBase());
    return;
  }
  SelectBase();
}

InitResult HierarchicalInitializer::Run() {
  while (!done() || !state_.new_family.empty()) Step();
  return Result();
}

InitResult HierarchicalInitializer::Result() const {
  InitResult r;
  r.rotations = state_.fixed;
  r.tree_edges = state_.tree_edges;
  r.roots = state_.roots;
  r.trace = state_.trace;
  return r;
}

InitResult InitFull(const ViewGraph& g, const InitConfig& cfg) {
  return HierarchicalInitializer(g, cfg).Run();
}

InitResult Initialize(const ViewGraph& g, const InitConfig& cfg) {
  return cfg.mode == InitMode::kSimplified ? InitSimplified(g, cfg)
                                           : InitFull(g, cfg);
}

}  // namespace hara
