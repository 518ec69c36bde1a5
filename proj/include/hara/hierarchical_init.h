#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hara/rotation_averaging.h"
#include "hara/triplet.h"
#include "hara/view_graph.h"

namespace hara {

enum class InitMode { kSimplified, kFull };

// How the full initializer reads the SN table when choosing a base node.
//  kLazy:  the best row is recounted if any node joined the family since it
//          was stored; since stored counts can only overestimate, this picks
//          the same base as a fresh count over all family members.
//  kStale: stored rows are used as they are.
enum class SnRefresh { kLazy, kStale };

struct InitConfig {
  int s_init = 10;
  LoopThresholds eps;
  // Descending minimum inlier counts, last one 0.
  std::vector<int> inlier_tiers = {5, 0};
  bool use_inlier_counts = false;
  InitMode mode = InitMode::kFull;
  SnRefresh sn_refresh = SnRefresh::kLazy;
  SraConfig vote_averaging{100, 1e-7, true, 2.0, 0.35};

  void Validate() const;
};

enum class TraceKind {
  kRoot,
  kAddBySupport,
  kAddByVote,
  kSDecrement,
  kEpsAdvance,
  kTierAdvance,
};

// One initializer event. For additions, s / eps_index are the thresholds the
// node passed (s = 0 for votes) and count is its support or vote count. For
// threshold events they are the values after the change.
struct TraceEvent {
  TraceKind kind = TraceKind::kRoot;
  NodeId node = -1;
  NodeId parent = -1;
  int count = 0;
  int s = 0;
  int eps_index = 1;
  int tier = 0;

  bool operator==(const TraceEvent&) const = default;
};

std::string FormatTraceEvent(const TraceEvent& e);
void WriteTrace(const std::vector<TraceEvent>& trace, std::ostream& out);

struct TreeEdge {
  NodeId parent = -1;
  NodeId child = -1;
  EdgeId edge = -1;

  bool operator==(const TreeEdge&) const = default;
};

struct InitResult {
  std::vector<Rotation> rotations;  // one per node
  std::vector<TreeEdge> tree_edges;
  std::vector<NodeId> roots;
  std::vector<TraceEvent> trace;
};

// Winner of the voting fallback.
struct VoteOutcome {
  NodeId node = -1;
  NodeId parent = -1;
  EdgeId edge = -1;
  int votes = 0;
  Rotation rotation;
};

// Every family member votes for its non-family neighbors; the most voted node
// (ties: smallest id) takes the candidate rotation R_{w,f} R_f closest to the
// robust average of all candidates. nullopt when no family member has a
// non-family neighbor.
std::optional<VoteOutcome> AddByVote(const ViewGraph& g,
                                     const std::vector<std::uint8_t>& in_family,
                                     const std::vector<Rotation>& fixed,
                                     const SraConfig& averaging);

// Reference implementation with a single loop threshold (cfg.eps must hold
// exactly one value). Support counts are recomputed for every family member
// whenever a new base is needed.
InitResult InitSimplified(const ViewGraph& g, const InitConfig& cfg);

struct InitState {
  std::vector<std::uint8_t> in_family;
  std::vector<NodeId> family;       // in joining order
  std::vector<int> join_index;      // -1 until joined
  std::vector<NodeId> new_family;
  std::vector<Rotation> fixed;      // valid where in_family
  std::vector<TreeEdge> tree_edges;
  std::vector<NodeId> roots;
  int s = 0;
  int eps_index = 1;
  int tier = 0;
  SnTable sn;
  std::vector<TraceEvent> trace;
};

// Full initializer as an explicit state machine. Each Step() performs one
// propagation from a popped base, or one base selection (with the threshold
// schedule and the voting fallback when it runs out).
class HierarchicalInitializer {
 public:
  HierarchicalInitializer(const ViewGraph& g, InitConfig cfg);
  HierarchicalInitializer(const HierarchicalInitializer&) = delete;
  HierarchicalInitializer& operator=(const HierarchicalInitializer&) = delete;

  bool done() const {
    return static_cast<int>(state_.family.size()) == graph_.num_nodes();
  }
  void Step();
  InitResult Run();

  const InitState& state() const { return state_; }
  // Graph restricted to the current inlier tier.
  const ViewGraph& visible() const { return *visible_; }
  const InitConfig& config() const { return cfg_; }

  InitResult Result() const;

 private:
  void AddNode(NodeId node, NodeId parent, EdgeId edge, const Rotation& r);
  void StartRoot();
  NodeId PopBase();
  void Propagate(NodeId base);
  void SelectBase();
  NodeId ArgmaxRow();
  void Vote();
  void SetTier(int tier);

  const ViewGraph& graph_;
  InitConfig cfg_;
  ViewGraph tier_graph_;
  const ViewGraph* visible_ = nullptr;
  InitState state_;
};

InitResult InitFull(const ViewGraph& g, const InitConfig& cfg);

// Dispatches on cfg.mode.
InitResult Initialize(const ViewGraph& g, const InitConfig& cfg);

}  // namespace hara
