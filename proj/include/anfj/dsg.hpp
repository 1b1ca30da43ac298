#pragma once

// Dyck state graph synthesis: worklist fixpoint over `next` with
// epsilon-summary maintenance through the six-map IECG.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anfj/abstract.hpp"

namespace anfj::abstract {

using NodeId = std::uint32_t;
using NodeSet = std::set<NodeId>;
using FrameSet = std::set<Frame>;

/// epsilon predecessors/successors (kept transitively closed), top frames,
/// possible stack frames, push predecessors and non-epsilon predecessors.
///
/// The mutators apply one edge and then run every consequence to a
/// fixpoint. Unlike the one-shot algorithm steps they also handle facts
/// that arrive later: a new push predecessor at a node re-fires the pop
/// edges already leaving it, and PSF growth flows to every dependent node.
class IECG {
 public:
  const NodeSet& eps_succ(NodeId n) const;
  const NodeSet& eps_pred(NodeId n) const;
  const FrameSet& top_frames(NodeId n) const;
  const FrameSet& stack_frames(NodeId n) const;
  const NodeSet& push_preds(NodeId n, const Frame& f) const;
  const NodeSet& non_eps_preds(NodeId n) const;
  std::size_t size() const { return succ_.size(); }

  /// Summary epsilon edges created from pop edges, as (from, to).
  const std::set<std::pair<NodeId, NodeId>>& summaries() const { return summaries_; }

  void seed(NodeId n, const Frame& f);
  void add_eps(NodeId s1, NodeId s2);
  void add_push(NodeId s1, const Frame& g, NodeId s2);
  void add_pop(NodeId s1, const Frame& g, NodeId s2);

  /// Nodes whose TF or PSF grew since the last call.
  NodeSet take_grown_tops();
  NodeSet take_grown_stack_frames();

  bool operator==(const IECG& o) const;

 private:
  struct Fact {
    enum class Kind { Tf, Pfp, Psf, Dep, Eps, Summary } kind;
    NodeId a = 0, b = 0;
    Frame f;
  };
  void ensure(NodeId n);
  void drain();
  void tf(NodeId n, const Frame& f);
  void pfp(NodeId n, const Frame& f, NodeId p);
  void psf(NodeId n, const Frame& f);
  void dep(NodeId from, NodeId to);
  void eps(NodeId s1, NodeId s2);

  std::vector<NodeSet> succ_, pred_, nep_, psfDeps_;
  std::vector<FrameSet> tf_, psf_;
  std::map<std::pair<NodeId, Frame>, NodeSet> pfp_, pops_;
  std::set<std::pair<NodeId, NodeId>> summaries_;
  NodeSet grownTops_, grownPsf_;
  std::deque<Fact> work_;
};

/// Functional forms of the four summary operations.
IECG propagate(const IECG& g, NodeId s1, NodeId s2);
IECG process_push(const IECG& g, NodeId s1, const Frame& f, NodeId s2);
IECG process_pop(const IECG& g, NodeId s1, const Frame& f, NodeId s2);
/// PSF(s) joined with TF(s) and the PSF of every node in NEP(s) and G<-(s).
FrameSet update_psf(const IECG& g, NodeId s);

/// Finite-baseline context: the method being executed and its frame pointer.
struct Context {
  MethodId method = 0;
  Pointer fp;
  auto operator<=>(const Context&) const = default;
};

struct DsgNode {
  ControlState state;
  Store store;  // collected with the final stack summary when gc is on
  std::optional<Context> ctx;
  bool operator==(const DsgNode&) const = default;
};

struct DsgEdge {
  NodeId from = 0;
  StackAction action;
  NodeId to = 0;
  bool summary = false;  // inserted epsilon summary, not a transition
  auto operator<=>(const DsgEdge&) const = default;
};

struct DSG {
  Policy policy;
  std::vector<DsgNode> nodes;  // sorted by (label, fp, time)
  std::vector<DsgEdge> edges;  // sorted
  NodeId initial = 0;
  // Per node: frames possibly on top / anywhere on the stack.
  std::vector<FrameSet> topFrames, stackFrames;
  // Pushdown only: epsilon closure (net-empty paths).
  std::vector<NodeSet> epsSucc;
  // Per edge: frames that may be on top right after taking it.
  std::vector<FrameSet> edgeTops;
  std::vector<std::string> notes;
  double seconds = 0;

  std::vector<const DsgEdge*> out_edges(NodeId n) const;
};

/// Runs the fixpoint from the entry state. Throws BudgetExceeded.
DSG analyze(const LabeledProgram& lp, const Policy& policy);

/// eagc (when enabled) followed by `next` for one top frame.
std::vector<Successor> step(const LabeledProgram& lp, const ControlState& q,
                            const Frame& top, const FrameSet& psf, const Store& store,
                            const Policy& policy);
std::vector<std::pair<StackAction, ControlState>> step_ipds(
    const LabeledProgram& lp, const ControlState& q, const Frame& top,
    const FrameSet& psf, const Store& store, const Policy& policy);

}  // namespace anfj::abstract
