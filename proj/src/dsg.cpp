#include "anfj/dsg.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "anfj/errors.hpp"
#include "anfj/gc.hpp"

namespace anfj::abstract {

std::vector<Successor> step(const LabeledProgram& lp, const ControlState& q,
                            const Frame& top, const FrameSet& psf, const Store& store,
                            const Policy& policy) {
  if (!policy.gc) return next(lp, q, store, top, policy);
  return next(lp, q, eagc(q, store, psf, lp, policy), top, policy);
}

std::vector<std::pair<StackAction, ControlState>> step_ipds(
    const LabeledProgram& lp, const ControlState& q, const Frame& top,
    const FrameSet& psf, const Store& store, const Policy& policy) {
  std::vector<std::pair<StackAction, ControlState>> out;
  for (auto& s : step(lp, q, top, psf, store, policy)) out.emplace_back(s.action, s.state);
  return out;
}

std::vector<const DsgEdge*> DSG::out_edges(NodeId n) const {
  std::vector<const DsgEdge*> out;
  auto lo = std::lower_bound(edges.begin(), edges.end(), n,
                             [](const DsgEdge& e, NodeId id) { return e.from < id; });
  for (auto it = lo; it != edges.end() && it->from == n; ++it) out.push_back(&*it);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

class Engine {
 public:
  Engine(const LabeledProgram& lp, const Policy& p)
      : lp_(lp), p_(p), finite_(p.mode == Mode::Finite), start_(Clock::now()) {}

  DSG run() {
    ControlState q0{lp_.entry().entry, initial_fp(), {}};
    std::optional<Context> c0;
    if (finite_) c0 = Context{lp_.entry().id, initial_fp()};
    NodeId n0 = intern(q0, Store{}, c0);
    if (finite_)
      add_ctx_frame(*c0, Bottom{});
    else
      iecg_.seed(n0, Bottom{});
    collect_growth();

    std::size_t iter = 0;
    while (!queue_.empty()) {
      if ((++iter & 255) == 0) check_time();
      NodeId n = queue_.front();
      queue_.pop_front();
      queued_[n] = false;
      process(n);
    }
    return finish(n0);
  }

 private:
  struct Rec {
    ControlState q;
    Store store;
    std::optional<Context> ctx;
    FrameSet steppedTops;
    std::size_t steppedPsf = 0;
    bool dirty = true;
  };
  using Key = std::tuple<ControlState, std::optional<Context>, Store>;

  void check_time() {
    double s = std::chrono::duration<double>(Clock::now() - start_).count();
    if (s > p_.budgetSeconds)
      throw BudgetExceeded("time budget of " + std::to_string(p_.budgetSeconds) +
                           " s exceeded");
  }

  void enqueue(NodeId n) {
    if (queued_[n]) return;
    queued_[n] = true;
    queue_.push_back(n);
  }

  NodeId intern(const ControlState& q, const Store& s, const std::optional<Context>& ctx) {
    bool perState = p_.storeMode == StoreMode::PerState;
    Key key{q, ctx, perState ? s : Store{}};
    auto [it, fresh] = index_.try_emplace(std::move(key), static_cast<NodeId>(recs_.size()));
    if (fresh) {
      if (recs_.size() >= p_.budgetNodes)
        throw BudgetExceeded("node budget of " + std::to_string(p_.budgetNodes) + " exceeded");
      recs_.push_back(Rec{q, s, ctx, {}, 0, true});
      queued_.push_back(false);
      if (ctx) byCtx_[*ctx].push_back(it->second);
      enqueue(it->second);
    } else if (!perState && join_into(recs_[it->second].store, s)) {
      recs_[it->second].dirty = true;
      enqueue(it->second);
    }
    return it->second;
  }

  // Finite mode: frames that may be on top while running in ctx.
  void add_ctx_frame(const Context& c, const Frame& f) {
    if (!ctxTops_[c].insert(f).second) return;
    if (p_.gc) {
      for (NodeId n = 0; n < recs_.size(); ++n) enqueue(n);
    } else {
      for (NodeId n : byCtx_[c]) enqueue(n);
    }
  }

  FrameSet ctx_stack(const Context& c) const {
    FrameSet out;
    std::set<Context> seen;
    std::vector<Context> work{c};
    while (!work.empty()) {
      Context cur = work.back();
      work.pop_back();
      if (!seen.insert(cur).second) continue;
      auto it = ctxTops_.find(cur);
      if (it == ctxTops_.end()) continue;
      for (const Frame& f : it->second) {
        out.insert(f);
        if (auto* cf = std::get_if<CallFrame>(&f))
          work.push_back(Context{lp_.stmt(cf->ret).method, cf->fp});
      }
    }
    return out;
  }

  FrameSet tops_of(NodeId n) const {
    if (!finite_) return iecg_.top_frames(n);
    auto it = ctxTops_.find(*recs_[n].ctx);
    return it == ctxTops_.end() ? FrameSet{} : it->second;
  }

  FrameSet stack_of(NodeId n) const {
    return finite_ ? ctx_stack(*recs_[n].ctx) : iecg_.stack_frames(n);
  }

  void process(NodeId n) {
    FrameSet tops = tops_of(n);
    FrameSet psf = stack_of(n);
    bool full = recs_[n].dirty || (p_.gc && psf.size() != recs_[n].steppedPsf);
    Store store = p_.gc ? eagc(recs_[n].q, recs_[n].store, psf, lp_, p_) : recs_[n].store;
    ControlState q = recs_[n].q;
    std::optional<Context> ctx = recs_[n].ctx;
    recs_[n].dirty = false;
    recs_[n].steppedPsf = psf.size();
    for (const Frame& top : tops) {
      if (!full && recs_[n].steppedTops.count(top)) continue;
      recs_[n].steppedTops.insert(top);
      for (Successor& s : next(lp_, q, store, top, p_, &notes_)) {
        std::optional<Context> c2 = ctx;
        if (finite_) c2 = ctx_after(*ctx, s);
        NodeId m = intern(s.state, s.store, c2);
        add_edge(n, s.action, m, c2);
      }
    }
  }

  Context ctx_after(const Context& c, const Successor& s) const {
    if (s.action.kind == StackAction::Kind::Push) {
      if (std::holds_alternative<CallFrame>(s.action.frame))
        return Context{lp_.stmt(s.state.stmt).method, s.state.fp};
      return c;
    }
    if (s.action.kind == StackAction::Kind::Pop) {
      if (auto* cf = std::get_if<CallFrame>(&s.action.frame))
        return Context{lp_.stmt(cf->ret).method, cf->fp};
    }
    return c;
  }

  void add_edge(NodeId from, const StackAction& a, NodeId to, const std::optional<Context>& c2) {
    if (!edges_.insert(DsgEdge{from, a, to, false}).second) return;
    if (edges_.size() > p_.budgetEdges)
      throw BudgetExceeded("edge budget of " + std::to_string(p_.budgetEdges) + " exceeded");
    if (finite_) {
      if (a.kind == StackAction::Kind::Push) add_ctx_frame(*c2, a.frame);
      return;
    }
    switch (a.kind) {
      case StackAction::Kind::Epsilon: iecg_.add_eps(from, to); break;
      case StackAction::Kind::Push: iecg_.add_push(from, a.frame, to); break;
      case StackAction::Kind::Pop: iecg_.add_pop(from, a.frame, to); break;
    }
    collect_growth();
  }

  void collect_growth() {
    if (finite_) return;
    for (NodeId n : iecg_.take_grown_tops()) enqueue(n);
    NodeSet psf = iecg_.take_grown_stack_frames();
    if (p_.gc)
      for (NodeId n : psf) enqueue(n);
  }

  DSG finish(NodeId n0) {
    DSG g;
    g.policy = p_;
    std::vector<NodeId> order(recs_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
      const Rec& x = recs_[a];
      const Rec& y = recs_[b];
      return std::tie(x.q.stmt, x.q.fp, x.q.time, x.ctx, x.store) <
             std::tie(y.q.stmt, y.q.fp, y.q.time, y.ctx, y.store);
    });
    std::vector<NodeId> rename(recs_.size());
    for (NodeId i = 0; i < order.size(); ++i) rename[order[i]] = i;

    for (NodeId old : order) {
      const Rec& r = recs_[old];
      FrameSet psf = stack_of(old);
      Store s = p_.gc ? eagc(r.q, r.store, psf, lp_, p_) : r.store;
      g.nodes.push_back(DsgNode{r.q, std::move(s), r.ctx});
      g.topFrames.push_back(tops_of(old));
      g.stackFrames.push_back(std::move(psf));
      if (!finite_) {
        NodeSet succ;
        for (NodeId m : iecg_.eps_succ(old)) succ.insert(rename[m]);
        g.epsSucc.push_back(std::move(succ));
      }
    }
    g.initial = rename[n0];

    std::set<DsgEdge> edges;
    for (const DsgEdge& e : edges_) {
      DsgEdge r = e;
      r.from = rename[e.from];
      r.to = rename[e.to];
      edges.insert(r);
    }
    for (auto [a, b] : iecg_.summaries())
      edges.insert(DsgEdge{rename[a], StackAction::eps(), rename[b], true});
    g.edges.assign(edges.begin(), edges.end());

    for (const DsgEdge& e : g.edges) g.edgeTops.push_back(tops_after(g, e, order));
    g.notes = std::move(notes_);
    std::sort(g.notes.begin(), g.notes.end());
    g.notes.erase(std::unique(g.notes.begin(), g.notes.end()), g.notes.end());
    g.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return g;
  }

  FrameSet tops_after(const DSG& g, const DsgEdge& e, const std::vector<NodeId>& order) const {
    if (finite_) return g.topFrames[e.to];
    switch (e.action.kind) {
      case StackAction::Kind::Epsilon: return g.topFrames[e.from];
      case StackAction::Kind::Push: return FrameSet{e.action.frame};
      case StackAction::Kind::Pop: break;
    }
    FrameSet out;
    for (NodeId p : iecg_.push_preds(order[e.from], e.action.frame)) {
      const FrameSet& t = iecg_.top_frames(p);
      out.insert(t.begin(), t.end());
    }
    return out;
  }

  const LabeledProgram& lp_;
  const Policy& p_;
  bool finite_;
  Clock::time_point start_;
  std::vector<Rec> recs_;
  std::map<Key, NodeId> index_;
  std::vector<bool> queued_;
  std::deque<NodeId> queue_;
  std::set<DsgEdge> edges_;
  IECG iecg_;
  std::map<Context, FrameSet> ctxTops_;
  std::map<Context, std::vector<NodeId>> byCtx_;
  std::vector<std::string> notes_;
};

}  // namespace

DSG analyze(const LabeledProgram& lp, const Policy& policy) {
  if (policy.k < 0) throw std::invalid_argument("k must be non-negative");
  return Engine(lp, policy).run();
}

}  // namespace anfj::abstract
