#include "anfj/dsg.hpp"

namespace anfj::abstract {

namespace {
const NodeSet kNoNodes;
const FrameSet kNoFrames;
}  // namespace

const NodeSet& IECG::eps_succ(NodeId n) const { return n < succ_.size() ? succ_[n] : kNoNodes; }
const NodeSet& IECG::eps_pred(NodeId n) const { return n < pred_.size() ? pred_[n] : kNoNodes; }
const FrameSet& IECG::top_frames(NodeId n) const { return n < tf_.size() ? tf_[n] : kNoFrames; }
const FrameSet& IECG::stack_frames(NodeId n) const { return n < psf_.size() ? psf_[n] : kNoFrames; }
const NodeSet& IECG::non_eps_preds(NodeId n) const { return n < nep_.size() ? nep_[n] : kNoNodes; }

const NodeSet& IECG::push_preds(NodeId n, const Frame& f) const {
  auto it = pfp_.find({n, f});
  return it == pfp_.end() ? kNoNodes : it->second;
}

NodeSet IECG::take_grown_tops() { return std::exchange(grownTops_, {}); }
NodeSet IECG::take_grown_stack_frames() { return std::exchange(grownPsf_, {}); }

bool IECG::operator==(const IECG& o) const {
  auto same_nodes = [](const std::vector<NodeSet>& a, const std::vector<NodeSet>& b) {
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i)
      if ((i < a.size() ? a[i] : kNoNodes) != (i < b.size() ? b[i] : kNoNodes)) return false;
    return true;
  };
  auto same_frames = [](const std::vector<FrameSet>& a, const std::vector<FrameSet>& b) {
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i)
      if ((i < a.size() ? a[i] : kNoFrames) != (i < b.size() ? b[i] : kNoFrames)) return false;
    return true;
  };
  return same_nodes(succ_, o.succ_) && same_nodes(pred_, o.pred_) &&
         same_nodes(nep_, o.nep_) && same_frames(tf_, o.tf_) && same_frames(psf_, o.psf_) &&
         pfp_ == o.pfp_;
}

void IECG::ensure(NodeId n) {
  if (n < succ_.size()) return;
  std::size_t sz = n + 1;
  succ_.resize(sz);
  pred_.resize(sz);
  nep_.resize(sz);
  psfDeps_.resize(sz);
  tf_.resize(sz);
  psf_.resize(sz);
}

void IECG::seed(NodeId n, const Frame& f) {
  ensure(n);
  work_.push_back({Fact::Kind::Tf, n, 0, f});
  drain();
}

void IECG::add_eps(NodeId s1, NodeId s2) {
  ensure(std::max(s1, s2));
  work_.push_back({Fact::Kind::Eps, s1, s2, {}});
  drain();
}

void IECG::add_push(NodeId s1, const Frame& g, NodeId s2) {
  ensure(std::max(s1, s2));
  NodeSet nexts = succ_[s2];
  nexts.insert(s2);
  for (NodeId x : nexts) {
    work_.push_back({Fact::Kind::Tf, x, 0, g});
    work_.push_back({Fact::Kind::Pfp, x, s1, g});
    nep_[x].insert(s1);
    work_.push_back({Fact::Kind::Dep, s1, x, {}});
  }
  drain();
}

void IECG::add_pop(NodeId s1, const Frame& g, NodeId s2) {
  ensure(std::max(s1, s2));
  pops_[{s1, g}].insert(s2);
  auto it = pfp_.find({s1, g});
  if (it != pfp_.end())
    for (NodeId p : it->second) work_.push_back({Fact::Kind::Summary, p, s2, {}});
  drain();
}

void IECG::drain() {
  while (!work_.empty()) {
    Fact f = std::move(work_.front());
    work_.pop_front();
    switch (f.kind) {
      case Fact::Kind::Tf: tf(f.a, f.f); break;
      case Fact::Kind::Pfp: pfp(f.a, f.f, f.b); break;
      case Fact::Kind::Psf: psf(f.a, f.f); break;
      case Fact::Kind::Dep: dep(f.a, f.b); break;
      case Fact::Kind::Summary:
        summaries_.insert({f.a, f.b});
        eps(f.a, f.b);
        break;
      case Fact::Kind::Eps: eps(f.a, f.b); break;
    }
  }
}

void IECG::tf(NodeId n, const Frame& f) {
  if (!tf_[n].insert(f).second) return;
  grownTops_.insert(n);
  work_.push_back({Fact::Kind::Psf, n, 0, f});
  for (NodeId m : succ_[n]) work_.push_back({Fact::Kind::Tf, m, 0, f});
}

void IECG::pfp(NodeId n, const Frame& f, NodeId p) {
  if (!pfp_[{n, f}].insert(p).second) return;
  for (NodeId m : succ_[n]) work_.push_back({Fact::Kind::Pfp, m, p, f});
  // Pop edges already leaving n with f now also return to p's context.
  auto it = pops_.find({n, f});
  if (it != pops_.end())
    for (NodeId t : it->second) work_.push_back({Fact::Kind::Summary, p, t, {}});
}

void IECG::psf(NodeId n, const Frame& f) {
  if (!psf_[n].insert(f).second) return;
  grownPsf_.insert(n);
  for (NodeId m : psfDeps_[n]) work_.push_back({Fact::Kind::Psf, m, 0, f});
}

void IECG::dep(NodeId from, NodeId to) {
  if (!psfDeps_[from].insert(to).second) return;
  for (const Frame& f : psf_[from]) work_.push_back({Fact::Kind::Psf, to, 0, f});
}

void IECG::eps(NodeId s1, NodeId s2) {
  NodeSet preds = pred_[s1];
  preds.insert(s1);
  NodeSet nexts = succ_[s2];
  nexts.insert(s2);
  for (NodeId p : preds) {
    for (NodeId n : nexts) {
      if (!succ_[p].insert(n).second) continue;
      pred_[n].insert(p);
      for (const Frame& f : tf_[p]) {
        work_.push_back({Fact::Kind::Tf, n, 0, f});
        auto it = pfp_.find({p, f});
        if (it != pfp_.end())
          for (NodeId q : it->second) work_.push_back({Fact::Kind::Pfp, n, q, f});
      }
      work_.push_back({Fact::Kind::Dep, p, n, {}});
    }
  }
}

IECG propagate(const IECG& g, NodeId s1, NodeId s2) {
  IECG out = g;
  out.add_eps(s1, s2);
  return out;
}

IECG process_push(const IECG& g, NodeId s1, const Frame& f, NodeId s2) {
  IECG out = g;
  out.add_push(s1, f, s2);
  return out;
}

IECG process_pop(const IECG& g, NodeId s1, const Frame& f, NodeId s2) {
  IECG out = g;
  out.add_pop(s1, f, s2);
  return out;
}

FrameSet update_psf(const IECG& g, NodeId s) {
  FrameSet out = g.stack_frames(s);
  const FrameSet& tf = g.top_frames(s);
  out.insert(tf.begin(), tf.end());
  auto absorb = [&](const NodeSet& from) {
    for (NodeId p : from) {
      const FrameSet& ps = g.stack_frames(p);
      out.insert(ps.begin(), ps.end());
    }
  };
  absorb(g.non_eps_preds(s));
  absorb(g.eps_pred(s));
  return out;
}

}  // namespace anfj::abstract
