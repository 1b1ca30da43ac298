#include "anfj/gc.hpp"

#include <vector>

namespace anfj::abstract {

AddrSet stack_root(const std::set<Frame>& frames, const Store& store) {
  std::set<Pointer> fps;
  for (const Frame& f : frames)
    if (auto* c = std::get_if<CallFrame>(&f)) fps.insert(c->fp);
  AddrSet out;
  for (const auto& [a, vs] : store)
    if (!vs.empty() && fps.count(a.ptr)) out.insert(a);
  return out;
}

AddrSet root(const ControlState& q, const Store& store, const std::set<Frame>& frames,
             const LabeledProgram& lp, const Policy& policy) {
  AddrSet out = stack_root(frames, store);
  auto add_vars = [&](const Pointer& fp, const std::set<Symbol>* only) {
    for (auto it = store.lower_bound(Addr{Symbol{0}, fp});
         it != store.end() && it->first.ptr == fp; ++it)
      if (!it->second.empty() && (!only || only->count(it->first.base)))
        out.insert(it->first);
  };
  add_vars(q.fp, policy.liveness ? &lp.lives(q.stmt) : nullptr);
  for (const Frame& f : frames)
    if (auto* h = std::get_if<HandlerFrame>(&f))
      add_vars(h->fp, policy.liveness ? &lp.lives(h->handler) : nullptr);
  return out;
}

AddrSet reachable(const AddrSet& roots, const Store& store) {
  AddrSet seen;
  std::vector<Addr> work;
  for (const Addr& a : roots)
    if (store.count(a) && seen.insert(a).second) work.push_back(a);
  std::set<Pointer> expanded;
  while (!work.empty()) {
    Addr a = work.back();
    work.pop_back();
    for (const Value& v : lookup(store, a)) {
      if (!expanded.insert(v.op).second) continue;
      // Every field address of the object, i.e. every binding at its pointer.
      auto lo = store.lower_bound(Addr{Symbol{0}, v.op});
      for (auto it = lo; it != store.end() && it->first.ptr == v.op; ++it)
        if (seen.insert(it->first).second) work.push_back(it->first);
    }
  }
  return seen;
}

Store eagc(const ControlState& q, const Store& store, const std::set<Frame>& frames,
           const LabeledProgram& lp, const Policy& policy) {
  if (!policy.gc) return store;
  AddrSet keep = reachable(root(q, store, frames, lp, policy), store);
  Store out;
  for (const Addr& a : keep) out.emplace(a, store.at(a));
  return out;
}

}  // namespace anfj::abstract
