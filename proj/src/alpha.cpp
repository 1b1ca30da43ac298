#include "anfj/alpha.hpp"

namespace anfj::abstract {

Pointer alpha(const concrete::Pointer& p, const Policy& policy) {
  auto k = static_cast<std::size_t>(std::max(policy.k, 0));
  return Pointer{p.site, concrete::last_labels(p.time, k),
                 policy.objSensitivity ? p.recvSite : kNoLabel};
}

Value alpha(const concrete::Value& v, const Policy& policy) {
  return Value{v.cls, alpha(v.op, policy)};
}

Addr alpha(const concrete::Addr& a, const Policy& policy) {
  return Addr{a.base, alpha(a.ptr, policy)};
}

Frame alpha(const concrete::KontNode& k, const Policy& policy) {
  if (auto* f = std::get_if<concrete::FunFrame>(&k.frame))
    return CallFrame{f->var, f->ret, alpha(f->fp, policy)};
  const auto& h = std::get<concrete::HandleFrame>(k.frame);
  return HandlerFrame{h.cls, h.var, h.handler, alpha(h.fp, policy)};
}

ControlState alpha(const concrete::State& s, const Policy& policy) {
  auto k = static_cast<std::size_t>(std::max(policy.k, 0));
  return ControlState{s.stmt, alpha(s.fp, policy), concrete::last_labels(s.time, k)};
}

Store alpha(const concrete::Store& s, const Policy& policy) {
  Store out;
  for (const auto& [a, v] : s) out[alpha(a, policy)].insert(alpha(v, policy));
  return out;
}

StackAction alpha_action(const concrete::State& a, const concrete::State& b,
                         const Policy& policy) {
  std::size_t da = concrete::kont_depth(a.kont);
  std::size_t db = concrete::kont_depth(b.kont);
  if (db == da + 1) return StackAction::push(alpha(*b.kont, policy));
  if (da == db + 1) return StackAction::pop(alpha(*a.kont, policy));
  return StackAction::eps();
}

}  // namespace anfj::abstract
