#include "anfj/metrics.hpp"

#include <map>

namespace anfj::metrics {

using abstract::Frame;
using abstract::NodeId;
using abstract::StackAction;

abstract::Store points_to(const DSG& g) {
  abstract::Store out;
  for (const auto& n : g.nodes) abstract::join_into(out, n.store);
  return out;
}

std::set<Symbol> exception_classes(const LabeledProgram& lp, const DSG& g) {
  std::set<Symbol> out;
  for (const auto& n : g.nodes) {
    const Stmt& st = lp.stmt(n.state.stmt);
    auto* t = std::get_if<syn::Throw>(&st.kind);
    if (!t) continue;
    for (const auto& v : abstract::lookup(n.store, abstract::Addr{t->var, n.state.fp}))
      out.insert(v.cls);
  }
  return out;
}

namespace {

std::optional<double> mean_count(const LabeledProgram& lp, const DSG& g, bool exceptions) {
  std::set<Symbol> exn = exception_classes(lp, g);
  std::size_t addrs = 0, total = 0;
  for (const auto& [a, vs] : points_to(g)) {
    std::size_t n = 0;
    for (const auto& v : vs) n += (exn.count(v.cls) > 0) == exceptions;
    if (n == 0) continue;
    ++addrs;
    total += n;
  }
  if (addrs == 0) return std::nullopt;
  return static_cast<double>(total) / static_cast<double>(addrs);
}

}  // namespace

std::optional<double> var_points_to(const LabeledProgram& lp, const DSG& g) {
  return mean_count(lp, g, false);
}

std::optional<double> throws(const LabeledProgram& lp, const DSG& g) {
  return mean_count(lp, g, true);
}

std::set<EcLink> ec_links(const LabeledProgram& lp, const DSG& g) {
  auto label = [&](NodeId n) { return g.nodes[n].state.stmt; };
  auto is_throw = [&](NodeId n) { return lp.stmt(label(n)).is_throw(); };
  // An exception leaving node `from` by popping a frame stays at the same throw.
  auto propagates = [&](const abstract::DsgEdge& e) {
    return !e.summary && e.action.kind == StackAction::Kind::Pop && is_throw(e.from) &&
           label(e.from) == label(e.to);
  };

  // Raise points of the exception in flight at (throw node, top frame).
  std::map<std::pair<NodeId, Frame>, std::set<RaisePoint>> rp;
  auto add = [&](NodeId n, const Frame& f, const RaisePoint& r) {
    return rp[{n, f}].insert(r).second;
  };
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (e.summary || !is_throw(e.to) || propagates(e)) continue;
    for (const Frame& f : g.edgeTops[i]) add(e.to, f, RaisePoint{true, label(e.to)});
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const auto& e = g.edges[i];
      if (!propagates(e)) continue;
      if (auto* c = std::get_if<abstract::CallFrame>(&e.action.frame)) {
        RaisePoint r{false, lp.call_site_returning_to(c->ret)};
        for (const Frame& f : g.edgeTops[i]) changed |= add(e.to, f, r);
      } else {
        auto it = rp.find({e.from, e.action.frame});
        if (it == rp.end()) continue;
        std::set<RaisePoint> from = it->second;
        for (const Frame& f : g.edgeTops[i])
          for (const RaisePoint& r : from) changed |= add(e.to, f, r);
      }
    }
  }

  std::set<EcLink> out;
  for (const auto& e : g.edges) {
    if (e.summary || e.action.kind != StackAction::Kind::Pop || !is_throw(e.from)) continue;
    auto* h = std::get_if<abstract::HandlerFrame>(&e.action.frame);
    if (!h || label(e.to) != h->handler) continue;
    auto it = rp.find({e.from, e.action.frame});
    if (it == rp.end()) continue;
    for (const RaisePoint& r : it->second) out.insert(EcLink{label(e.from), r, h->handler});
  }
  return out;
}

std::set<EcLink> concrete_ec_links(const LabeledProgram& lp,
                                   const std::vector<concrete::State>& trace) {
  std::set<EcLink> out;
  RaisePoint cur;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const concrete::State& s = trace[i];
    if (!lp.stmt(s.stmt).is_throw()) continue;
    if (i == 0 || trace[i - 1].stmt != s.stmt) cur = RaisePoint{true, s.stmt};
    if (i + 1 == trace.size() || !s.kont) continue;
    const concrete::State& n = trace[i + 1];
    if (n.stmt == s.stmt) {
      if (auto* f = std::get_if<concrete::FunFrame>(&s.kont->frame))
        cur = RaisePoint{false, lp.call_site_returning_to(f->ret)};
    } else if (auto* h = std::get_if<concrete::HandleFrame>(&s.kont->frame)) {
      out.insert(EcLink{s.stmt, cur, h->handler});
    }
  }
  return out;
}

std::optional<double> average_links(const std::set<EcLink>& links) {
  std::set<Label> throwsWithLinks;
  for (const auto& l : links) throwsWithLinks.insert(l.throwLabel);
  if (throwsWithLinks.empty()) return std::nullopt;
  return static_cast<double>(links.size()) / static_cast<double>(throwsWithLinks.size());
}

Report report(const LabeledProgram& lp, const DSG& g) {
  Report r;
  r.policy = abstract::describe(g.policy);
  r.varPointsTo = var_points_to(lp, g);
  r.throws = throws(lp, g);
  r.links = ec_links(lp, g);
  r.avgLinks = average_links(r.links);
  r.nodes = g.nodes.size();
  for (const auto& e : g.edges) r.edges += !e.summary;
  std::set<MethodId> methods;
  for (const auto& n : g.nodes) methods.insert(lp.stmt(n.state.stmt).method);
  r.methods = methods.size();
  r.seconds = g.seconds;
  r.notes = g.notes;
  return r;
}

namespace {

std::optional<double> ratio(std::optional<double> num, std::optional<double> den) {
  if (!num || !den || *den == 0) return std::nullopt;
  return *num / *den;
}

}  // namespace

Ratios ratios(const Report& a, const Report& b) {
  auto d = [](std::size_t n) { return std::optional<double>(static_cast<double>(n)); };
  return Ratios{ratio(b.varPointsTo, a.varPointsTo), ratio(b.throws, a.throws),
                ratio(b.avgLinks, a.avgLinks), ratio(d(a.nodes), d(b.nodes)),
                ratio(d(a.edges), d(b.edges))};
}

std::string format(const LabeledProgram& lp, const EcLink& l) {
  std::string via = l.from.local ? "raised locally" : "via call " + lp.describe(l.from.site);
  return lp.describe(l.throwLabel) + " -> " + lp.describe(l.handler) + " (" + via + ")";
}

}  // namespace anfj::metrics
