#include "anfj/export.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace anfj::abstract {

using nlohmann::json;

namespace {

json ptr_json(const Pointer& p) {
  return json{{"site", p.site}, {"time", p.time}, {"recv", p.recvSite}};
}

Pointer ptr_from(const json& j) {
  return Pointer{j.at("site").get<Label>(), j.at("time").get<Time>(), j.at("recv").get<Label>()};
}

json frame_json(const LabeledProgram& lp, const Frame& f) {
  if (auto* c = std::get_if<CallFrame>(&f))
    return json{{"kind", "call"}, {"var", lp.name(c->var)}, {"ret", c->ret}, {"fp", ptr_json(c->fp)}};
  if (auto* h = std::get_if<HandlerFrame>(&f))
    return json{{"kind", "handler"},  {"class", lp.name(h->cls)}, {"var", lp.name(h->var)},
                {"handler", h->handler}, {"fp", ptr_json(h->fp)}};
  return json{{"kind", "bottom"}};
}

Symbol sym(const LabeledProgram& lp, const json& j) {
  auto s = lp.symbol(j.get<std::string>());
  if (!s) throw std::runtime_error("unknown name in DSG JSON: " + j.get<std::string>());
  return *s;
}

Frame frame_from(const LabeledProgram& lp, const json& j) {
  std::string kind = j.at("kind");
  if (kind == "call")
    return CallFrame{sym(lp, j.at("var")), j.at("ret").get<Label>(), ptr_from(j.at("fp"))};
  if (kind == "handler")
    return HandlerFrame{sym(lp, j.at("class")), sym(lp, j.at("var")),
                        j.at("handler").get<Label>(), ptr_from(j.at("fp"))};
  if (kind == "bottom") return Bottom{};
  throw std::runtime_error("unknown frame kind '" + kind + "'");
}

json frames_json(const LabeledProgram& lp, const FrameSet& fs) {
  json a = json::array();
  for (const Frame& f : fs) a.push_back(frame_json(lp, f));
  return a;
}

FrameSet frames_from(const LabeledProgram& lp, const json& j) {
  FrameSet out;
  for (const auto& f : j) out.insert(frame_from(lp, f));
  return out;
}

const char* kind_name(StackAction::Kind k) {
  switch (k) {
    case StackAction::Kind::Epsilon: return "eps";
    case StackAction::Kind::Push: return "push";
    case StackAction::Kind::Pop: return "pop";
  }
  return "";
}

}  // namespace

std::string to_json(const LabeledProgram& lp, const DSG& g) {
  json j;
  const Policy& p = g.policy;
  j["policy"] = {{"k", p.k},
                 {"objSensitivity", p.objSensitivity},
                 {"gc", p.gc},
                 {"liveness", p.liveness},
                 {"mode", p.mode == Mode::Pushdown ? "pushdown" : "finite"},
                 {"storeMode", p.storeMode == StoreMode::PerState ? "per-state" : "per-node"}};
  j["initial"] = g.initial;
  json nodes = json::array();
  for (NodeId i = 0; i < g.nodes.size(); ++i) {
    const DsgNode& n = g.nodes[i];
    json store = json::array();
    for (const auto& [a, vs] : n.store) {
      json values = json::array();
      for (const Value& v : vs) values.push_back({{"class", lp.name(v.cls)}, {"op", ptr_json(v.op)}});
      store.push_back({{"base", lp.name(a.base)}, {"ptr", ptr_json(a.ptr)}, {"values", values}});
    }
    json node = {{"id", i},
                 {"label", n.state.stmt},
                 {"stmt", lp.describe(n.state.stmt)},
                 {"fp", ptr_json(n.state.fp)},
                 {"time", n.state.time},
                 {"store", store},
                 {"topFrames", frames_json(lp, g.topFrames[i])},
                 {"stackFrames", frames_json(lp, g.stackFrames[i])}};
    if (n.ctx) node["ctx"] = {{"method", n.ctx->method}, {"fp", ptr_json(n.ctx->fp)}};
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const DsgEdge& e : g.edges) {
    json edge = {{"from", e.from}, {"to", e.to}, {"action", kind_name(e.action.kind)},
                 {"summary", e.summary}};
    if (e.action.kind != StackAction::Kind::Epsilon) edge["frame"] = frame_json(lp, e.action.frame);
    edges.push_back(std::move(edge));
  }
  j["edges"] = std::move(edges);
  return j.dump(1) + "\n";
}

DSG dsg_from_json(const LabeledProgram& lp, const std::string& text) {
  json j = json::parse(text);
  DSG g;
  const json& p = j.at("policy");
  g.policy.k = p.at("k");
  g.policy.objSensitivity = p.at("objSensitivity");
  g.policy.gc = p.at("gc");
  g.policy.liveness = p.at("liveness");
  g.policy.mode = p.at("mode") == "finite" ? Mode::Finite : Mode::Pushdown;
  g.policy.storeMode = p.at("storeMode") == "per-node" ? StoreMode::PerNode : StoreMode::PerState;
  g.initial = j.at("initial");
  for (const auto& n : j.at("nodes")) {
    DsgNode node;
    node.state = ControlState{n.at("label").get<Label>(), ptr_from(n.at("fp")),
                              n.at("time").get<Time>()};
    for (const auto& b : n.at("store")) {
      ValueSet vs;
      for (const auto& v : b.at("values")) vs.insert(Value{sym(lp, v.at("class")), ptr_from(v.at("op"))});
      node.store[Addr{sym(lp, b.at("base")), ptr_from(b.at("ptr"))}] = std::move(vs);
    }
    if (n.contains("ctx"))
      node.ctx = Context{n.at("ctx").at("method").get<MethodId>(), ptr_from(n.at("ctx").at("fp"))};
    g.nodes.push_back(std::move(node));
    g.topFrames.push_back(frames_from(lp, n.at("topFrames")));
    g.stackFrames.push_back(frames_from(lp, n.at("stackFrames")));
  }
  for (const auto& e : j.at("edges")) {
    DsgEdge edge;
    edge.from = e.at("from");
    edge.to = e.at("to");
    edge.summary = e.at("summary");
    std::string kind = e.at("action");
    if (kind == "push") edge.action = StackAction::push(frame_from(lp, e.at("frame")));
    else if (kind == "pop") edge.action = StackAction::pop(frame_from(lp, e.at("frame")));
    g.edges.push_back(edge);
  }
  return g;
}

bool same_exported(const DSG& a, const DSG& b) {
  auto pol = [](const Policy& p) {
    return std::tie(p.k, p.objSensitivity, p.gc, p.liveness, p.mode, p.storeMode);
  };
  return pol(a.policy) == pol(b.policy) && a.initial == b.initial && a.nodes == b.nodes &&
         a.edges == b.edges && a.topFrames == b.topFrames && a.stackFrames == b.stackFrames;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const LabeledProgram& lp, const DSG& g) {
  std::ostringstream os;
  os << "digraph dsg {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (NodeId i = 0; i < g.nodes.size(); ++i) {
    const DsgNode& n = g.nodes[i];
    os << "  n" << i << " [label=\"" << i << ": " << escape(lp.describe(n.state.stmt))
       << "\\nfp " << escape(format(n.state.fp)) << "  t " << escape(format(n.state.time))
       << "\"" << (i == g.initial ? ", penwidth=2" : "") << "];\n";
  }
  for (const DsgEdge& e : g.edges) {
    os << "  n" << e.from << " -> n" << e.to << " [";
    switch (e.action.kind) {
      case StackAction::Kind::Epsilon:
        os << "style=dashed, label=\"&epsilon;\"";
        if (e.summary) os << ", color=blue";
        break;
      case StackAction::Kind::Push:
        os << "label=\"" << escape(format(lp, e.action.frame)) << "⁺\"";
        break;
      case StackAction::Kind::Pop:
        os << "label=\"" << escape(format(lp, e.action.frame)) << "⁻\"";
        break;
    }
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace anfj::abstract
