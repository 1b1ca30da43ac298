#include "anfj/abstract.hpp"

#include <sstream>
#include <stdexcept>

namespace anfj::abstract {

std::string describe(const Policy& p) {
  std::ostringstream os;
  os << "k=" << p.k << (p.objSensitivity ? " obj-sens" : "")
     << " gc=" << (p.gc ? "on" : "off") << " liveness=" << (p.liveness ? "on" : "off")
     << " mode=" << (p.mode == Mode::Pushdown ? "pushdown" : "finite")
     << " store=" << (p.storeMode == StoreMode::PerState ? "per-state" : "per-node");
  return os.str();
}

Policy parse_policy(std::string_view spec, Policy p) {
  auto on_off = [](std::string_view v, std::string_view key) {
    if (v == "on") return true;
    if (v == "off") return false;
    throw std::invalid_argument(std::string(key) + " expects on or off");
  };
  while (!spec.empty()) {
    std::size_t comma = spec.find(',');
    std::string_view item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    std::size_t eq = item.find('=');
    std::string_view key = item.substr(0, eq);
    std::string_view val = eq == std::string_view::npos ? std::string_view{} : item.substr(eq + 1);
    if (key == "k") {
      try {
        std::size_t used = 0;
        p.k = std::stoi(std::string(val), &used);
        if (used != val.size() || p.k < 0) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw std::invalid_argument("k expects a non-negative integer");
      }
    } else if (key == "obj" || key == "obj-sens") {
      p.objSensitivity = val.empty() || on_off(val, key);
    } else if (key == "gc") {
      p.gc = on_off(val, key);
    } else if (key == "liveness") {
      p.liveness = on_off(val, key);
    } else if (key == "pushdown" || (key == "mode" && val == "pushdown")) {
      p.mode = Mode::Pushdown;
    } else if (key == "finite" || (key == "mode" && val == "finite")) {
      p.mode = Mode::Finite;
    } else if (key == "store" && (val == "per-state" || val == "per-node")) {
      p.storeMode = val == "per-state" ? StoreMode::PerState : StoreMode::PerNode;
    } else if (!item.empty()) {
      throw std::invalid_argument("unknown policy item '" + std::string(item) + "'");
    }
  }
  return p;
}

Time tick(Label l, const Time& t, const Policy& p) {
  Time out;
  if (p.k <= 0) return out;
  out.reserve(static_cast<std::size_t>(p.k));
  out.push_back(l);
  for (std::size_t i = 0; i < t.size() && out.size() < static_cast<std::size_t>(p.k); ++i)
    out.push_back(t[i]);
  return out;
}

Pointer alloc(Label l, const Time& t, Label recvSite, const Policy& p) {
  return Pointer{l, t, p.objSensitivity ? recvSite : kNoLabel};
}

const ValueSet& lookup(const Store& s, const Addr& a) {
  static const ValueSet empty;
  auto it = s.find(a);
  return it == s.end() ? empty : it->second;
}

bool join_into(Store& into, const Addr& a, const ValueSet& vs) {
  if (vs.empty()) return false;
  auto& dst = into[a];
  std::size_t before = dst.size();
  dst.insert(vs.begin(), vs.end());
  return dst.size() != before;
}

bool join_into(Store& into, const Store& from) {
  bool grew = false;
  for (const auto& [a, vs] : from) grew |= join_into(into, a, vs);
  return grew;
}

Store join(const Store& a, const Store& b) {
  Store out = a;
  join_into(out, b);
  return out;
}

bool leq(const Store& a, const Store& b) {
  for (const auto& [addr, vs] : a) {
    if (vs.empty()) continue;
    const ValueSet& other = lookup(b, addr);
    for (const auto& v : vs)
      if (!other.count(v)) return false;
  }
  return true;
}

const Pointer& frame_fp(const Frame& f) {
  static const Pointer fp0 = initial_fp();
  if (auto* c = std::get_if<CallFrame>(&f)) return c->fp;
  if (auto* h = std::get_if<HandlerFrame>(&f)) return h->fp;
  return fp0;
}

StackAction decide_stack_action(const std::vector<Frame>& before,
                                const std::vector<Frame>& after) {
  if (before == after) return StackAction::eps();
  if (!before.empty() && after.size() + 1 == before.size() &&
      std::equal(after.begin(), after.end(), before.begin() + 1))
    return StackAction::pop(before.front());
  if (!after.empty() && before.size() + 1 == after.size() &&
      std::equal(before.begin(), before.end(), after.begin() + 1))
    return StackAction::push(after.front());
  throw std::logic_error("stack views differ by more than one frame");
}

namespace {

class Rules {
 public:
  Rules(const LabeledProgram& lp, const ControlState& q, const Store& s,
        const Frame& top, const Policy& p, std::vector<std::string>* notes)
      : lp_(lp), q_(q), s_(s), top_(top), p_(p), notes_(notes) {
    if (!std::holds_alternative<Bottom>(top)) before_.push_back(top);
    t2_ = tick(q.stmt, q.time, p);
  }

  std::vector<Successor> run() {
    const Stmt& st = lp_.stmt(q_.stmt);
    std::visit([&](const auto& k) { apply(st, k); }, st.kind);
    std::vector<Successor> out;
    for (auto& [key, store] : merged_)
      out.push_back(Successor{key.first, key.second, std::move(store)});
    return out;
  }

 private:
  const ValueSet& read(Symbol v, const Pointer& p) {
    const ValueSet& vs = lookup(s_, Addr{v, p});
    if (vs.empty() && notes_)
      notes_->push_back("unbound " + format(lp_, Addr{v, p}) + " at " + lp_.describe(q_.stmt));
    return vs;
  }

  Store& emit(Label stmt, const Pointer& fp, const std::vector<Frame>& after) {
    ControlState q{stmt, fp, t2_};
    StackAction a = decide_stack_action(before_, after);
    auto [it, fresh] = merged_.try_emplace({q, a});
    if (fresh) it->second = s_;
    return it->second;
  }

  std::vector<Frame> pushed(Frame f) const {
    std::vector<Frame> v{std::move(f)};
    v.insert(v.end(), before_.begin(), before_.end());
    return v;
  }

  void apply(const Stmt& st, const syn::Assign& a) {
    Addr dst{a.lhs, q_.fp};
    if (auto* e = std::get_if<syn::VarRef>(&a.exp)) {
      const ValueSet& vs = read(e->var, q_.fp);
      if (!vs.empty()) join_into(emit(*st.succ, q_.fp, before_), dst, vs);
    } else if (auto* e = std::get_if<syn::Cast>(&a.exp)) {
      const ValueSet& vs = read(e->var, q_.fp);
      if (!vs.empty()) join_into(emit(*st.succ, q_.fp, before_), dst, vs);
    } else if (auto* e = std::get_if<syn::FieldRef>(&a.exp)) {
      ValueSet result;
      for (const Value& obj : read(e->object, q_.fp)) {
        const ValueSet& fv = lookup(s_, Addr{e->field, obj.op});
        result.insert(fv.begin(), fv.end());
      }
      if (result.empty()) {
        if (notes_) notes_->push_back("no field value for " + lp_.describe(st.label));
        return;
      }
      join_into(emit(*st.succ, q_.fp, before_), dst, result);
    } else if (auto* e = std::get_if<syn::New>(&a.exp)) {
      std::vector<const ValueSet*> args;
      for (Symbol v : e->args) {
        args.push_back(&read(v, q_.fp));
        if (args.back()->empty()) return;
      }
      Pointer op = alloc(st.label, t2_, q_.fp.recvSite, p_);
      Store& out = emit(*st.succ, q_.fp, before_);
      construct(out, e->cls, op, args);
      join_into(out, dst, ValueSet{Value{e->cls, op}});
    } else {
      invoke(st, a.lhs, std::get<syn::Invoke>(a.exp));
    }
  }

  // Field bindings of `new cls(args)`, super constructors first.
  void construct(Store& out, Symbol cls, const Pointer& op,
                 const std::vector<const ValueSet*>& args) {
    const ClassInfo& c = lp_.class_lookup(cls);
    std::map<Symbol, const ValueSet*> env;
    for (std::size_t i = 0; i < args.size(); ++i) env[c.konst.params[i]] = args[i];
    if (c.parent) {
      std::vector<const ValueSet*> superArgs;
      for (Symbol s : c.konst.superArgs) superArgs.push_back(env.at(s));
      construct(out, *c.parent, op, superArgs);
    }
    for (const auto& [field, param] : c.konst.assignments)
      join_into(out, Addr{field, op}, *env.at(param));
  }

  void invoke(const Stmt& st, Symbol lhs, const syn::Invoke& inv) {
    std::vector<const ValueSet*> args;
    for (Symbol v : inv.args) {
      args.push_back(&read(v, q_.fp));
      if (args.back()->empty()) return;
    }
    Frame call = CallFrame{lhs, *st.succ, q_.fp};
    for (const Value& recv : read(inv.receiver, q_.fp)) {
      const Method* m = lp_.find_method(recv.cls, inv.method);
      if (!m || m->params.size() != args.size()) {
        if (notes_)
          notes_->push_back("no applicable '" + lp_.name(inv.method) + "' for " +
                            format(lp_, recv));
        continue;
      }
      Pointer fp2 = alloc(st.label, t2_, recv.op.site, p_);
      Store& out = emit(m->entry, fp2, pushed(call));
      for (std::size_t i = 0; i < args.size(); ++i)
        join_into(out, Addr{m->params[i], fp2}, *args[i]);
      join_into(out, Addr{lp_.this_symbol(), fp2}, ValueSet{recv});
    }
  }

  void apply(const Stmt& st, const syn::Return& r) {
    const ValueSet& vs = read(r.var, q_.fp);
    if (vs.empty()) return;
    if (auto* c = std::get_if<CallFrame>(&top_)) {
      join_into(emit(c->ret, c->fp, {}), Addr{c->var, c->fp}, vs);
    } else if (std::holds_alternative<HandlerFrame>(top_)) {
      emit(st.label, q_.fp, {});
    }
  }

  void apply(const Stmt& st, const syn::Throw& t) {
    const ValueSet& vs = read(t.var, q_.fp);
    if (std::holds_alternative<CallFrame>(top_)) {
      if (!vs.empty()) emit(st.label, q_.fp, {});
      return;
    }
    auto* h = std::get_if<HandlerFrame>(&top_);
    if (!h) return;
    for (const Value& v : vs) {
      if (lp_.subtype(v.cls, h->cls))
        join_into(emit(h->handler, h->fp, {}), Addr{h->var, h->fp}, ValueSet{v});
      else
        emit(st.label, q_.fp, {});
    }
  }

  void apply(const Stmt& st, const syn::Try& t) {
    emit(*st.succ, q_.fp, pushed(HandlerFrame{t.catchClass, t.catchVar, t.handlerHead, q_.fp}));
  }

  void apply(const Stmt& st, const syn::PopHandler&) {
    if (std::holds_alternative<HandlerFrame>(top_)) emit(*st.succ, q_.fp, {});
  }

  const LabeledProgram& lp_;
  const ControlState& q_;
  const Store& s_;
  const Frame& top_;
  const Policy& p_;
  std::vector<std::string>* notes_;
  std::vector<Frame> before_;
  Time t2_;
  std::map<std::pair<ControlState, StackAction>, Store> merged_;
};

}  // namespace

std::vector<Successor> next(const LabeledProgram& lp, const ControlState& q,
                            const Store& store, const Frame& top,
                            const Policy& policy, std::vector<std::string>* notes) {
  return Rules(lp, q, store, top, policy, notes).run();
}

std::string format(const Time& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + "]";
}

std::string format(const Pointer& p) {
  std::string s = std::to_string(p.site) + "@" + format(p.time);
  if (p.recvSite != kNoLabel) s += "^" + std::to_string(p.recvSite);
  return s;
}

std::string format(const LabeledProgram& lp, const Value& v) {
  return lp.name(v.cls) + ":" + format(v.op);
}

std::string format(const LabeledProgram& lp, const Addr& a) {
  return "(" + lp.name(a.base) + ", " + format(a.ptr) + ")";
}

std::string format(const LabeledProgram& lp, const Frame& f) {
  if (auto* c = std::get_if<CallFrame>(&f))
    return "call(" + lp.name(c->var) + "," + std::to_string(c->ret) + "," + format(c->fp) + ")";
  if (auto* h = std::get_if<HandlerFrame>(&f))
    return "handle(" + lp.name(h->cls) + "," + lp.name(h->var) + "," +
           std::to_string(h->handler) + "," + format(h->fp) + ")";
  return "bottom";
}

std::string format(const LabeledProgram& lp, const StackAction& a) {
  switch (a.kind) {
    case StackAction::Kind::Epsilon: return "eps";
    case StackAction::Kind::Push: return "push " + format(lp, a.frame);
    case StackAction::Kind::Pop: return "pop " + format(lp, a.frame);
  }
  return "";
}

std::string format(const ControlState& q) {
  return "<" + std::to_string(q.stmt) + ", " + format(q.fp) + ", " + format(q.time) + ">";
}

}  // namespace anfj::abstract
