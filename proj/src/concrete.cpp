#include "anfj/concrete.hpp"

#include <sstream>

#include "anfj/errors.hpp"

namespace anfj::concrete {

std::vector<Label> last_labels(const Time& t, std::size_t k) {
  std::vector<Label> out;
  for (const History* h = t.get(); h && out.size() < k; h = h->prev.get())
    out.push_back(h->label);
  return out;
}

std::size_t kont_depth(const Kont& k) { return k ? k->depth : 0; }

// Long chains are released iteratively; the default recursive release
// overflows the native stack on deep recursion.
History::~History() {
  auto p = std::move(prev);
  while (p && p.use_count() == 1) p = std::move(p->prev);
}

KontNode::~KontNode() {
  auto p = std::move(next);
  while (p && p.use_count() == 1) p = std::move(p->next);
}

std::string format_pointer(const Pointer& p) {
  std::ostringstream os;
  os << p.site << "#" << p.serial();
  return os.str();
}

State inject(const LabeledProgram& lp) {
  State s;
  s.stmt = lp.entry().entry;
  s.store = std::make_shared<Store>();
  return s;
}

namespace {

struct StuckError {
  std::string reason;
};

Time tick(Label l, const Time& t) {
  auto h = std::make_shared<History>();
  h->label = l;
  h->prev = t;
  h->serial = (t ? t->serial : 0) + 1;
  return h;
}

Kont push(const Kont& k, std::variant<FunFrame, HandleFrame> f) {
  auto n = std::make_shared<KontNode>();
  n->frame = std::move(f);
  n->next = k;
  n->depth = kont_depth(k) + 1;
  return n;
}

class Stepper {
 public:
  // With `inPlace`, a store not shared with anyone else is updated directly.
  Stepper(const LabeledProgram& lp, const State& s, bool inPlace = false)
      : lp_(lp), s_(s), inPlace_(inPlace) {}

  std::variant<State, Outcome> run() {
    const Stmt& st = lp_.stmt(s_.stmt);
    next_.fp = s_.fp;
    next_.kont = s_.kont;
    next_.time = tick(st.label, s_.time);
    try {
      return std::visit([&](const auto& k) { return apply(st, k); }, st.kind);
    } catch (const StuckError& e) {
      return Outcome{Stuck{e.reason}, s_, 0};
    } catch (const LookupError& e) {
      return Outcome{Stuck{e.what()}, s_, 0};
    }
  }

 private:
  const Value& read(Symbol base, const Pointer& p) const {
    auto it = s_.store->find(Addr{base, p});
    if (it == s_.store->end())
      throw StuckError{"unbound '" + lp_.name(base) + "' at " + format_pointer(p)};
    return it->second;
  }

  void write(Addr a, Value v) {
    if (!store_) {
      if (inPlace_ && s_.store.use_count() == 1)
        store_ = std::const_pointer_cast<Store>(s_.store);
      else
        store_ = std::make_shared<Store>(*s_.store);
    }
    (*store_)[a] = v;
  }

  State finish(Label stmt) {
    next_.stmt = stmt;
    next_.store = store_ ? std::shared_ptr<const Store>(std::move(store_)) : s_.store;
    return next_;
  }

  Label succ_of(const Stmt& st) const {
    if (!st.succ) throw StuckError{"no successor for label " + std::to_string(st.label)};
    return *st.succ;
  }

  std::variant<State, Outcome> apply(const Stmt& st, const syn::Assign& a) {
    Addr dst{a.lhs, s_.fp};
    if (auto* e = std::get_if<syn::VarRef>(&a.exp)) {
      write(dst, read(e->var, s_.fp));
    } else if (auto* e = std::get_if<syn::Cast>(&a.exp)) {
      write(dst, read(e->var, s_.fp));
    } else if (auto* e = std::get_if<syn::FieldRef>(&a.exp)) {
      const Value& obj = read(e->object, s_.fp);
      write(dst, read(e->field, obj.op));
    } else if (auto* e = std::get_if<syn::New>(&a.exp)) {
      Pointer op{st.label, next_.time, s_.fp.recvSite};
      std::vector<Value> args;
      for (Symbol v : e->args) args.push_back(read(v, s_.fp));
      for (auto& [addr, val] : apply_constructor(lp_, e->cls, op, args)) write(addr, val);
      write(dst, Value{e->cls, op});
    } else {
      const auto& inv = std::get<syn::Invoke>(a.exp);
      const Value recv = read(inv.receiver, s_.fp);
      const Method* m = lp_.find_method(recv.cls, inv.method);
      if (!m)
        throw StuckError{"no method '" + lp_.name(inv.method) + "' for class '" +
                         lp_.name(recv.cls) + "'"};
      if (m->params.size() != inv.args.size())
        throw StuckError{"arity mismatch calling '" + lp_.name(inv.method) + "'"};
      Pointer fp2{st.label, next_.time, recv.op.site};
      for (std::size_t i = 0; i < inv.args.size(); ++i)
        write(Addr{m->params[i], fp2}, read(inv.args[i], s_.fp));
      write(Addr{lp_.this_symbol(), fp2}, recv);
      next_.kont = push(s_.kont, FunFrame{a.lhs, succ_of(st), s_.fp});
      next_.fp = fp2;
      return finish(m->entry);
    }
    return finish(succ_of(st));
  }

  std::variant<State, Outcome> apply(const Stmt& st, const syn::Return& r) {
    const Value v = read(r.var, s_.fp);
    if (!s_.kont) return Outcome{Halted{v}, s_, 0};
    next_.kont = s_.kont->next;
    if (auto* f = std::get_if<FunFrame>(&s_.kont->frame)) {
      write(Addr{f->var, f->fp}, v);
      next_.fp = f->fp;
      return finish(f->ret);
    }
    return finish(st.label);
  }

  std::variant<State, Outcome> apply(const Stmt& st, const syn::Throw& t) {
    const Value v = read(t.var, s_.fp);
    if (!s_.kont) return Outcome{Uncaught{v}, s_, 0};
    next_.kont = s_.kont->next;
    if (auto* h = std::get_if<HandleFrame>(&s_.kont->frame)) {
      if (lp_.subtype(v.cls, h->cls)) {
        write(Addr{h->var, h->fp}, v);
        next_.fp = h->fp;
        return finish(h->handler);
      }
    }
    return finish(st.label);
  }

  std::variant<State, Outcome> apply(const Stmt& st, const syn::Try& t) {
    next_.kont = push(s_.kont, HandleFrame{t.catchClass, t.catchVar, t.handlerHead, s_.fp});
    return finish(succ_of(st));
  }

  std::variant<State, Outcome> apply(const Stmt& st, const syn::PopHandler&) {
    if (!s_.kont || !std::holds_alternative<HandleFrame>(s_.kont->frame))
      throw StuckError{"pophandler without a handler frame on top"};
    next_.kont = s_.kont->next;
    return finish(succ_of(st));
  }

  const LabeledProgram& lp_;
  const State& s_;
  bool inPlace_;
  State next_;
  std::shared_ptr<Store> store_;
};

}  // namespace

std::vector<std::pair<Addr, Value>> apply_constructor(
    const LabeledProgram& lp, Symbol cls, const Pointer& op,
    const std::vector<Value>& args) {
  const ClassInfo& c = lp.class_lookup(cls);
  if (args.size() != c.konst.params.size())
    throw ElaborationError("constructor of '" + lp.name(cls) + "' expects " +
                           std::to_string(c.konst.params.size()) + " arguments");
  std::map<Symbol, Value> env;
  for (std::size_t i = 0; i < args.size(); ++i) env.emplace(c.konst.params[i], args[i]);
  std::vector<std::pair<Addr, Value>> out;
  if (c.parent) {
    std::vector<Value> superArgs;
    for (Symbol p : c.konst.superArgs) superArgs.push_back(env.at(p));
    out = apply_constructor(lp, *c.parent, op, superArgs);
  }
  for (const auto& [field, param] : c.konst.assignments)
    out.emplace_back(Addr{field, op}, env.at(param));
  return out;
}

std::variant<State, Outcome> step(const LabeledProgram& lp, const State& s) {
  return Stepper(lp, s).run();
}

RunResult run(const LabeledProgram& lp, std::size_t fuel, bool keepTrace) {
  RunResult r{Outcome{FuelExhausted{}, {}, 0}, {}};
  State cur = inject(lp);
  std::size_t steps = 0;
  for (;;) {
    if (keepTrace) r.trace.push_back(cur);
    if (steps >= fuel) {
      r.outcome = Outcome{FuelExhausted{}, cur, steps};
      return r;
    }
    auto nx = Stepper(lp, cur, !keepTrace).run();
    if (auto* o = std::get_if<Outcome>(&nx)) {
      r.outcome = std::move(*o);
      r.outcome.steps = steps;
      return r;
    }
    cur = std::move(std::get<State>(nx));
    ++steps;
  }
}

std::string Outcome::describe(const LabeledProgram& lp) const {
  auto val = [&](const Value& v) {
    return "(" + lp.name(v.cls) + ", " + format_pointer(v.op) + ")";
  };
  return std::visit(
      [&](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Halted>) return "halted " + val(k.value);
        else if constexpr (std::is_same_v<K, Uncaught>) return "uncaught " + val(k.value);
        else if constexpr (std::is_same_v<K, Stuck>) return "stuck: " + k.reason;
        else return "fuel exhausted";
      },
      kind);
}

}  // namespace anfj::concrete
