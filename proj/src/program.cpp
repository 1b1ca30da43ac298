#include "anfj/program.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "anfj/errors.hpp"
#include "anfj/parser.hpp"

namespace anfj {

Symbol SymbolTable::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return Symbol{it->second};
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(std::string(name), id);
  return Symbol{id};
}

std::optional<Symbol> SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return Symbol{it->second};
}

const syn::Invoke* Stmt::as_invoke() const {
  if (auto* a = std::get_if<syn::Assign>(&kind))
    return std::get_if<syn::Invoke>(&a->exp);
  return nullptr;
}

const Stmt& LabeledProgram::stmt(Label l) const {
  if (l < 0 || static_cast<std::size_t>(l) >= stmts_.size())
    throw LookupError("unknown label " + std::to_string(l));
  return stmts_[static_cast<std::size_t>(l)];
}

const Stmt* LabeledProgram::succ(Label l) const {
  const Stmt& s = stmt(l);
  if (!s.succ) return nullptr;
  return &stmts_[static_cast<std::size_t>(*s.succ)];
}

const ClassInfo& LabeledProgram::class_lookup(Symbol cls) const {
  auto it = classes_.find(cls);
  if (it == classes_.end())
    throw LookupError("unknown class '" + symbols_.name(cls) + "'");
  return it->second;
}

const ClassInfo& LabeledProgram::class_lookup(std::string_view cls) const {
  auto s = symbols_.find(cls);
  if (!s || !classes_.count(*s))
    throw LookupError("unknown class '" + std::string(cls) + "'");
  return classes_.at(*s);
}

const Method* LabeledProgram::find_method(Symbol receiver, Symbol m) const {
  std::optional<Symbol> c = receiver;
  while (c) {
    const ClassInfo& info = class_lookup(*c);
    auto it = info.methods.find(m);
    if (it != info.methods.end()) return &methods_[it->second];
    c = info.parent;
  }
  return nullptr;
}

const Method& LabeledProgram::method_lookup(Symbol receiver, Symbol m) const {
  if (const Method* found = find_method(receiver, m)) return *found;
  throw LookupError("no method '" + symbols_.name(m) + "' on class '" +
                    symbols_.name(receiver) + "' or its superclasses");
}

bool LabeledProgram::subtype(Symbol sub, Symbol super) const {
  class_lookup(super);
  std::optional<Symbol> c = sub;
  while (c) {
    if (*c == super) return true;
    c = class_lookup(*c).parent;
  }
  return false;
}

Label LabeledProgram::call_site_returning_to(Label returnLabel) const {
  auto it = callSiteByReturn_.find(returnLabel);
  return it == callSiteByReturn_.end() ? kNoLabel : it->second;
}

std::vector<Label> LabeledProgram::throw_labels() const {
  std::vector<Label> out;
  for (const auto& s : stmts_)
    if (s.is_throw()) out.push_back(s.label);
  return out;
}

std::string LabeledProgram::describe(Label l) const {
  const Stmt& s = stmt(l);
  const Method& m = method(s.method);
  std::ostringstream os;
  os << name(m.cls) << "." << name(m.name) << ":" << l << " ";
  auto csv = [&](const std::vector<Symbol>& xs) {
    std::string r;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) r += ",";
      r += name(xs[i]);
    }
    return r;
  };
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, syn::Assign>) {
          os << name(k.lhs) << " = ";
          std::visit(
              [&](const auto& e) {
                using E = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<E, syn::VarRef>)
                  os << name(e.var);
                else if constexpr (std::is_same_v<E, syn::FieldRef>)
                  os << name(e.object) << "." << name(e.field);
                else if constexpr (std::is_same_v<E, syn::Invoke>)
                  os << name(e.receiver) << "." << name(e.method) << "("
                     << csv(e.args) << ")";
                else if constexpr (std::is_same_v<E, syn::New>)
                  os << "new " << name(e.cls) << "(" << csv(e.args) << ")";
                else
                  os << "(" << name(e.cls) << ") " << name(e.var);
              },
              k.exp);
        } else if constexpr (std::is_same_v<K, syn::Return>) {
          os << "return " << name(k.var);
        } else if constexpr (std::is_same_v<K, syn::Throw>) {
          os << "throw " << name(k.var);
        } else if constexpr (std::is_same_v<K, syn::Try>) {
          os << "try/catch(" << name(k.catchClass) << " " << name(k.catchVar)
             << ")";
        } else {
          os << "pophandler";
        }
      },
      s.kind);
  return os.str();
}

std::set<Symbol> uses(const LabeledProgram&, const Stmt& s) {
  std::set<Symbol> u;
  if (auto* a = std::get_if<syn::Assign>(&s.kind)) {
    std::visit(
        [&](const auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, syn::VarRef>) {
            u.insert(e.var);
          } else if constexpr (std::is_same_v<E, syn::FieldRef>) {
            u.insert(e.object);
          } else if constexpr (std::is_same_v<E, syn::Invoke>) {
            u.insert(e.receiver);
            u.insert(e.args.begin(), e.args.end());
          } else if constexpr (std::is_same_v<E, syn::New>) {
            u.insert(e.args.begin(), e.args.end());
          } else {
            u.insert(e.var);
          }
        },
        a->exp);
  } else if (auto* r = std::get_if<syn::Return>(&s.kind)) {
    u.insert(r->var);
  } else if (auto* t = std::get_if<syn::Throw>(&s.kind)) {
    u.insert(t->var);
  }
  return u;
}

std::optional<Symbol> defines(const Stmt& s) {
  if (auto* a = std::get_if<syn::Assign>(&s.kind)) return a->lhs;
  return std::nullopt;
}

std::map<Label, std::set<Symbol>> compute_liveness(const LabeledProgram& lp,
                                                   const Method& m) {
  std::map<Label, std::set<Symbol>> live;
  for (Label l : m.labels) live[l];

  // Normal successors, and the exceptional handler edge per try nesting.
  auto normal_succ = [&](const Stmt& s) -> std::optional<Label> {
    if (auto* t = std::get_if<syn::Try>(&s.kind))
      return t->body.empty() ? t->popHandler : t->body.front();
    if (s.is_return() || s.is_throw()) return std::nullopt;
    return s.succ;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = m.labels.rbegin(); it != m.labels.rend(); ++it) {
      const Stmt& s = lp.stmt(*it);
      std::set<Symbol> out;
      if (auto n = normal_succ(s)) out = live[*n];
      if (auto d = defines(s)) out.erase(*d);
      std::set<Symbol> in = uses(lp, s);
      in.insert(out.begin(), out.end());
      // The statement may complete abruptly before its definition happens.
      for (Label tl : s.enclosingTries) {
        const auto& t = std::get<syn::Try>(lp.stmt(tl).kind);
        for (Symbol v : live[t.handlerHead])
          if (v != t.catchVar) in.insert(v);
      }
      if (in != live[*it]) {
        live[*it] = std::move(in);
        changed = true;
      }
    }
  }
  return live;
}

namespace detail {

class Elaborator {
 public:
  explicit Elaborator(const ast::Program& p) : src_(p) {}

  LabeledProgram run() {
    lp_.this_ = lp_.symbols_.intern("this");
    lp_.object_ = lp_.symbols_.intern("Object");
    build_classes();
    build_methods();
    resolve_entry();
    for (const auto& m : lp_.methods_) {
      auto live = compute_liveness(lp_, m);
      for (auto& [l, vs] : live) lp_.lives_[static_cast<std::size_t>(l)] = std::move(vs);
    }
    for (const auto& s : lp_.stmts_)
      if (s.as_invoke() && s.succ) lp_.callSiteByReturn_[*s.succ] = s.label;
    return std::move(lp_);
  }

 private:
  [[noreturn]] static void fail(const std::string& msg, SourcePos pos = {}) {
    if (pos.line > 0)
      throw ElaborationError(std::to_string(pos.line) + ":" +
                             std::to_string(pos.column) + ": " + msg);
    throw ElaborationError(msg);
  }

  Symbol sym(const std::string& s) { return lp_.symbols_.intern(s); }

  void require_class(const std::string& name, SourcePos pos) {
    if (name == "Object") return;
    if (!declared_.count(name)) fail("unknown class '" + name + "'", pos);
  }

  void build_classes() {
    ClassInfo object;
    object.name = lp_.object_;
    lp_.classes_[lp_.object_] = object;

    for (const auto& c : src_.classes) {
      if (c.name == "Object") fail("class 'Object' is built in", c.pos);
      declared_[c.name] = &c;
    }
    for (const auto& c : src_.classes) require_class(c.parent, c.pos);

    // Acyclicity of extends.
    for (const auto& c : src_.classes) {
      std::set<std::string> seen;
      std::string cur = c.name;
      while (cur != "Object") {
        if (!seen.insert(cur).second)
          fail("cyclic inheritance involving '" + c.name + "'", c.pos);
        cur = declared_.at(cur)->parent;
      }
    }
    for (const auto& c : src_.classes) flatten(c.name);
  }

  const ClassInfo& flatten(const std::string& name) {
    Symbol s = sym(name);
    if (auto it = lp_.classes_.find(s); it != lp_.classes_.end()) return it->second;
    const ast::ClassDecl& c = *declared_.at(name);
    const ClassInfo parent = flatten(c.parent);

    ClassInfo info;
    info.name = s;
    info.parent = parent.name;
    info.fields = parent.fields;
    for (const auto& f : c.fields) {
      require_class(f.type, c.pos);
      Symbol fs = sym(f.name);
      if (std::find(info.fields.begin(), info.fields.end(), fs) != info.fields.end()) {
        bool inherited = std::find(parent.fields.begin(), parent.fields.end(), fs) !=
                         parent.fields.end();
        fail(std::string(inherited ? "field '" + f.name + "' shadows an inherited field"
                                   : "duplicate field '" + f.name + "'") +
                 " in class '" + c.name + "'",
             c.pos);
      }
      info.fields.push_back(fs);
      info.ownFields.push_back(fs);
      allFields_.insert(fs);
    }

    const auto& k = c.konst;
    std::set<std::string> pnames;
    for (const auto& p : k.params) {
      require_class(p.type, k.pos);
      if (!pnames.insert(p.name).second)
        fail("duplicate constructor parameter '" + p.name + "'", k.pos);
      info.konst.params.push_back(sym(p.name));
    }
    if (k.superArgs.size() != parent.konst.params.size())
      fail("super call in '" + c.name + "' passes " +
               std::to_string(k.superArgs.size()) + " arguments, expected " +
               std::to_string(parent.konst.params.size()),
           k.pos);
    for (std::size_t i = 0; i < k.superArgs.size(); ++i) {
      if (i >= k.params.size() || k.params[i].name != k.superArgs[i])
        fail("super arguments must be a prefix of the constructor parameters",
             k.pos);
      info.konst.superArgs.push_back(sym(k.superArgs[i]));
    }
    std::set<std::string> assigned;
    for (const auto& [field, value] : k.assignments) {
      Symbol fs = sym(field);
      if (std::find(info.ownFields.begin(), info.ownFields.end(), fs) ==
          info.ownFields.end())
        fail("constructor of '" + c.name + "' assigns unknown field '" + field + "'",
             k.pos);
      if (!assigned.insert(field).second)
        fail("field '" + field + "' assigned twice", k.pos);
      if (!pnames.count(value))
        fail("'" + value + "' is not a constructor parameter", k.pos);
      info.konst.assignments.emplace_back(fs, sym(value));
    }
    if (assigned.size() != info.ownFields.size())
      fail("constructor of '" + c.name + "' must assign every declared field", k.pos);

    return lp_.classes_[s] = std::move(info);
  }

  void build_methods() {
    for (const auto& c : src_.classes) {
      ClassInfo& info = lp_.classes_.at(sym(c.name));
      for (const auto& m : c.methods) {
        Symbol ms = sym(m.name);
        if (info.methods.count(ms))
          fail("duplicate method '" + m.name + "' in class '" + c.name + "'", m.pos);
        auto id = static_cast<MethodId>(lp_.methods_.size());
        info.methods[ms] = id;
        Method md;
        md.id = id;
        md.cls = info.name;
        md.name = ms;
        lp_.methods_.push_back(md);
        allMethods_.insert(ms);
        srcMethods_.push_back(&m);
      }
    }
    for (MethodId id = 0; id < lp_.methods_.size(); ++id) label_method(id);
  }

  void label_method(MethodId id) {
    const ast::MethodDecl& src = *srcMethods_[id];
    Method& m = lp_.methods_[id];
    require_class(src.returnClass, src.pos);
    scope_.clear();
    for (const auto& p : src.params) {
      require_class(p.type, src.pos);
      if (p.name == "this") fail("'this' cannot be a parameter", src.pos);
      if (!scope_.insert(p.name).second)
        fail("duplicate parameter '" + p.name + "'", src.pos);
      m.params.push_back(sym(p.name));
    }
    for (const auto& l : src.locals) {
      require_class(l.type, src.pos);
      if (l.name == "this") fail("'this' cannot be a local", src.pos);
      if (!scope_.insert(l.name).second)
        fail("duplicate variable '" + l.name + "'", src.pos);
      m.locals.push_back(sym(l.name));
    }
    collect_catch_vars(src.body, m);
    scope_.insert("this");

    std::vector<Label> top = label_block(src.body, id, {});
    m.entry = top.front();
    link(top, std::nullopt);
    for (std::size_t i = 0; i < lp_.stmts_.size(); ++i)
      if (lp_.stmts_[i].method == id) m.labels.push_back(static_cast<Label>(i));
  }

  void collect_catch_vars(const ast::Block& b, Method& m) {
    for (const auto& s : b) {
      if (auto* t = std::get_if<ast::Try>(&s.kind)) {
        require_class(t->catchClass, s.pos);
        if (t->catchVar == "this") fail("'this' cannot be a catch variable", s.pos);
        if (scope_.insert(t->catchVar).second) m.locals.push_back(sym(t->catchVar));
        collect_catch_vars(t->body, m);
        collect_catch_vars(t->handler, m);
      }
    }
  }

  Symbol var(const std::string& v, SourcePos pos) {
    if (!scope_.count(v)) fail("unknown variable '" + v + "'", pos);
    return sym(v);
  }

  std::vector<Symbol> vars(const std::vector<std::string>& vs, SourcePos pos) {
    std::vector<Symbol> out;
    for (const auto& v : vs) out.push_back(var(v, pos));
    return out;
  }

  syn::Exp exp(const ast::Exp& e, SourcePos pos) {
    return std::visit(
        [&](const auto& x) -> syn::Exp {
          using E = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<E, ast::VarRef>) {
            return syn::VarRef{var(x.var, pos)};
          } else if constexpr (std::is_same_v<E, ast::FieldRef>) {
            Symbol f = sym(x.field);
            if (!allFields_.count(f)) fail("unknown field '" + x.field + "'", pos);
            return syn::FieldRef{var(x.object, pos), f};
          } else if constexpr (std::is_same_v<E, ast::Invoke>) {
            Symbol m = sym(x.method);
            if (!allMethods_.count(m)) fail("unknown method '" + x.method + "'", pos);
            return syn::Invoke{var(x.receiver, pos), m, vars(x.args, pos)};
          } else if constexpr (std::is_same_v<E, ast::New>) {
            require_class(x.cls, pos);
            const ClassInfo& c = lp_.classes_.at(sym(x.cls));
            if (c.konst.params.size() != x.args.size())
              fail("new " + x.cls + " expects " +
                       std::to_string(c.konst.params.size()) + " arguments",
                   pos);
            return syn::New{sym(x.cls), vars(x.args, pos)};
          } else {
            require_class(x.cls, pos);
            return syn::Cast{sym(x.cls), var(x.var, pos)};
          }
        },
        e);
  }

  Label fresh(MethodId id, SourcePos pos, std::vector<Label> enclosing) {
    Stmt s;
    s.label = static_cast<Label>(lp_.stmts_.size());
    s.method = id;
    s.pos = pos;
    s.enclosingTries = std::move(enclosing);
    lp_.stmts_.push_back(std::move(s));
    lp_.lives_.emplace_back();
    return lp_.stmts_.back().label;
  }

  // Pre-order labeling: try, body..., pophandler, handler...
  std::vector<Label> label_block(const ast::Block& b, MethodId id,
                                 const std::vector<Label>& enclosing) {
    std::vector<Label> out;
    for (const auto& s : b) {
      Label l = fresh(id, s.pos, enclosing);
      out.push_back(l);
      if (auto* a = std::get_if<ast::Assign>(&s.kind)) {
        if (a->lhs == "this") fail("cannot assign to 'this'", s.pos);
        syn::Assign as{var(a->lhs, s.pos), exp(a->exp, s.pos)};
        at(l).kind = std::move(as);
      } else if (auto* r = std::get_if<ast::Return>(&s.kind)) {
        at(l).kind = syn::Return{var(r->var, s.pos)};
      } else if (auto* t = std::get_if<ast::Throw>(&s.kind)) {
        at(l).kind = syn::Throw{var(t->var, s.pos)};
      } else {
        const auto& tr = std::get<ast::Try>(s.kind);
        std::vector<Label> inner = enclosing;
        inner.insert(inner.begin(), l);
        syn::Try node;
        node.catchClass = sym(tr.catchClass);
        node.catchVar = sym(tr.catchVar);
        node.body = label_block(tr.body, id, inner);
        node.popHandler = fresh(id, s.pos, enclosing);
        at(node.popHandler).kind = syn::PopHandler{l};
        node.handler = label_block(tr.handler, id, enclosing);
        node.handlerHead = node.handler.front();
        at(l).kind = std::move(node);
      }
    }
    return out;
  }

  Stmt& at(Label l) { return lp_.stmts_[static_cast<std::size_t>(l)]; }

  void link(const std::vector<Label>& block, std::optional<Label> follow) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      std::optional<Label> next =
          i + 1 < block.size() ? std::optional<Label>(block[i + 1]) : follow;
      Stmt& s = at(block[i]);
      if (s.is_return() || s.is_throw()) continue;
      if (auto* t = std::get_if<syn::Try>(&s.kind)) {
        std::vector<Label> body = t->body;
        std::vector<Label> handler = t->handler;
        Label pop = t->popHandler;
        s.succ = body.empty() ? pop : body.front();
        link(body, pop);
        at(pop).succ = next;
        if (!next)
          fail("control can leave the try block at the end of '" +
                   method_name(s.method) + "' without return",
               s.pos);
        link(handler, next);
        continue;
      }
      if (!next)
        fail("control reaches the end of '" + method_name(s.method) +
                 "' without return or throw",
             s.pos);
      s.succ = next;
    }
  }

  std::string method_name(MethodId id) const {
    const Method& m = lp_.methods_[id];
    return lp_.symbols_.name(m.cls) + "." + lp_.symbols_.name(m.name);
  }

  void resolve_entry() {
    ast::MethodRef ref = src_.entry.value_or(ast::MethodRef{"Main", "main"});
    auto cls = lp_.symbols_.find(ref.cls);
    auto name = lp_.symbols_.find(ref.method);
    const Method* m = nullptr;
    if (cls && name && lp_.classes_.count(*cls)) {
      const auto& methods = lp_.classes_.at(*cls).methods;
      if (auto it = methods.find(*name); it != methods.end())
        m = &lp_.methods_[it->second];
    }
    if (!m) fail("entry method " + ref.cls + "." + ref.method + " not found");
    if (!m->params.empty()) fail("entry method must take no arguments");
    lp_.entry_ = m->id;
    for (Label l : m->labels)
      if (uses(lp_, lp_.stmts_[static_cast<std::size_t>(l)]).count(lp_.this_))
        fail("entry method runs without a receiver and cannot use 'this'",
             lp_.stmts_[static_cast<std::size_t>(l)].pos);
  }

  const ast::Program& src_;
  LabeledProgram lp_;
  std::map<std::string, const ast::ClassDecl*> declared_;
  std::set<Symbol> allFields_;
  std::set<Symbol> allMethods_;
  std::vector<const ast::MethodDecl*> srcMethods_;
  std::set<std::string> scope_;
};

}  // namespace detail

LabeledProgram elaborate(const ast::Program& p) {
  return detail::Elaborator(p).run();
}

LabeledProgram load_program(std::string_view source) {
  return elaborate(parse_program(source));
}

}  // namespace anfj
