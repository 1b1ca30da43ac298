#pragma once

// Elaborated, labeled ANFJ programs: interned names, flattened statements
// indexed by label, successor function, class table and liveness.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "anfj/ast.hpp"

namespace anfj {

using Label = std::int32_t;
inline constexpr Label kNoLabel = -1;

/// Interned identifier (class, field, method or variable name).
struct Symbol {
  std::uint32_t id = 0;
  auto operator<=>(const Symbol&) const = default;
};

class SymbolTable {
 public:
  Symbol intern(std::string_view name);
  std::optional<Symbol> find(std::string_view name) const;
  const std::string& name(Symbol s) const { return names_.at(s.id); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

using MethodId = std::uint32_t;

namespace detail {
class Elaborator;
}

namespace syn {

struct VarRef {
  Symbol var;
};
struct FieldRef {
  Symbol object;
  Symbol field;
};
struct Invoke {
  Symbol receiver;
  Symbol method;
  std::vector<Symbol> args;
};
struct New {
  Symbol cls;
  std::vector<Symbol> args;
};
struct Cast {
  Symbol cls;
  Symbol var;
};
using Exp = std::variant<VarRef, FieldRef, Invoke, New, Cast>;

struct Assign {
  Symbol lhs;
  Exp exp;
};
struct Return {
  Symbol var;
};
struct Throw {
  Symbol var;
};
struct Try {
  Symbol catchClass;
  Symbol catchVar;
  Label handlerHead = kNoLabel;
  Label popHandler = kNoLabel;
  std::vector<Label> body;     // direct children, in order
  std::vector<Label> handler;  // direct children, in order
};
/// Inserted by elaboration after the last statement of every try body.
struct PopHandler {
  Label tryLabel = kNoLabel;
};

}  // namespace syn

struct Stmt {
  Label label = kNoLabel;
  MethodId method = 0;
  SourcePos pos;
  std::variant<syn::Assign, syn::Return, syn::Throw, syn::Try, syn::PopHandler>
      kind;
  std::optional<Label> succ;
  // Innermost first: try statements whose body lexically contains this one.
  std::vector<Label> enclosingTries;

  bool is_return() const { return std::holds_alternative<syn::Return>(kind); }
  bool is_throw() const { return std::holds_alternative<syn::Throw>(kind); }
  const syn::Invoke* as_invoke() const;
};

struct Constructor {
  std::vector<Symbol> params;
  std::vector<Symbol> superArgs;
  std::vector<std::pair<Symbol, Symbol>> assignments;  // field <- param
};

struct ClassInfo {
  Symbol name;
  std::optional<Symbol> parent;  // empty only for Object
  std::vector<Symbol> fields;    // inherited first, declaration order
  std::vector<Symbol> ownFields;
  Constructor konst;
  std::map<Symbol, MethodId> methods;  // declared in this class only
};

struct Method {
  MethodId id = 0;
  Symbol cls;
  Symbol name;
  std::vector<Symbol> params;
  std::vector<Symbol> locals;  // declared locals plus catch variables
  Label entry = kNoLabel;
  std::vector<Label> labels;   // every statement of the body, label order
};

class LabeledProgram {
 public:
  const SymbolTable& symbols() const { return symbols_; }
  const std::string& name(Symbol s) const { return symbols_.name(s); }
  std::optional<Symbol> symbol(std::string_view s) const { return symbols_.find(s); }

  Symbol this_symbol() const { return this_; }
  Symbol object_symbol() const { return object_; }

  std::size_t num_labels() const { return stmts_.size(); }
  const Stmt& stmt(Label l) const;
  const std::vector<Stmt>& statements() const { return stmts_; }
  const std::vector<Method>& methods() const { return methods_; }
  const Method& method(MethodId id) const { return methods_.at(id); }
  const Method& method_of(Label l) const { return method(stmt(l).method); }
  const Method& entry() const { return methods_.at(entry_); }
  const std::map<Symbol, ClassInfo>& classes() const { return classes_; }

  /// The statement that follows `l`, or nullptr for return/throw.
  /// Throws LookupError for unknown labels.
  const Stmt* succ(Label l) const;

  /// Flattened fields and constructor of `cls`. Throws LookupError.
  const ClassInfo& class_lookup(Symbol cls) const;
  const ClassInfo& class_lookup(std::string_view cls) const;

  /// Most-derived declaration of `m` on the superclass chain of `receiver`.
  const Method& method_lookup(Symbol receiver, Symbol m) const;
  const Method* find_method(Symbol receiver, Symbol m) const;

  /// Reflexive-transitive `extends`.
  bool subtype(Symbol sub, Symbol super) const;

  const std::set<Symbol>& lives(Label l) const { return lives_.at(l); }

  /// Invoke label whose successor is `returnLabel` (the call site a call
  /// frame returns from), or kNoLabel.
  Label call_site_returning_to(Label returnLabel) const;

  /// Every label of a throw statement, ascending.
  std::vector<Label> throw_labels() const;

  std::string describe(Label l) const;

 private:
  friend class detail::Elaborator;

  SymbolTable symbols_;
  Symbol this_;
  Symbol object_;
  std::vector<Stmt> stmts_;
  std::vector<Method> methods_;
  std::map<Symbol, ClassInfo> classes_;
  std::vector<std::set<Symbol>> lives_;
  std::map<Label, Label> callSiteByReturn_;
  MethodId entry_ = 0;
};

/// Labels statements in program order, inserts pophandlers, builds the
/// successor map and class table, checks names, and computes liveness.
/// Throws ElaborationError.
LabeledProgram elaborate(const ast::Program& p);

/// Backward may-liveness over one method's flow graph. Statements inside a
/// try body also flow to the handler head (minus the catch variable).
std::map<Label, std::set<Symbol>> compute_liveness(const LabeledProgram& lp,
                                                   const Method& m);

/// Variables read and written by a statement.
std::set<Symbol> uses(const LabeledProgram& lp, const Stmt& s);
std::optional<Symbol> defines(const Stmt& s);

/// Parse + elaborate.
LabeledProgram load_program(std::string_view source);

}  // namespace anfj
