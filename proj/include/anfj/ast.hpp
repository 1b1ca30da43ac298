#pragma once

// Source-level syntax tree for A-Normal Featherweight Java with exceptions.
// Every operand of an expression is a variable name; the parser rejects
// anything else.

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace anfj {

struct SourcePos {
  int line = 0;
  int column = 0;
};

namespace ast {

struct VarRef {
  std::string var;
};
struct FieldRef {
  std::string object;
  std::string field;
};
struct Invoke {
  std::string receiver;
  std::string method;
  std::vector<std::string> args;
};
struct New {
  std::string cls;
  std::vector<std::string> args;
};
struct Cast {
  std::string cls;
  std::string var;
};

using Exp = std::variant<VarRef, FieldRef, Invoke, New, Cast>;

struct Stmt;
using Block = std::vector<Stmt>;

struct Assign {
  std::string lhs;
  Exp exp;
};
struct Return {
  std::string var;
};
struct Throw {
  std::string var;
};
struct Try {
  Block body;
  std::string catchClass;
  std::string catchVar;
  Block handler;
};

struct Stmt {
  SourcePos pos;
  std::variant<Assign, Return, Throw, Try> kind;
};

struct TypedName {
  std::string type;
  std::string name;
};

struct ConstructorDecl {
  SourcePos pos;
  std::string cls;
  std::vector<TypedName> params;
  std::vector<std::string> superArgs;
  // this.field = param
  std::vector<std::pair<std::string, std::string>> assignments;
};

struct MethodDecl {
  SourcePos pos;
  std::string returnClass;
  std::string name;
  std::vector<TypedName> params;
  std::vector<TypedName> locals;
  Block body;
};

struct ClassDecl {
  SourcePos pos;
  std::string name;
  std::string parent;
  std::vector<TypedName> fields;
  ConstructorDecl konst;
  std::vector<MethodDecl> methods;
};

struct MethodRef {
  std::string cls;
  std::string method;
};

struct Program {
  std::vector<ClassDecl> classes;
  // Absent means the `Main.main` convention.
  std::optional<MethodRef> entry;
};

}  // namespace ast
}  // namespace anfj
