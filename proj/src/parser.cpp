#include "anfj/parser.hpp"

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "anfj/errors.hpp"

namespace anfj {
namespace {

enum class Tok { Ident, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kw = {
      "class", "extends", "super", "return", "throw",
      "try",   "catch",   "new",   "entry"};
  return kw.count(s) != 0;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      SourcePos start{line, col};
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/'))
        advance(1);
      if (i + 1 >= src.size()) throw SyntaxError("unterminated comment", start);
      advance(2);
      continue;
    }
    SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_' || src[j] == '$'))
        ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::string_view("{}();,.=").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), pos});
      advance(1);
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ast::Program program() {
    ast::Program p;
    std::set<std::string> names;
    while (!at_end()) {
      if (peek_is("entry")) {
        if (p.entry) throw SyntaxError("duplicate entry declaration", peek().pos);
        next();
        ast::MethodRef ref;
        ref.cls = ident("class name");
        expect(".");
        ref.method = ident("method name");
        expect(";");
        p.entry = ref;
        continue;
      }
      auto cls = class_decl();
      if (!names.insert(cls.name).second)
        throw SyntaxError("duplicate class '" + cls.name + "'", cls.pos);
      p.classes.push_back(std::move(cls));
    }
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool peek_is(std::string_view text, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind != Tok::End && t.text == text;
  }
  bool peek_ident(std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind == Tok::Ident && !is_keyword(t.text);
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    const auto& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError("expected " + what + ", found " + found, t.pos);
  }

  void expect(std::string_view text) {
    if (!peek_is(text)) fail("'" + std::string(text) + "'");
    next();
  }

  std::string ident(const char* what) {
    if (!peek_ident()) fail(what);
    return next().text;
  }

  ast::ClassDecl class_decl() {
    ast::ClassDecl c;
    c.pos = peek().pos;
    expect("class");
    c.name = ident("class name");
    expect("extends");
    c.parent = ident("superclass name");
    expect("{");
    bool have_ctor = false;
    while (!peek_is("}")) {
      if (at_end()) fail("'}'");
      // Type name ; | Name ( | Type name (
      if (peek_ident() && peek_is("(", 1)) {
        if (have_ctor) throw SyntaxError("duplicate constructor", peek().pos);
        c.konst = constructor(c.name);
        have_ctor = true;
      } else if (peek_ident() && peek_ident(1) && peek_is(";", 2)) {
        if (have_ctor || !c.methods.empty())
          throw SyntaxError("field declarations must precede the constructor",
                            peek().pos);
        ast::TypedName f;
        f.type = next().text;
        f.name = next().text;
        next();
        c.fields.push_back(f);
      } else if (peek_ident() && peek_ident(1) && peek_is("(", 2)) {
        if (!have_ctor)
          throw SyntaxError("constructor must precede methods", peek().pos);
        c.methods.push_back(method());
      } else {
        fail("field, constructor or method declaration");
      }
    }
    expect("}");
    if (!have_ctor)
      throw SyntaxError("class '" + c.name + "' has no constructor", c.pos);
    return c;
  }

  std::vector<ast::TypedName> params() {
    std::vector<ast::TypedName> ps;
    expect("(");
    if (!peek_is(")")) {
      for (;;) {
        ast::TypedName p;
        p.type = ident("parameter type");
        p.name = ident("parameter name");
        ps.push_back(p);
        if (peek_is(",")) {
          next();
          continue;
        }
        break;
      }
    }
    expect(")");
    return ps;
  }

  ast::ConstructorDecl constructor(const std::string& cls) {
    ast::ConstructorDecl k;
    k.pos = peek().pos;
    k.cls = ident("constructor name");
    if (k.cls != cls)
      throw SyntaxError("constructor name '" + k.cls +
                            "' does not match class '" + cls + "'",
                        k.pos);
    k.params = params();
    expect("{");
    expect("super");
    k.superArgs = atomic_args();
    expect(";");
    while (peek_is("this")) {
      next();
      expect(".");
      std::string field = ident("field name");
      expect("=");
      std::string value = ident("constructor parameter");
      expect(";");
      k.assignments.emplace_back(field, value);
    }
    expect("}");
    return k;
  }

  ast::MethodDecl method() {
    ast::MethodDecl m;
    m.pos = peek().pos;
    m.returnClass = ident("return type");
    m.name = ident("method name");
    m.params = params();
    expect("{");
    while (peek_ident() && peek_ident(1) && peek_is(";", 2)) {
      ast::TypedName l;
      l.type = next().text;
      l.name = next().text;
      next();
      m.locals.push_back(l);
    }
    while (!peek_is("}")) {
      if (at_end()) fail("'}'");
      m.body.push_back(stmt());
    }
    expect("}");
    if (m.body.empty())
      throw SyntaxError("method '" + m.name + "' has an empty body", m.pos);
    return m;
  }

  ast::Block block() {
    ast::Block b;
    expect("{");
    while (!peek_is("}")) {
      if (at_end()) fail("'}'");
      b.push_back(stmt());
    }
    expect("}");
    return b;
  }

  ast::Stmt stmt() {
    ast::Stmt s;
    s.pos = peek().pos;
    if (peek_is("return")) {
      next();
      s.kind = ast::Return{ident("variable")};
      expect(";");
    } else if (peek_is("throw")) {
      next();
      s.kind = ast::Throw{ident("variable")};
      expect(";");
    } else if (peek_is("try")) {
      next();
      ast::Try t;
      t.body = block();
      expect("catch");
      expect("(");
      t.catchClass = ident("exception class");
      t.catchVar = ident("catch variable");
      expect(")");
      SourcePos hpos = peek().pos;
      t.handler = block();
      if (t.handler.empty()) throw SyntaxError("empty catch block", hpos);
      s.kind = std::move(t);
    } else if (peek_ident() && peek_is("=", 1)) {
      std::string lhs = next().text;
      next();
      s.kind = ast::Assign{lhs, exp()};
      expect(";");
    } else {
      fail("statement");
    }
    return s;
  }

  // `(` args `)` where every argument must be a bare variable.
  std::vector<std::string> atomic_args() {
    std::vector<std::string> args;
    expect("(");
    if (!peek_is(")")) {
      for (;;) {
        SourcePos p = peek().pos;
        bool atomic = peek_ident() && (peek_is(",", 1) || peek_is(")", 1));
        if (!atomic) {
          if (peek_ident() || peek_is("new") || peek_is("("))
            throw SyntaxError("non-atomic argument", p);
          fail("argument variable");
        }
        args.push_back(next().text);
        if (peek_is(",")) {
          next();
          continue;
        }
        break;
      }
    }
    expect(")");
    return args;
  }

  ast::Exp exp() {
    if (peek_is("new")) {
      next();
      std::string cls = ident("class name");
      return ast::New{cls, atomic_args()};
    }
    if (peek_is("(")) {
      next();
      std::string cls = ident("class name");
      expect(")");
      SourcePos p = peek().pos;
      if (!peek_ident()) {
        if (peek_is("new") || peek_is("(")) throw SyntaxError("non-atomic operand", p);
        fail("variable");
      }
      std::string v = next().text;
      if (peek_is(".")) throw SyntaxError("non-atomic operand", p);
      return ast::Cast{cls, v};
    }
    std::string v = ident("expression");
    if (!peek_is(".")) return ast::VarRef{v};
    next();
    std::string member = ident("field or method name");
    if (peek_is("(")) return ast::Invoke{v, member, atomic_args()};
    if (peek_is(".")) throw SyntaxError("non-atomic operand", peek().pos);
    return ast::FieldRef{v, member};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ast::Program parse_program(std::string_view source) {
  return Parser(lex(source)).program();
}

}  // namespace anfj
