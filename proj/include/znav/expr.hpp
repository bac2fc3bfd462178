#pragma once

#include <cctype>
#include <charconv>
#include <clocale>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace znav::expr {

enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Conj, Abs2, Abs, Re, Im, Sqrt, Exp, Log };
enum class Arity { Scalar, VectorComponent, MatrixEntry };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::Number;
  cplx value{};       // Number
  int var = 0;        // Variable, 0-based
  int exponent = 0;   // Pow
  Func func = Func::Conj;
  NodePtr lhs, rhs;   // unary ops use lhs
};

struct FieldExpr {
  NodePtr root;
  int max_var = -1;  // highest variable index referenced
  Arity arity = Arity::Scalar;
};

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Conj: return "conj";
    case Func::Abs2: return "abs2";
    case Func::Abs: return "abs";
    case Func::Re: return "re";
    case Func::Im: return "im";
    case Func::Sqrt: return "sqrt";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
  }
  return "?";
}

namespace detail {

inline NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  FieldExpr run() {
    if (src_.find_first_not_of(" \t\r\n") == std::string_view::npos)
      fail({"expression"});
    FieldExpr fe;
    fe.root = expression();
    skip_ws();
    if (pos_ < src_.size()) fail({"operator", "end of input"});
    fe.max_var = max_var_;
    return fe;
  }

 private:
  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
  int max_var_ = -1;

  [[noreturn]] void fail(std::set<std::string> expected) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
    std::string msg = "line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": expected ";
    bool first = true;
    for (const auto& e : expected) {
      msg += (first ? "" : " | ") + e;
      first = false;
    }
    if (pos_ < src_.size()) msg += ", found '" + std::string(1, src_[pos_]) + "'";
    else msg += ", found end of input";
    throw ParseError(msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  NodePtr expression() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Kind::Add, n, term());
      else if (accept('-')) n = make(Kind::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Kind::Mul, n, unary());
      else if (accept('/')) n = make(Kind::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    skip_ws();
    bool neg = false;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) neg = src_[pos_++] == '-';
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == start) fail({"integer exponent"});
    int e = 0;
    std::from_chars(src_.data() + start, src_.data() + pos_, e);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pow;
    n->lhs = base;
    n->exponent = neg ? -e : e;
    return n;
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
      pos_ = start;
      fail({"number"});
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = v;
    // "2.5i" is an imaginary literal
    if (pos_ < src_.size() && src_[pos_] == 'i' &&
        (pos_ + 1 >= src_.size() || !std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])))) {
      ++pos_;
      n->value = cplx(0.0, v);
    }
    return n;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "variable", "function", "'('"});
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      NodePtr n = expression();
      if (!accept(')')) fail({"')'"});
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string id(src_.substr(start, pos_ - start));
      if (id == "i") {
        auto n = std::make_shared<Node>();
        n->value = I;
        return n;
      }
      if (id == "pi") {
        auto n = std::make_shared<Node>();
        n->value = std::numbers::pi;
        return n;
      }
      if (id.size() > 1 && id[0] == 'z' &&
          id.find_first_not_of("0123456789", 1) == std::string::npos && id[1] != '0') {
        const int k = std::stoi(id.substr(1)) - 1;
        if (dim_ > 0 && k >= dim_) {
          pos_ = start;
          fail({"variable z1..z" + std::to_string(dim_)});
        }
        max_var_ = std::max(max_var_, k);
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->var = k;
        return n;
      }
      static const std::pair<const char*, Func> funcs[] = {
          {"conj", Func::Conj}, {"abs2", Func::Abs2}, {"abs", Func::Abs}, {"re", Func::Re},
          {"im", Func::Im},     {"sqrt", Func::Sqrt}, {"exp", Func::Exp}, {"log", Func::Log}};
      for (const auto& [name, f] : funcs) {
        if (id == name) {
          if (!accept('(')) fail({"'('"});
          auto n = std::make_shared<Node>();
          n->kind = Kind::Call;
          n->func = f;
          n->lhs = expression();
          if (!accept(')')) fail({"')'"});
          return n;
        }
      }
      pos_ = start;
      fail({"variable", "function", "'i'", "'pi'"});
    }
    fail({"number", "variable", "function", "'('"});
  }
};

inline bool on_branch_cut(cplx x) {
  return x.real() <= 0.0 && std::abs(x.imag()) <= 1e-14 * std::max(1.0, std::abs(x.real()));
}

inline cplx eval_node(const Node& n, const Vec& z) {
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Variable:
      if (n.var >= z.size()) throw DomainError("variable z" + std::to_string(n.var + 1) +
                                               " not available at a point of dimension " +
                                               std::to_string(z.size()));
      return z(n.var);
    case Kind::Negate: return -eval_node(*n.lhs, z);
    case Kind::Add: return eval_node(*n.lhs, z) + eval_node(*n.rhs, z);
    case Kind::Sub: return eval_node(*n.lhs, z) - eval_node(*n.rhs, z);
    case Kind::Mul: return eval_node(*n.lhs, z) * eval_node(*n.rhs, z);
    case Kind::Div: {
      const cplx d = eval_node(*n.rhs, z);
      if (std::abs(d) < 1e-14) throw DomainError("division by a vanishing denominator");
      return eval_node(*n.lhs, z) / d;
    }
    case Kind::Pow: {
      const cplx b = eval_node(*n.lhs, z);
      if (n.exponent < 0 && std::abs(b) < 1e-14)
        throw DomainError("negative power of a vanishing base");
      cplx r = 1.0;
      for (int k = 0; k < std::abs(n.exponent); ++k) r *= b;
      return n.exponent < 0 ? 1.0 / r : r;
    }
    case Kind::Call: {
      const cplx x = eval_node(*n.lhs, z);
      switch (n.func) {
        case Func::Conj: return std::conj(x);
        case Func::Abs2: return std::norm(x);
        case Func::Abs: return std::abs(x);
        case Func::Re: return x.real();
        case Func::Im: return x.imag();
        case Func::Exp: return std::exp(x);
        case Func::Sqrt:
          if (x.real() < 0.0 && on_branch_cut(x)) throw DomainError("sqrt argument on the branch cut");
          return std::sqrt(x);
        case Func::Log:
          if (on_branch_cut(x)) throw DomainError("log argument on the branch cut or zero");
          return std::log(x);
      }
    }
  }
  throw DomainError("malformed expression node");
}

inline int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Negate: return 3;
    case Kind::Pow: return 4;
    case Kind::Number:
      return (n.value.real() != 0.0 && n.value.imag() != 0.0) ? 1 : 5;
    default: return 5;
  }
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // locale-proofing: printf may emit ',' under some locales
  for (auto& ch : s)
    if (ch == ',') ch = '.';
  return s;
}

inline std::string print_node(const Node& n) {
  auto wrap = [](const Node& c, bool paren) {
    return paren ? "(" + print_node(c) + ")" : print_node(c);
  };
  switch (n.kind) {
    case Kind::Number: {
      const double re = n.value.real(), im = n.value.imag();
      if (im == 0.0) return fmt_double(re);
      if (re == 0.0) return fmt_double(im) + "i";
      return fmt_double(re) + "+" + fmt_double(im) + "i";
    }
    case Kind::Variable: return "z" + std::to_string(n.var + 1);
    case Kind::Negate: return "-" + wrap(*n.lhs, precedence(*n.lhs) < 3);
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const int p = precedence(n);
      const char* op = n.kind == Kind::Add ? "+" : n.kind == Kind::Sub ? "-"
                     : n.kind == Kind::Mul ? "*" : "/";
      return wrap(*n.lhs, precedence(*n.lhs) < p) + op + wrap(*n.rhs, precedence(*n.rhs) <= p);
    }
    case Kind::Pow: return wrap(*n.lhs, precedence(*n.lhs) < 5) + "^" + std::to_string(n.exponent);
    case Kind::Call: return std::string(func_name(n.func)) + "(" + print_node(*n.lhs) + ")";
  }
  return "?";
}

inline bool same_node(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Number: return a.value == b.value;
    case Kind::Variable: return a.var == b.var;
    case Kind::Pow: return a.exponent == b.exponent && same_node(*a.lhs, *b.lhs);
    case Kind::Call: return a.func == b.func && same_node(*a.lhs, *b.lhs);
    case Kind::Negate: return same_node(*a.lhs, *b.lhs);
    default: return same_node(*a.lhs, *b.lhs) && same_node(*a.rhs, *b.rhs);
  }
}

}  // namespace detail

// dim <= 0 accepts any variable index.
inline FieldExpr parse_field(std::string_view src, int dim = 0) {
  return detail::Parser(src, dim).run();
}

inline cplx eval_field(const FieldExpr& e, const Vec& z) {
  if (!e.root) throw ValidationError("empty expression");
  const cplx v = detail::eval_node(*e.root, z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw DomainError("expression evaluated to a non-finite value");
  return v;
}

inline std::string print_field(const FieldExpr& e) {
  return e.root ? detail::print_node(*e.root) : std::string();
}

inline bool same_ast(const FieldExpr& a, const FieldExpr& b) {
  if (!a.root || !b.root) return a.root == b.root;
  return detail::same_node(*a.root, *b.root);
}

}  // namespace znav::expr
