#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>

#include "randcrn/netcore.hpp"

namespace randcrn {

// Evaluates an arithmetic expression in the variable n, e.g. "0.5*n^-3.5" or
// "(log(n)+2)/n^3". Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('+'|'-') unary | power
//   power  := atom ('^' unary)?        right associative, binds tighter than unary minus
//   atom   := number | 'n' | func '(' expr ')' | '(' expr ')'
// Functions: log/ln (natural), log2, log10, exp, sqrt.
class ExprEvaluator {
 public:
  ExprEvaluator(std::string_view text, double n) : s_(text), n_(n) {}

  double evaluate() {
    double v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("invalid expression '" + std::string(s_) + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  double power() {
    double base = atom();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }
  double atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      double v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string rest(s_.substr(pos_));
      char* end = nullptr;
      double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      auto name = s_.substr(start, pos_ - start);
      if (name == "n") return n_;
      if (name == "e") return std::exp(1.0);
      if (!eat('(')) fail("unknown identifier '" + std::string(name) + "'");
      double a = expr();
      if (!eat(')')) fail("expected ')'");
      if (name == "log" || name == "ln") return std::log(a);
      if (name == "log2") return std::log2(a);
      if (name == "log10") return std::log10(a);
      if (name == "exp") return std::exp(a);
      if (name == "sqrt") return std::sqrt(a);
      fail("unknown function '" + std::string(name) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  double n_;
  std::size_t pos_ = 0;
};

inline double eval_expr(std::string_view text, double n) { return ExprEvaluator(text, n).evaluate(); }

// Evaluates a p expression and checks it lands in [0, 1].
inline double eval_probability(std::string_view text, std::size_t n) {
  double p = eval_expr(text, static_cast<double>(n));
  if (!(p >= 0.0 && p <= 1.0))
    throw Error("expression '" + std::string(text) + "' evaluates to " + std::to_string(p) +
                " at n=" + std::to_string(n) + ", outside [0,1]");
  return p;
}

}  // namespace randcrn
