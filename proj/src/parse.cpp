#include "cusp/parse.hpp"

#include <cctype>
#include <charconv>
#include <string>

namespace cusp {

namespace {

class Parser {
 public:
  Parser(const FieldCtx& ctx, std::string_view text) : ctx_(ctx), s_(text) {}

  QuadElem run() {
    QuadElem v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(s_.substr(pos_, 1)) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError,
                what + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  bool at_factor_start() {
    skip();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '(' || c == 'a' || s_.substr(pos_, 4) == "sqrt" ||
           s_.substr(pos_, 3) == "\xE2\x88\x9A";
  }

  QuadElem expr() {
    QuadElem v = term();
    for (;;) {
      if (eat("+")) {
        v += term();
      } else if (eat("-")) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  // '*', '/' and juxtaposition share one left-associative level, so
  // "1/6 sqrt 13" reads as (1/6)*sqrt(13).
  QuadElem term() {
    QuadElem v = unary();
    for (;;) {
      if (eat("*")) {
        v *= unary();
      } else if (eat("/")) {
        const QuadElem d = unary();
        if (d.is_zero()) throw Error(ErrorCode::DivisionByZero, "division by zero in \"" + std::string(s_) + "\"");
        v /= d;
      } else if (at_factor_start()) {
        v *= factor();
      } else {
        return v;
      }
    }
  }

  QuadElem unary() {
    if (eat("-")) return -unary();
    if (eat("+")) return unary();
    return factor();
  }

  mpz_class integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return mpz_class(std::string(s_.substr(start, pos_ - start)));
  }

  QuadElem root_of(const mpz_class& q) {
    if (q == 0) return QuadElem(ctx_);
    if (mpz_perfect_square_p(q.get_mpz_t())) return QuadElem(ctx_, mpq_class(sqrt(q)));
    const mpz_class n(static_cast<long>(ctx_.n()));
    if (q % n == 0) {
      const mpz_class c2 = q / n;
      if (mpz_perfect_square_p(c2.get_mpz_t())) return QuadElem::from_sqrt_form(ctx_, 0, mpq_class(sqrt(c2)));
    }
    throw Error(ErrorCode::CtxMismatch,
                "sqrt(" + q.get_str() + ") is not in Q(sqrt(" + std::to_string(ctx_.n()) + "))");
  }

  QuadElem factor() {
    skip();
    if (eat("(")) {
      QuadElem v = expr();
      if (!eat(")")) fail("expected ')'");
      return v;
    }
    if (eat("sqrt") || eat("\xE2\x88\x9A")) {
      skip();
      if (eat("(")) {
        const mpz_class q = integer();
        if (!eat(")")) fail("expected ')'");
        return root_of(q);
      }
      return root_of(integer());
    }
    if (eat("a")) return QuadElem::alpha(ctx_);
    return QuadElem(ctx_, mpq_class(integer()));
  }

  const FieldCtx& ctx_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::int64_t to_int(std::string_view t, std::string_view whole) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    throw Error(ErrorCode::ParseError, "bad range \"" + std::string(whole) + "\"");
  }
  return v;
}

}  // namespace

QuadElem parse_element(const FieldCtx& ctx, std::string_view text) { return Parser(ctx, text).run(); }

std::pair<std::int64_t, std::int64_t> parse_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const auto v = to_int(text, text);
    return {v, v};
  }
  const auto lo = to_int(text.substr(0, dots), text), hi = to_int(text.substr(dots + 2), text);
  if (hi < lo) throw Error(ErrorCode::ParseError, "empty range \"" + std::string(text) + "\"");
  return {lo, hi};
}

}  // namespace cusp
