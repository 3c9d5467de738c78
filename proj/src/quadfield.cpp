#include "cusp/quadfield.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace cusp {

bool is_squarefree(std::int64_t n) {
  if (n < 1) return false;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
  }
  return true;
}

FieldCtx FieldCtx::make(std::int64_t n) {
  if (n < 2) throw Error(ErrorCode::TooSmall, "n must be at least 2, got " + std::to_string(n));
  if (!is_squarefree(n)) {
    throw Error(ErrorCode::NotSquarefree, std::to_string(n) + " is divisible by a square");
  }
  return FieldCtx(n, n % 4 == 1 ? AlphaKind::HalfPlusSqrt : AlphaKind::Sqrt);
}

mpz_class FieldCtx::alpha_sq_const() const {
  return kind_ == AlphaKind::Sqrt ? mpz_class(n_) : mpz_class((n_ - 1) / 4);
}

mpz_class FieldCtx::covolume_squared() const {
  return kind_ == AlphaKind::Sqrt ? mpz_class(4 * n_) : mpz_class(n_);
}

QuadElem::QuadElem(const FieldCtx& ctx, mpq_class a, mpq_class b)
    : ctx_(ctx), a_(std::move(a)), b_(std::move(b)) {
  a_.canonicalize();
  b_.canonicalize();
}

QuadElem QuadElem::from_sqrt_form(const FieldCtx& ctx, const mpq_class& p, const mpq_class& q) {
  if (ctx.kind() == AlphaKind::Sqrt) return QuadElem(ctx, p, q);
  // sqrt(n) = 2*alpha - 1
  return QuadElem(ctx, p - q, 2 * q);
}

bool QuadElem::is_integral() const {
  return a_.get_den() == 1 && b_.get_den() == 1;
}

std::pair<mpq_class, mpq_class> QuadElem::sqrt_form() const {
  if (ctx_.kind() == AlphaKind::Sqrt) return {a_, b_};
  mpq_class half_b = b_ / 2;
  return {a_ + half_b, half_b};
}

void QuadElem::require_same(const QuadElem& o) const {
  if (!(ctx_ == o.ctx_)) {
    throw Error(ErrorCode::CtxMismatch, "Q(sqrt " + std::to_string(ctx_.n()) + ") vs Q(sqrt " +
                                            std::to_string(o.ctx_.n()) + ")");
  }
}

QuadElem QuadElem::operator-() const { return QuadElem(ctx_, -a_, -b_); }

QuadElem& QuadElem::operator+=(const QuadElem& o) {
  require_same(o);
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QuadElem& QuadElem::operator-=(const QuadElem& o) {
  require_same(o);
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QuadElem& QuadElem::operator*=(const QuadElem& o) {
  require_same(o);
  // (a + b alpha)(c + d alpha) with alpha^2 = s + t alpha
  const mpq_class bd = b_ * o.b_;
  mpq_class na = a_ * o.a_ + bd * mpq_class(ctx_.alpha_sq_const());
  mpq_class nb = a_ * o.b_ + b_ * o.a_;
  if (ctx_.alpha_sq_linear() != 0) nb += bd;
  a_ = std::move(na);
  b_ = std::move(nb);
  return *this;
}

QuadElem& QuadElem::operator/=(const QuadElem& o) {
  require_same(o);
  return *this *= inverse(o);
}

QuadElem& QuadElem::operator*=(const mpq_class& q) {
  a_ *= q;
  b_ *= q;
  return *this;
}

QuadElem conjugate(const QuadElem& z) {
  if (z.ctx().kind() == AlphaKind::Sqrt) return QuadElem(z.ctx(), z.a(), -z.b());
  // sigma(alpha) = 1 - alpha
  return QuadElem(z.ctx(), z.a() + z.b(), -z.b());
}

mpq_class norm(const QuadElem& z) {
  const auto& a = z.a();
  const auto& b = z.b();
  if (z.ctx().kind() == AlphaKind::Sqrt) return a * a - mpq_class(z.ctx().n()) * b * b;
  return a * a + a * b - mpq_class(z.ctx().alpha_sq_const()) * b * b;
}

mpq_class trace(const QuadElem& z) {
  if (z.ctx().kind() == AlphaKind::Sqrt) return 2 * z.a();
  return 2 * z.a() + z.b();
}

QuadElem inverse(const QuadElem& z) {
  mpq_class nz = norm(z);
  if (sgn(nz) == 0) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
  QuadElem c = conjugate(z);
  c *= mpq_class(1) / nz;
  return c;
}

QuadElem pow(const QuadElem& z, int e) {
  if (e < 0) return pow(inverse(z), -e);
  QuadElem result(z.ctx(), 1, 0);
  QuadElem base = z;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

int sign(const QuadElem& z) {
  auto [p, q] = z.sqrt_form();
  const int sp = sgn(p);
  const int sq = sgn(q);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  // opposite signs: compare p^2 against q^2 n
  mpq_class lhs = p * p;
  mpq_class rhs = q * q * mpq_class(z.ctx().n());
  // cmp only promises the sign of its result
  const int c = (cmp(lhs, rhs) > 0) - (cmp(lhs, rhs) < 0);
  return sp > 0 ? c : -c;
}

QuadElem canonical_positive(const QuadElem& z) { return sign(z) < 0 ? -z : z; }
QuadElem abs(const QuadElem& z) { return canonical_positive(z); }

mpz_class floor(const QuadElem& z) {
  auto [p, q] = z.sqrt_form();
  mpz_class den;
  mpz_lcm(den.get_mpz_t(), p.get_den_mpz_t(), q.get_den_mpz_t());
  mpz_class num_p = p.get_num() * (den / p.get_den());
  mpz_class num_q = q.get_num() * (den / q.get_den());
  // q*sqrt(n)*den = num_q*sqrt(n); its floor is within one of +-isqrt(num_q^2 n)
  mpz_class r = sqrt(mpz_class(num_q * num_q * z.ctx().n()));
  if (num_q < 0) r = -r - 1;
  mpz_class guess;
  mpz_fdiv_q(guess.get_mpz_t(), mpz_class(num_p + r).get_mpz_t(), den.get_mpz_t());
  auto ge = [&](const mpz_class& t) { return sign(z - QuadElem(z.ctx(), mpq_class(t), 0)) >= 0; };
  while (!ge(guess)) guess -= 1;
  while (ge(guess + 1)) guess += 1;
  return guess;
}

mpz_class round_nearest(const QuadElem& z) {
  return floor(z + QuadElem(z.ctx(), mpq_class(1, 2), 0));
}

namespace {

mpz_class ceil_abs(const mpq_class& q) {
  mpz_class r;
  mpz_class num = abs(q.get_num());
  mpz_cdiv_q(r.get_mpz_t(), num.get_mpz_t(), q.get_den_mpz_t());
  return r;
}

mp_bitcnt_t working_bits(const QuadElem& z, int digits) {
  auto [p, q] = z.sqrt_form();
  size_t size = std::max({mpz_sizeinbase(p.get_num_mpz_t(), 2), mpz_sizeinbase(p.get_den_mpz_t(), 2),
                          mpz_sizeinbase(q.get_num_mpz_t(), 2), mpz_sizeinbase(q.get_den_mpz_t(), 2)});
  return static_cast<mp_bitcnt_t>(std::ceil(digits * 3.3219280948873623) + 64 + 2 * size);
}

}  // namespace

mpz_class max_abs_coeff(const QuadElem& z) {
  return std::max(ceil_abs(z.a()), ceil_abs(z.b()));
}

EmbeddedPair embed(const QuadElem& z, int digits) {
  if (digits < 1) throw Error(ErrorCode::InvalidLevel, "embed needs at least one digit");
  const mp_bitcnt_t bits = working_bits(z, digits);
  auto [p, q] = z.sqrt_form();
  mpf_class root(z.ctx().n(), bits);
  root = sqrt(root);
  mpf_class pf(p, bits);
  mpf_class qf(q, bits);
  mpf_class first(pf + qf * root, bits);
  mpf_class second(pf - qf * root, bits);
  return EmbeddedPair{first, second, digits};
}

std::string to_decimal(const mpf_class& x, int digits) {
  std::vector<char> buf(static_cast<size_t>(digits) + 64);
  int len = gmp_snprintf(buf.data(), buf.size(), "%.*Fg", digits, x.get_mpf_t());
  if (len >= static_cast<int>(buf.size())) {
    buf.resize(static_cast<size_t>(len) + 1);
    gmp_snprintf(buf.data(), buf.size(), "%.*Fg", digits, x.get_mpf_t());
  }
  return std::string(buf.data());
}

double to_double(const QuadElem& z) {
  if (z.b() == 0) return z.a().get_d();
  return embed(z, 20).first.get_d();
}

namespace {

std::string render_pair(const mpq_class& p, const mpq_class& q, const std::string& symbol) {
  mpz_class den;
  mpz_lcm(den.get_mpz_t(), p.get_den_mpz_t(), q.get_den_mpz_t());
  const mpz_class P = p.get_num() * (den / p.get_den());
  const mpz_class Q = q.get_num() * (den / q.get_den());
  std::string body;
  if (P != 0) body = P.get_str();
  if (Q != 0) {
    if (Q > 0 && !body.empty()) body += "+";
    if (Q == 1) {
      body += symbol;
    } else if (Q == -1) {
      body += "-" + symbol;
    } else {
      body += Q.get_str() + symbol;
    }
  }
  if (body.empty()) return "0";
  if (den == 1) return body;
  if (P != 0 && Q != 0) return "(" + body + ")/" + den.get_str();
  return body + "/" + den.get_str();
}

}  // namespace

std::string to_sqrt_string(const QuadElem& z) {
  auto [p, q] = z.sqrt_form();
  return render_pair(p, q, "√" + std::to_string(z.ctx().n()));
}

std::string to_alpha_string(const QuadElem& z) { return render_pair(z.a(), z.b(), "α"); }

std::string to_linear_string(const QuadElem& x, const QuadElem& base, const std::string& symbol) {
  if (sgn(base.b()) == 0) throw Error(ErrorCode::InternalError, "basis element must be irrational");
  mpq_class q = x.b() / base.b();
  mpq_class p = x.a() - q * base.a();
  return render_pair(p, q, symbol);
}

// --- fundamental unit ------------------------------------------------------

namespace {

bool is_unit_above_one(const QuadElem& u) {
  mpq_class nu = norm(u);
  if (!(nu == 1 || nu == -1)) return false;
  return sign(u - QuadElem(u.ctx(), 1, 0)) > 0;
}

}  // namespace

QuadElem fundamental_unit(const FieldCtx& ctx, const UnitOptions& opts) {
  const QuadElem alpha = QuadElem::alpha(ctx);
  // u = p - q*sigma(alpha) is a unit whenever p/q is a good enough convergent
  // of alpha; the first such unit above 1 is the fundamental one.
  const QuadElem neg_sigma_alpha = -conjugate(alpha);

  QuadElem xi = alpha;
  std::vector<QuadElem> seen;
  std::optional<std::size_t> period_start;
  std::size_t period_len = 0;

  mpz_class p_prev = 1, p_prev2 = 0;
  mpz_class q_prev = 0, q_prev2 = 1;

  for (std::size_t k = 0;; ++k) {
    const mpz_class partial = floor(xi);
    mpz_class p = partial * p_prev + p_prev2;
    mpz_class q = partial * q_prev + q_prev2;
    if (mpz_sizeinbase(p.get_mpz_t(), 2) > opts.bit_budget) {
      throw Error(ErrorCode::InternalOverflow,
                  "convergents exceeded " + std::to_string(opts.bit_budget) + " bits");
    }
    QuadElem u = QuadElem(ctx, mpq_class(p), 0) + neg_sigma_alpha * mpq_class(q);
    if (is_unit_above_one(u)) {
      if (ctx.n() < opts.verify_below) {
        QuadElem check = brute_force_unit(ctx, max_abs_coeff(u));
        if (!(check == u)) {
          throw Error(ErrorCode::InternalError,
                      "continued fraction unit " + to_sqrt_string(u) + " disagrees with search " +
                          to_sqrt_string(check));
        }
      }
      return u;
    }
    p_prev2 = p_prev;
    p_prev = p;
    q_prev2 = q_prev;
    q_prev = q;

    xi = inverse(xi - QuadElem(ctx, mpq_class(partial), 0));
    if (!period_start) {
      for (std::size_t j = 0; j < seen.size(); ++j) {
        if (seen[j] == xi) {
          period_start = j;
          period_len = seen.size() - j;
          break;
        }
      }
      seen.push_back(xi);
    } else if (k > *period_start + 3 * period_len + 2) {
      // A unit always appears within the first two periods.
      throw Error(ErrorCode::InternalError, "no unit found within the continued fraction period");
    }
  }
}

QuadElem brute_force_unit(const FieldCtx& ctx, const mpz_class& coeff_bound) {
  // Exhaustive over the box, row by row: for fixed b the elements of norm
  // +-1 are the integer roots of a quadratic in a.
  std::optional<QuadElem> best;
  const mpz_class n(ctx.n());
  const bool half = ctx.kind() == AlphaKind::HalfPlusSqrt;
  for (mpz_class b = 0; b <= coeff_bound; ++b) {
    for (int t : {1, -1}) {
      // sqrt case: a^2 = n b^2 + t ; half case: (2a+b)^2 = n b^2 + 4t
      mpz_class rhs = n * b * b + (half ? 4 * t : t);
      if (rhs < 0 || !mpz_perfect_square_p(rhs.get_mpz_t())) continue;
      mpz_class r = sqrt(rhs);
      mpz_class a;
      if (half) {
        mpz_class twice = r - b;
        if (twice < 0 || mpz_odd_p(twice.get_mpz_t())) continue;
        a = twice / 2;
      } else {
        a = r;
      }
      if (a > coeff_bound) continue;
      QuadElem z(ctx, mpq_class(a), mpq_class(b));
      if (!is_unit_above_one(z)) continue;
      if (!best || less(z, *best)) best = z;
    }
  }
  if (!best) {
    throw Error(ErrorCode::NoUnitFound, "no unit > 1 with coefficients up to " + coeff_bound.get_str());
  }
  return *best;
}

}  // namespace cusp
