#pragma once

// Exact arithmetic in a real quadratic field K = Q(sqrt n).
//
// Elements are stored in the integral basis (1, alpha) of the maximal order:
//   alpha = sqrt(n)          when n != 1 (mod 4)
//   alpha = (1 + sqrt(n))/2  when n == 1 (mod 4)
// so that Z_K = Z + Z*alpha is exactly the set of elements with integer
// coordinates. Real comparisons use the identity embedding and are decided
// with rational arithmetic only.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>

#include "cusp/error.hpp"

namespace cusp {

enum class AlphaKind { Sqrt, HalfPlusSqrt };

class FieldCtx {
 public:
  /// Validates n (squarefree, n >= 2) and fixes the integral basis.
  static FieldCtx make(std::int64_t n);

  std::int64_t n() const { return n_; }
  AlphaKind kind() const { return kind_; }

  // alpha^2 = alpha_sq_const + alpha_sq_linear * alpha
  mpz_class alpha_sq_const() const;
  int alpha_sq_linear() const { return kind_ == AlphaKind::Sqrt ? 0 : 1; }

  /// Covolume squared of the lattice {(z, sigma(z))}: 4n or n.
  mpz_class covolume_squared() const;

  friend bool operator==(const FieldCtx&, const FieldCtx&) = default;

 private:
  FieldCtx(std::int64_t n, AlphaKind kind) : n_(n), kind_(kind) {}
  std::int64_t n_;
  AlphaKind kind_;
};

inline FieldCtx make_field(std::int64_t n) { return FieldCtx::make(n); }

bool is_squarefree(std::int64_t n);

class QuadElem {
 public:
  explicit QuadElem(const FieldCtx& ctx, mpq_class a = 0, mpq_class b = 0);

  static QuadElem alpha(const FieldCtx& ctx) { return QuadElem(ctx, 0, 1); }
  /// Builds p + q*sqrt(n).
  static QuadElem from_sqrt_form(const FieldCtx& ctx, const mpq_class& p, const mpq_class& q);

  const FieldCtx& ctx() const { return ctx_; }
  const mpq_class& a() const { return a_; }
  const mpq_class& b() const { return b_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_integral() const;

  /// (p, q) with this == p + q*sqrt(n).
  std::pair<mpq_class, mpq_class> sqrt_form() const;

  QuadElem operator-() const;
  QuadElem& operator+=(const QuadElem& o);
  QuadElem& operator-=(const QuadElem& o);
  QuadElem& operator*=(const QuadElem& o);
  QuadElem& operator/=(const QuadElem& o);
  QuadElem& operator*=(const mpq_class& q);

  friend QuadElem operator+(QuadElem x, const QuadElem& y) { return x += y; }
  friend QuadElem operator-(QuadElem x, const QuadElem& y) { return x -= y; }
  friend QuadElem operator*(QuadElem x, const QuadElem& y) { return x *= y; }
  friend QuadElem operator/(QuadElem x, const QuadElem& y) { return x /= y; }
  friend QuadElem operator*(QuadElem x, const mpq_class& q) { return x *= q; }
  friend QuadElem operator*(const mpq_class& q, QuadElem x) { return x *= q; }

  friend bool operator==(const QuadElem& x, const QuadElem& y) {
    return x.ctx_ == y.ctx_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

 private:
  void require_same(const QuadElem& o) const;

  FieldCtx ctx_;
  mpq_class a_;
  mpq_class b_;
};

QuadElem conjugate(const QuadElem& z);
mpq_class norm(const QuadElem& z);
mpq_class trace(const QuadElem& z);
QuadElem inverse(const QuadElem& z);
QuadElem pow(const QuadElem& z, int e);

/// Exact sign of z under the identity embedding.
int sign(const QuadElem& z);
inline int compare(const QuadElem& x, const QuadElem& y) { return sign(x - y); }
inline bool less(const QuadElem& x, const QuadElem& y) { return compare(x, y) < 0; }

/// The member of {z, -z} with non-negative sign.
QuadElem canonical_positive(const QuadElem& z);
QuadElem abs(const QuadElem& z);

/// Exact floor of the real number z.
mpz_class floor(const QuadElem& z);
/// floor(z + 1/2).
mpz_class round_nearest(const QuadElem& z);

double to_double(const QuadElem& z);

/// Largest |coordinate| in the (1, alpha) basis (ceil for non-integers).
mpz_class max_abs_coeff(const QuadElem& z);

struct EmbeddedPair {
  mpf_class first;
  mpf_class second;
  int precision;
};

/// Both real embeddings (z, sigma(z)) to `digits` significant decimal digits.
EmbeddedPair embed(const QuadElem& z, int digits);
std::string to_decimal(const mpf_class& x, int digits);

// Rendering. Coefficients are exact; no decimals ever appear.
std::string to_sqrt_string(const QuadElem& z);   // "(3+√13)/2"
std::string to_alpha_string(const QuadElem& z);  // "1+α"
/// x written as p + q*base for the given basis element, e.g. "1+2ε".
std::string to_linear_string(const QuadElem& x, const QuadElem& base, const std::string& symbol);

struct UnitOptions {
  /// Minimality is re-checked by brute force when n is below this.
  std::int64_t verify_below = 100;
  /// Convergent numerators/denominators may not exceed this many bits.
  std::size_t bit_budget = 8192;
};

/// The fundamental unit eps = min{z in Z_K^x | z > 1}, found from the
/// continued-fraction expansion of alpha.
QuadElem fundamental_unit(const FieldCtx& ctx, const UnitOptions& opts = {});

/// Smallest unit > 1 among a + b*alpha with 0 <= a, b <= coeff_bound.
QuadElem brute_force_unit(const FieldCtx& ctx, const mpz_class& coeff_bound);

}  // namespace cusp
