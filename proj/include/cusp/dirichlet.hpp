#pragma once

// Dirichlet domains for the translation lattice U = {tau_z : z in Z_K}
// inside a single leaf of H^2 x H^2.
//
// At level k = y1/y2 the semimetric restricts (up to scale) to the
// quadratic form Q_k(x1, x2) = x1^2 + k^2 x2^2 on the projected plane, so
// the torus slice is the Q_k-Voronoi cell of the origin in the lattice
// {(z, sigma(z))}. Translation z bounds the cell by the half-plane
//   2z x1 + z^2 + k^2 (2 sigma(z) x2 + sigma(z)^2) >= 0.
// Only k^2 ever appears, so levels are stored exactly as k^2 in K.

#include <array>
#include <complex>
#include <compare>
#include <optional>
#include <span>
#include <vector>

#include "cusp/quadfield.hpp"

namespace cusp {

class Level {
 public:
  /// Rejects k^2 <= 0 with InvalidLevel.
  explicit Level(QuadElem k_squared);
  static Level one(const FieldCtx& ctx) { return Level(QuadElem(ctx, 1, 0)); }

  const FieldCtx& ctx() const { return k_squared_.ctx(); }
  const QuadElem& k_squared() const { return k_squared_; }
  double k_squared_value() const { return to_double(k_squared_); }
  /// log_eps(k) = log(k^2) / (2 log eps); a float view for export only.
  double log_eps_k(const QuadElem& eps) const;

  friend bool operator==(const Level&, const Level&) = default;
  friend std::strong_ordering operator<=>(const Level& x, const Level& y) {
    const int c = compare(x.k_squared_, y.k_squared_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  QuadElem k_squared_;
};

struct Point2 {
  QuadElem x1;
  QuadElem x2;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// A*x1 + B*x2 + C = 0, the projected mediatrix of tau_z at a level.
struct MediatrixLine {
  QuadElem z;
  Level level;
  QuadElem A;
  QuadElem B;
  QuadElem C;

  QuadElem eval(const Point2& p) const { return A * p.x1 + B * p.x2 + C; }
};

MediatrixLine mediatrix(const QuadElem& z, const Level& level);

/// Intersection of two non-parallel lines; InternalError if parallel.
Point2 intersect(const MediatrixLine& l, const MediatrixLine& m);

enum class SliceShape { Parallelogram, Hexagon };

struct TorusSlice {
  Level level;
  /// Counter-clockwise, exact.
  std::vector<Point2> vertices;
  /// edge_labels[i] is the signed translation whose mediatrix carries the
  /// edge vertices[i] -> vertices[i+1].
  std::vector<QuadElem> edge_labels;
  /// Canonical-positive translations contributing an edge, ascending.
  std::vector<QuadElem> contributing;
  SliceShape shape;
};

using HPoint = std::array<std::complex<double>, 2>;

/// delta(p, q) = |p1-q1|^2/(Im p1 Im q1) + |p2-q2|^2/(Im p2 Im q2).
double delta_distance(const HPoint& p, const HPoint& q);

/// Q_k(z, sigma z) = z^2 + k^2 sigma(z)^2 and its bilinear form.
QuadElem level_norm(const QuadElem& z, const Level& level);
QuadElem level_inner(const QuadElem& z, const QuadElem& w, const Level& level);

/// 2 * (largest coefficient of eps^2 and eps^2 * alpha) + 2.
mpz_class default_coeff_bound(const FieldCtx& ctx);
mpz_class default_coeff_bound(const QuadElem& eps);

/// Nonzero z = a + b*alpha, |a|,|b| <= bound, one of each +-pair.
std::vector<QuadElem> candidate_set(const FieldCtx& ctx, const Level& level,
                                    const mpz_class& coeff_bound);

/// Exact intersection of the +-z half-planes for every given translation.
/// The input must contain two Q-independent elements or UnboundedRegion is
/// thrown.
TorusSlice intersect_halfplanes(const Level& level, std::span<const QuadElem> translations);

/// The Dirichlet slice over the whole candidate box. Half-planes that
/// provably cannot cut the region (Q_k(z) > 4 R^2 with R^2 the largest
/// Q_k-norm of a vertex of an enclosing polygon) are skipped.
TorusSlice dirichlet_slice(const FieldCtx& ctx, const Level& level,
                           std::optional<mpz_class> coeff_bound = std::nullopt);

SliceShape classify(const TorusSlice& slice);

/// Square of the Euclidean area of the slice; rational.
mpq_class slice_area_squared(const TorusSlice& slice);

std::vector<QuadElem> oracle_contributing(const FieldCtx& ctx, const Level& level,
                                          const mpz_class& coeff_bound);

/// Sort ascending by real value and drop duplicates.
void sort_unique(std::vector<QuadElem>& elems);

std::string_view to_string(SliceShape shape);

}  // namespace cusp
