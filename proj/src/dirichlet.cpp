#include "cusp/dirichlet.hpp"

#include <algorithm>
#include <cmath>

namespace cusp {

Level::Level(QuadElem k_squared) : k_squared_(std::move(k_squared)) {
  if (sign(k_squared_) <= 0) {
    throw Error(ErrorCode::InvalidLevel, "k^2 must be positive, got " + to_sqrt_string(k_squared_));
  }
}

double Level::log_eps_k(const QuadElem& eps) const {
  return 0.5 * std::log(k_squared_value()) / std::log(to_double(eps));
}

MediatrixLine mediatrix(const QuadElem& z, const Level& level) {
  if (z.is_zero()) throw Error(ErrorCode::ZeroTranslation, "mediatrix of the identity translation");
  const QuadElem& ksq = level.k_squared();
  const QuadElem sz = conjugate(z);
  QuadElem two(z.ctx(), 2, 0);
  return MediatrixLine{z, level, two * z, two * ksq * sz, z * z + ksq * sz * sz};
}

Point2 intersect(const MediatrixLine& l, const MediatrixLine& m) {
  const QuadElem det = l.A * m.B - m.A * l.B;
  if (det.is_zero()) {
    throw Error(ErrorCode::InternalError,
                "parallel mediatrices for " + to_sqrt_string(l.z) + " and " + to_sqrt_string(m.z));
  }
  const QuadElem inv = inverse(det);
  return Point2{(l.B * m.C - m.B * l.C) * inv, (m.A * l.C - l.A * m.C) * inv};
}

double delta_distance(const HPoint& p, const HPoint& q) {
  double total = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double ip = p[j].imag();
    const double iq = q[j].imag();
    if (!(ip > 0.0) || !(iq > 0.0)) {
      throw Error(ErrorCode::NonPositiveImaginary, "points must lie in the upper half-plane");
    }
    total += std::norm(p[j] - q[j]) / (ip * iq);
  }
  return total;
}

QuadElem level_norm(const QuadElem& z, const Level& level) {
  const QuadElem sz = conjugate(z);
  return z * z + level.k_squared() * sz * sz;
}

QuadElem level_inner(const QuadElem& z, const QuadElem& w, const Level& level) {
  return z * w + level.k_squared() * conjugate(z) * conjugate(w);
}

mpz_class default_coeff_bound(const QuadElem& eps) {
  // The top slice is cut by eps^2 and eps^2 * alpha; cover both.
  const QuadElem eps_sq = eps * eps;
  const mpz_class c = std::max(max_abs_coeff(eps_sq), max_abs_coeff(eps_sq * QuadElem::alpha(eps.ctx())));
  return 2 * c + 2;
}

mpz_class default_coeff_bound(const FieldCtx& ctx) { return default_coeff_bound(fundamental_unit(ctx)); }

void sort_unique(std::vector<QuadElem>& elems) {
  std::sort(elems.begin(), elems.end(), [](const QuadElem& x, const QuadElem& y) { return less(x, y); });
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
}

std::vector<QuadElem> candidate_set(const FieldCtx& ctx, const Level& /*level*/, const mpz_class& coeff_bound) {
  std::vector<QuadElem> out;
  for (mpz_class b = -coeff_bound; b <= coeff_bound; ++b) {
    for (mpz_class a = -coeff_bound; a <= coeff_bound; ++a) {
      QuadElem z(ctx, mpq_class(a), mpq_class(b));
      if (sign(z) > 0) out.push_back(std::move(z));
    }
  }
  sort_unique(out);
  return out;
}

std::string_view to_string(SliceShape shape) {
  return shape == SliceShape::Parallelogram ? "parallelogram" : "hexagon";
}

namespace {

struct Polygon {
  std::vector<Point2> vertices;
  std::vector<MediatrixLine> edges;  // edges[i] carries vertices[i] -> vertices[i+1]
};

QuadElem twice_signed_area(const std::vector<Point2>& v) {
  QuadElem s(v.front().x1.ctx());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& p = v[i];
    const Point2& q = v[(i + 1) % v.size()];
    s += p.x1 * q.x2 - q.x1 * p.x2;
  }
  return s;
}

bool independent(const QuadElem& z, const QuadElem& w) {
  return z.a() * w.b() - z.b() * w.a() != 0;
}

Polygon parallelogram(const QuadElem& z1, const QuadElem& z2, const Level& level) {
  const MediatrixLine p1 = mediatrix(z1, level);
  const MediatrixLine m1 = mediatrix(-z1, level);
  const MediatrixLine p2 = mediatrix(z2, level);
  const MediatrixLine m2 = mediatrix(-z2, level);
  Polygon poly;
  poly.vertices = {intersect(p1, p2), intersect(p1, m2), intersect(m1, m2), intersect(m1, p2)};
  poly.edges = {p1, m2, m1, p2};
  if (sign(twice_signed_area(poly.vertices)) < 0) {
    poly.vertices = {poly.vertices[0], poly.vertices[3], poly.vertices[2], poly.vertices[1]};
    poly.edges = {p2, m1, m2, p1};
  }
  return poly;
}

void clip(Polygon& poly, const MediatrixLine& line) {
  const std::size_t n = poly.vertices.size();
  std::vector<int> side(n);
  bool any_out = false;
  for (std::size_t i = 0; i < n; ++i) {
    side[i] = sign(line.eval(poly.vertices[i]));
    any_out = any_out || side[i] < 0;
  }
  if (!any_out) return;

  Polygon out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const int fp = side[i];
    const int fq = side[j];
    if (fp >= 0) {
      if (fp == 0 && fq < 0) {
        out.vertices.push_back(poly.vertices[i]);
        out.edges.push_back(line);
      } else {
        out.vertices.push_back(poly.vertices[i]);
        out.edges.push_back(poly.edges[i]);
        if (fp > 0 && fq < 0) {
          out.vertices.push_back(intersect(poly.edges[i], line));
          out.edges.push_back(line);
        }
      }
    } else if (fq > 0) {
      out.vertices.push_back(intersect(poly.edges[i], line));
      out.edges.push_back(poly.edges[i]);
    }
  }
  poly = std::move(out);
}

void clip_pair(Polygon& poly, const QuadElem& z, const Level& level) {
  clip(poly, mediatrix(z, level));
  clip(poly, mediatrix(-z, level));
}

TorusSlice finish(Polygon poly, const Level& level) {
  const std::size_t n = poly.vertices.size();
  if (n != 4 && n != 6) {
    throw Error(ErrorCode::InternalError,
                "slice has " + std::to_string(n) + " sides at k^2=" + to_sqrt_string(level.k_squared()));
  }
  // Start at the edge carried by the smallest positive translation.
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    const QuadElem& z = poly.edges[i].z;
    if (sign(z) > 0 && (start == n || less(z, poly.edges[start].z))) start = i;
  }
  TorusSlice slice{level, {}, {}, {}, n == 4 ? SliceShape::Parallelogram : SliceShape::Hexagon};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (start + k) % n;
    slice.vertices.push_back(poly.vertices[i]);
    slice.edge_labels.push_back(poly.edges[i].z);
    slice.contributing.push_back(canonical_positive(poly.edges[i].z));
  }
  sort_unique(slice.contributing);
  return slice;
}

bool in_box(const QuadElem& z, const mpz_class& bound) {
  return abs(z.a()) <= bound && abs(z.b()) <= bound;
}

// Gauss-Lagrange reduction of the lattice basis (1, alpha) under Q_k.
std::pair<QuadElem, QuadElem> reduced_basis(const FieldCtx& ctx, const Level& level) {
  QuadElem u(ctx, 1, 0);
  QuadElem v = QuadElem::alpha(ctx);
  QuadElem qu = level_norm(u, level);
  QuadElem qv = level_norm(v, level);
  if (less(qv, qu)) {
    std::swap(u, v);
    std::swap(qu, qv);
  }
  for (;;) {
    const mpz_class mu = round_nearest(level_inner(u, v, level) / qu);
    if (mu != 0) {
      v -= u * mpq_class(mu);
      qv = level_norm(v, level);
    }
    if (!less(qv, qu)) break;
    std::swap(u, v);
    std::swap(qu, qv);
  }
  return {u, v};
}

}  // namespace

TorusSlice intersect_halfplanes(const Level& level, std::span<const QuadElem> translations) {
  std::vector<QuadElem> zs;
  for (const auto& z : translations) {
    if (!z.is_zero()) zs.push_back(z);
  }
  if (zs.empty()) throw Error(ErrorCode::UnboundedRegion, "no translations to bound the slice");
  auto second = std::find_if(zs.begin() + 1, zs.end(),
                             [&](const QuadElem& w) { return independent(zs.front(), w); });
  if (second == zs.end()) {
    throw Error(ErrorCode::UnboundedRegion, "translations span a single direction");
  }
  Polygon poly = parallelogram(zs.front(), *second, level);
  for (const auto& z : zs) clip_pair(poly, z, level);
  return finish(std::move(poly), level);
}

TorusSlice dirichlet_slice(const FieldCtx& ctx, const Level& level, std::optional<mpz_class> coeff_bound) {
  const mpz_class bound = coeff_bound ? *coeff_bound : default_coeff_bound(ctx);
  if (bound < 1) throw Error(ErrorCode::UnboundedRegion, "candidate bound " + bound.get_str() + " is empty");

  const auto [u, v] = reduced_basis(ctx, level);
  Polygon poly = (in_box(u, bound) && in_box(v, bound))
                     ? parallelogram(u, v, level)
                     : parallelogram(QuadElem(ctx, 1, 0), QuadElem::alpha(ctx), level);
  for (const QuadElem& w : {u + v, u - v}) {
    if (in_box(w, bound)) clip_pair(poly, w, level);
  }

  // Q_k of the vertex points themselves, not of lattice elements
  auto point_norm = [&](const Point2& p) { return p.x1 * p.x1 + level.k_squared() * p.x2 * p.x2; };
  QuadElem radius_sq = point_norm(poly.vertices.front());
  for (const auto& p : poly.vertices) {
    QuadElem r = point_norm(p);
    if (less(radius_sq, r)) radius_sq = std::move(r);
  }
  const QuadElem limit = radius_sq * mpq_class(4);

  // Enumerate z = s*u + t*v with Q_k(z) <= limit, one of each +-pair.
  const QuadElem quu = level_norm(u, level);
  const QuadElem quv = level_inner(u, v, level);
  const QuadElem qvv = level_norm(v, level);
  const QuadElem row_min_coeff = qvv - quv * quv / quu;
  auto q_of = [&](const mpz_class& s, const mpz_class& t) {
    const mpq_class sq(s), tq(t);
    return quu * mpq_class(sq * sq) + quv * mpq_class(2 * sq * tq) + qvv * mpq_class(tq * tq);
  };
  auto visit = [&](const mpz_class& s, const mpz_class& t) {
    if (s == 0 && t == 0) return;
    QuadElem z = u * mpq_class(s) + v * mpq_class(t);
    if (in_box(z, bound)) clip_pair(poly, z, level);
  };
  for (mpz_class t = 0;; ++t) {
    const mpq_class tq(t);
    if (t > 0 && less(limit, row_min_coeff * mpq_class(tq * tq))) break;
    const mpz_class centre = floor(-(quv * mpq_class(tq)) / quu);
    for (mpz_class s = centre; !less(limit, q_of(s, t)); --s) {
      if (t > 0 || s > 0) visit(s, t);
    }
    for (mpz_class s = centre + 1; !less(limit, q_of(s, t)); ++s) {
      if (t > 0 || s > 0) visit(s, t);
    }
  }
  return finish(std::move(poly), level);
}

SliceShape classify(const TorusSlice& slice) {
  return slice.edge_labels.size() == 4 ? SliceShape::Parallelogram : SliceShape::Hexagon;
}

mpq_class slice_area_squared(const TorusSlice& slice) {
  const QuadElem twice = twice_signed_area(slice.vertices);
  const QuadElem sq = twice * twice * mpq_class(1, 4);
  if (sgn(sq.b()) != 0) throw Error(ErrorCode::InternalError, "slice area squared is irrational");
  return sq.a();
}

std::vector<QuadElem> oracle_contributing(const FieldCtx& ctx, const Level& level,
                                          const mpz_class& coeff_bound) {
  return dirichlet_slice(ctx, level, coeff_bound).contributing;
}

}  // namespace cusp
