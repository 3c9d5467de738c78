#include "cusp/tower.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace cusp {

namespace {

bool same_unordered(const QuadElem& a, const QuadElem& b, const QuadElem& c, const QuadElem& d) {
  return (a == c && b == d) || (a == d && b == c);
}

QuadElem one_of(const FieldCtx& ctx) { return QuadElem(ctx, 1, 0); }

}  // namespace

SideListResult side_list(const FieldCtx& ctx, std::size_t max_iterations) {
  return side_list(ctx, fundamental_unit(ctx), max_iterations);
}

SideListResult side_list(const FieldCtx& ctx, const QuadElem& eps, std::size_t max_iterations) {
  const QuadElem eps_sq = eps * eps;
  QuadElem z = one_of(ctx);
  QuadElem zp = QuadElem::alpha(ctx);
  const QuadElem zm = eps_sq * z;
  const QuadElem zm_prime = eps_sq * zp;

  SideListResult result;
  result.trace.push_back({z, zp});
  std::size_t steps = 0;
  while (!same_unordered(z, zp, zm, zm_prime)) {
    if (++steps > max_iterations) {
      throw Error(ErrorCode::NonTermination,
                  "side list did not close after " + std::to_string(max_iterations) + " steps");
    }
    const QuadElem sz = conjugate(z);
    const QuadElem szp = conjugate(zp);
    const int c = compare(sz * sz, szp * szp);
    if (c == 0) {
      throw Error(ErrorCode::InternalError,
                  "|sigma| tie between " + to_sqrt_string(z) + " and " + to_sqrt_string(zp));
    }
    QuadElem keep = c < 0 ? z : zp;
    z = z + zp;
    zp = std::move(keep);
    result.trace.push_back({z, zp});
  }

  for (const auto& pair : result.trace) {
    result.sides.push_back(canonical_positive(pair.z));
    result.sides.push_back(canonical_positive(pair.z_prime));
  }
  if (ctx.kind() == AlphaKind::HalfPlusSqrt) {
    result.sides.push_back(canonical_positive(conjugate(QuadElem::alpha(ctx))));
  }
  sort_unique(result.sides);
  return result;
}

Level parallelogram_level(const SidePair& pair) {
  const QuadElem p = pair.z * pair.z_prime;
  return Level(-p / conjugate(p));
}

LevelLadder parallelogram_levels(const FieldCtx& ctx) {
  const QuadElem eps = fundamental_unit(ctx);
  return parallelogram_levels(ctx, eps, side_list(ctx, eps));
}

LevelLadder parallelogram_levels(const FieldCtx& ctx, const QuadElem& eps, const SideListResult& sides) {
  const Level bottom = Level::one(ctx);
  const Level top(pow(eps, 8));
  const std::size_t m = sides.trace.size();
  LevelLadder ladder;
  for (std::size_t i = 1; i <= m; ++i) {
    ParallelogramEvent event{static_cast<int>(i), parallelogram_level(sides.trace[i - 1]), sides.trace[i - 1]};
    const bool in_range = bottom <= event.level && event.level <= top;
    if (i == m && ctx.kind() == AlphaKind::HalfPlusSqrt) {
      if (in_range) {
        throw Error(ErrorCode::LevelOutOfRange, "final parallelogram expected above eps^4");
      }
      ladder.above_top = std::move(event);
      continue;
    }
    if (!in_range) {
      throw Error(ErrorCode::LevelOutOfRange,
                  "event " + std::to_string(i) + " at k^2=" + to_sqrt_string(event.level.k_squared()));
    }
    if (!ladder.events.empty() && !(ladder.events.back().level < event.level)) {
      throw Error(ErrorCode::InternalError, "parallelogram levels not increasing at i=" + std::to_string(i));
    }
    ladder.events.push_back(std::move(event));
  }
  return ladder;
}

// --- gluing maps -------------------------------------------------------------

GluingMap translation(const QuadElem& z) {
  const FieldCtx& ctx = z.ctx();
  return GluingMap{GluingKind::Translation, z, {one_of(ctx), z, QuadElem(ctx), one_of(ctx)}};
}

GluingMap anosov(const QuadElem& eps) {
  const FieldCtx& ctx = eps.ctx();
  return GluingMap{GluingKind::Anosov, eps, {eps, QuadElem(ctx), QuadElem(ctx), inverse(eps)}};
}

GluingMap anosov(const FieldCtx& ctx) { return anosov(fundamental_unit(ctx)); }

Point2 GluingMap::apply(const Point2& p) const {
  if (kind == GluingKind::Translation) return Point2{p.x1 + data, p.x2 + conjugate(data)};
  const QuadElem eps_sq = data * data;
  return Point2{p.x1 * eps_sq, p.x2 / eps_sq};
}

Level GluingMap::apply(const Level& level) const {
  if (kind == GluingKind::Translation) return level;
  // y1/y2 -> eps^4 y1/y2
  return Level(level.k_squared() * pow(data, 8));
}

QuadElem anosov_side_transport(const QuadElem& eps, const QuadElem& z) {
  if (z.is_zero()) throw Error(ErrorCode::ZeroTranslation, "side transport of zero");
  return eps * eps * z;
}

QuadElem anosov_side_transport(const FieldCtx& ctx, const QuadElem& z) {
  return anosov_side_transport(fundamental_unit(ctx), z);
}

// --- graph -------------------------------------------------------------------

std::size_t BifurcationGraph::degree(std::size_t node) const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [&](const GraphEdge& e) {
    return e.lower == node || e.upper == node;
  }));
}

std::size_t BifurcationGraph::event_layers(const std::vector<ParallelogramEvent>& events) const {
  std::size_t layers = 0;
  for (const auto& event : events) {
    if (std::any_of(nodes.begin(), nodes.end(), [&](const GraphNode& n) { return n.level == event.level; })) {
      ++layers;
    }
  }
  return layers;
}

std::vector<QuadElem> hexagon_cycle(const std::vector<QuadElem>& sides) {
  if (sides.size() != 3) throw Error(ErrorCode::InternalError, "hexagon needs three side pairs");
  for (std::size_t c = 0; c < 3; ++c) {
    const QuadElem& a = sides[(c + 1) % 3];
    const QuadElem& b = sides[(c + 2) % 3];
    if (!(a + b == sides[c])) continue;
    // CCW order of edge labels follows the angular order of the lattice
    // vectors (z, sigma z): a, a+b, b when b is counter-clockwise from a.
    const QuadElem det = a * conjugate(b) - b * conjugate(a);
    const bool ccw = sign(det) > 0;
    const QuadElem& first = ccw ? a : b;
    const QuadElem& last = ccw ? b : a;
    return {first, sides[c], last, -first, -sides[c], -last};
  }
  throw Error(ErrorCode::InternalError, "hexagon sides are not a superbase");
}

// --- tower -------------------------------------------------------------------

std::vector<Level> Tower::breakpoints() const {
  std::vector<Level> out;
  if (events.empty() || !(events.front().level == bottom())) out.push_back(bottom());
  for (const auto& e : events) out.push_back(e.level);
  if (!(out.back() == top())) out.push_back(top());
  return out;
}

std::vector<QuadElem> Tower::interval_sides(std::size_t index) const {
  const auto bps = breakpoints();
  if (index + 1 >= bps.size()) throw Error(ErrorCode::LevelOutOfRange, "no interval above the top");
  const Level& lo = bps[index];
  std::vector<QuadElem> out;
  auto it = std::find_if(events.begin(), events.end(), [&](const auto& e) { return e.level == lo; });
  if (it != events.end()) {
    out = {it->pair.z, it->pair.z_prime, it->pair.z + it->pair.z_prime};
  } else {
    // below the first parallelogram when n == 1 (mod 4)
    const SidePair& first = trace.front();
    out = {first.z, first.z_prime, canonical_positive(conjugate(first.z_prime))};
  }
  for (auto& z : out) z = canonical_positive(z);
  sort_unique(out);
  return out;
}

std::vector<QuadElem> Tower::predicted_sides(const Level& level) const {
  const auto bps = breakpoints();
  if (level < bps.front() || bps.back() < level) {
    throw Error(ErrorCode::LevelOutOfRange, "k^2=" + to_sqrt_string(level.k_squared()) + " outside [1, eps^8]");
  }
  for (const auto& e : events) {
    if (e.level == level) {
      std::vector<QuadElem> out{canonical_positive(e.pair.z), canonical_positive(e.pair.z_prime)};
      sort_unique(out);
      return out;
    }
  }
  for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
    if (level < bps[j + 1] || (j + 2 == bps.size() && level == bps[j + 1])) return interval_sides(j);
  }
  throw Error(ErrorCode::InternalError, "level not located in the ladder");
}

namespace {

std::vector<SideSurface> side_surfaces(const Tower& tower) {
  const auto bps = tower.breakpoints();
  std::vector<SideSurface> out;
  for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
    for (const auto& z : tower.interval_sides(j)) {
      auto it = std::find_if(out.begin(), out.end(), [&](const SideSurface& s) { return s.z == z; });
      if (it == out.end()) {
        out.push_back(SideSurface{z, bps[j], bps[j + 1]});
      } else {
        if (bps[j] < it->valid_from) it->valid_from = bps[j];
        if (it->valid_to < bps[j + 1]) it->valid_to = bps[j + 1];
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SideSurface& x, const SideSurface& y) {
    if (!(x.valid_from == y.valid_from)) return x.valid_from < y.valid_from;
    return less(x.z, y.z);
  });
  return out;
}

BifurcationGraph build_graph(const Tower& tower) {
  const auto bps = tower.breakpoints();
  BifurcationGraph graph;
  std::vector<std::vector<std::size_t>> by_level(bps.size());
  auto node_at = [&](std::size_t j, Point2 p) {
    for (std::size_t id : by_level[j]) {
      if (graph.nodes[id].point == p) return id;
    }
    const bool boundary = j == 0 || j + 1 == bps.size();
    graph.nodes.push_back(GraphNode{bps[j], std::move(p), boundary});
    by_level[j].push_back(graph.nodes.size() - 1);
    return graph.nodes.size() - 1;
  };
  for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
    const auto cycle = hexagon_cycle(tower.interval_sides(j));
    for (std::size_t e = 0; e < cycle.size(); ++e) {
      const QuadElem& s = cycle[e];
      const QuadElem& t = cycle[(e + 1) % cycle.size()];
      const std::size_t lower = node_at(j, intersect(mediatrix(s, bps[j]), mediatrix(t, bps[j])));
      const std::size_t upper = node_at(j + 1, intersect(mediatrix(s, bps[j + 1]), mediatrix(t, bps[j + 1])));
      graph.edges.push_back(GraphEdge{lower, upper, s, t});
    }
  }
  return graph;
}

}  // namespace

Tower bifurcation_table(const FieldCtx& ctx, const TowerOptions& opts) {
  const QuadElem eps = fundamental_unit(ctx);
  SideListResult sl = side_list(ctx, eps, opts.max_iterations);
  LevelLadder ladder = parallelogram_levels(ctx, eps, sl);
  const SliceShape boundary_shape =
      ctx.kind() == AlphaKind::Sqrt ? SliceShape::Parallelogram : SliceShape::Hexagon;
  Tower tower{ctx,
              eps,
              std::move(sl.sides),
              std::move(sl.trace),
              std::move(ladder.events),
              std::move(ladder.above_top),
              {},
              boundary_shape,
              boundary_shape,
              {},
              {}};
  tower.sides = side_surfaces(tower);
  for (const auto& s : tower.sides) tower.gluings.push_back(translation(s.z));
  tower.gluings.push_back(anosov(eps));
  tower.graph = build_graph(tower);
  return tower;
}

// --- sampling and verification -----------------------------------------------

namespace {

// Decimal rational with `digits` significant digits nearest to x (> 0).
mpq_class decimal_rational(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
  std::string s(buf);
  const auto epos = s.find('e');
  std::string mant = s.substr(0, epos);
  int exponent = std::stoi(s.substr(epos + 1));
  const auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exponent -= static_cast<int>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  mpq_class q{mpz_class(mant)};
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(exponent)));
  if (exponent >= 0) {
    q *= scale;
  } else {
    q /= scale;
  }
  return q;
}

}  // namespace

Level interior_level(const Level& lo, const Level& hi, int step, int steps) {
  if (!(lo < hi) || step <= 0 || step >= steps) {
    throw Error(ErrorCode::InvalidLevel, "interior_level needs lo < hi and 0 < step < steps");
  }
  const FieldCtx& ctx = lo.ctx();
  const double t = static_cast<double>(step) / steps;
  const double target = std::exp((1 - t) * std::log(lo.k_squared_value()) + t * std::log(hi.k_squared_value()));
  if (std::isfinite(target) && target > 0) {
    for (int digits : {12, 17}) {
      Level guess(QuadElem(ctx, decimal_rational(target, digits), 0));
      if (lo < guess && guess < hi) return guess;
    }
  }
  return Level(lo.k_squared() + (hi.k_squared() - lo.k_squared()) * mpq_class(step, steps));
}

namespace {

std::string join(const std::vector<QuadElem>& zs) {
  std::string s = "{";
  for (std::size_t i = 0; i < zs.size(); ++i) s += (i ? ", " : "") + to_sqrt_string(zs[i]);
  return s + "}";
}

}  // namespace

VerifyReport check_tower(const Tower& tower, int samples_per_interval, const mpz_class& coeff_bound) {
  if (samples_per_interval < 1) throw Error(ErrorCode::InvalidLevel, "need at least one sample per interval");
  VerifyReport report;
  report.events = tower.events.size();
  const auto bps = tower.breakpoints();

  auto check = [&](const Level& level, const std::vector<QuadElem>& predicted, SliceShape shape) {
    const TorusSlice slice = dirichlet_slice(tower.ctx, level, coeff_bound);
    ++report.levels_checked;
    if (slice.contributing != predicted || slice.shape != shape) {
      report.ok = false;
      report.mismatches.push_back("k^2=" + to_sqrt_string(level.k_squared()) + ": predicted " +
                                  std::string(to_string(shape)) + " " + join(predicted) + ", oracle " +
                                  std::string(to_string(slice.shape)) + " " + join(slice.contributing));
    }
    return slice;
  };

  std::optional<TorusSlice> bottom_slice, top_slice;
  for (std::size_t j = 0; j < bps.size(); ++j) {
    const bool is_event = std::any_of(tower.events.begin(), tower.events.end(),
                                      [&](const auto& e) { return e.level == bps[j]; });
    TorusSlice s = check(bps[j], tower.predicted_sides(bps[j]),
                         is_event ? SliceShape::Parallelogram : SliceShape::Hexagon);
    if (j == 0) bottom_slice = s;
    if (j + 1 == bps.size()) top_slice = s;
  }
  for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
    const auto predicted = tower.interval_sides(j);
    for (int s = 1; s <= samples_per_interval; ++s) {
      check(interior_level(bps[j], bps[j + 1], s, samples_per_interval + 1), predicted, SliceShape::Hexagon);
    }
  }

  std::vector<QuadElem> transported;
  for (const auto& z : bottom_slice->contributing) transported.push_back(anosov_side_transport(tower.epsilon, z));
  sort_unique(transported);
  if (transported != top_slice->contributing) {
    report.ok = false;
    report.mismatches.push_back("top sides " + join(top_slice->contributing) + " != eps^2 * bottom sides " +
                                join(transported));
  }
  return report;
}

VerifyReport verify_tower(const Tower& tower, int samples_per_interval, const mpz_class& coeff_bound) {
  VerifyReport report = check_tower(tower, samples_per_interval, coeff_bound);
  if (!report.ok) throw Error(ErrorCode::VerificationFailed, report.mismatches.front());
  return report;
}

VerifyReport verify_tower(const FieldCtx& ctx, int samples_per_interval, std::optional<mpz_class> coeff_bound) {
  const Tower tower = bifurcation_table(ctx);
  const mpz_class bound = coeff_bound ? *coeff_bound : 2 * default_coeff_bound(tower.epsilon);
  return verify_tower(tower, samples_per_interval, bound);
}

std::string level_display(const Level& level, const QuadElem& eps) {
  QuadElem power(eps.ctx(), 1, 0);
  for (int j = 0; j <= 8; ++j) {
    if (level.k_squared() == power) {
      if (j == 0) return "1";
      if (j == 2) return "ε";
      if (j % 2 == 0) return "ε^" + std::to_string(j / 2);
      return "ε^(" + std::to_string(j) + "/2)";
    }
    power *= eps;
  }
  return "sqrt(" + to_sqrt_string(level.k_squared()) + ")";
}

}  // namespace cusp
