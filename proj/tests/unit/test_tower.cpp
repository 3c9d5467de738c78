#include <algorithm>
#include <random>
#include <set>

#include "cusp/tower.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cusp;
using oracle::num;
using oracle::sqrt_form;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InternalError;
}

bool same_pair(const SidePair& p, const QuadElem& a, const QuadElem& b) {
  return (p.z == a && p.z_prime == b) || (p.z == b && p.z_prime == a);
}

std::vector<QuadElem> sorted(std::vector<QuadElem> v) {
  sort_unique(v);
  return v;
}

const Tower& tower_of(std::int64_t n) {
  static std::map<std::int64_t, Tower> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, bifurcation_table(FieldCtx::make(n))).first;
  return it->second;
}

}  // namespace

TEST_SUITE("side list") {
  TEST_CASE("n = 2 trace") {
    const auto ctx = FieldCtx::make(2);
    const QuadElem e = num(ctx, 1, 1), r2 = num(ctx, 0, 1), one = num(ctx, 1);
    const auto sl = side_list(ctx);
    REQUIRE(sl.trace.size() == 5);
    CHECK(same_pair(sl.trace[0], one, r2));
    CHECK(same_pair(sl.trace[1], e, one));
    CHECK(same_pair(sl.trace[2], e * r2, e));
    CHECK(same_pair(sl.trace[3], e * e, e));
    CHECK(same_pair(sl.trace[4], e * e, e * e * r2));
  }

  TEST_CASE("n = 5 trace and sides") {
    const auto ctx = FieldCtx::make(5);
    const QuadElem e = QuadElem::alpha(ctx), one = num(ctx, 1);
    const auto sl = side_list(ctx);
    REQUIRE(sl.trace.size() == 3);
    CHECK(same_pair(sl.trace[0], one, e));
    CHECK(same_pair(sl.trace[1], e * e, e));
    CHECK(same_pair(sl.trace[2], e * e * e, e * e));
    for (const QuadElem& z : {one, e, e * e, e * e * e, canonical_positive(conjugate(e))}) {
      CHECK(std::find(sl.sides.begin(), sl.sides.end(), z) != sl.sides.end());
    }
    CHECK(sl.sides.size() == 5);
  }

  TEST_CASE("n = 13 has six parallelogram pairs") {
    const auto ladder = parallelogram_levels(FieldCtx::make(13));
    CHECK(ladder.events.size() == 6);
    CHECK(ladder.above_top.has_value());
  }

  TEST_CASE("the list closes on eps^2 (1, alpha) for every squarefree n <= 100") {
    for (const std::int64_t n : oracle::squarefree_upto(100)) {
      CAPTURE(n);
      const auto ctx = FieldCtx::make(n);
      const QuadElem eps = fundamental_unit(ctx);
      const auto sl = side_list(ctx, eps);
      CHECK(same_pair(sl.trace.back(), eps * eps, eps * eps * QuadElem::alpha(ctx)));
      CHECK(same_pair(sl.trace.front(), num(ctx, 1), QuadElem::alpha(ctx)));
      // sides are canonical, unique and ascending
      for (std::size_t i = 0; i < sl.sides.size(); ++i) {
        CHECK(sign(sl.sides[i]) == 1);
        if (i) CHECK(less(sl.sides[i - 1], sl.sides[i]));
      }
      // the survivor has strictly smaller |sigma|
      for (std::size_t i = 0; i + 1 < sl.trace.size(); ++i) {
        const SidePair& p = sl.trace[i];
        const SidePair& q = sl.trace[i + 1];
        CHECK(q.z == p.z + p.z_prime);
        const QuadElem& dropped = q.z_prime == p.z ? p.z_prime : p.z;
        CHECK(less(conjugate(q.z_prime) * conjugate(q.z_prime), conjugate(dropped) * conjugate(dropped)));
      }
    }
  }

  TEST_CASE("iteration cap") {
    const auto ctx = FieldCtx::make(3);
    CHECK(code_of([&] { (void)side_list(ctx, 2); }) == ErrorCode::NonTermination);
    CHECK(side_list(ctx, 6).trace.size() == 7);
    CHECK(code_of([&] { (void)bifurcation_table(ctx, TowerOptions{5}); }) == ErrorCode::NonTermination);
  }
}

TEST_SUITE("parallelogram levels") {
  TEST_CASE("level formula examples") {
    const auto q2 = FieldCtx::make(2);
    CHECK(parallelogram_level({num(q2, 1), num(q2, 0, 1)}).k_squared() == num(q2, 1));
    const auto q5 = FieldCtx::make(5);
    const QuadElem e = QuadElem::alpha(q5);
    CHECK(parallelogram_level({e * e, e}).k_squared() == pow(e, 6));
    const auto q13 = FieldCtx::make(13);
    CHECK(parallelogram_level({num(q13, 1), QuadElem::alpha(q13)}).k_squared() ==
          sqrt_form(q13, mpq_class(7, 6), mpq_class(1, 6)));
  }

  TEST_CASE("events lie in [1, eps^8], increase, and start at 1 iff n != 1 mod 4") {
    for (const std::int64_t n : oracle::squarefree_upto(100)) {
      CAPTURE(n);
      const auto ctx = FieldCtx::make(n);
      const QuadElem eps = fundamental_unit(ctx);
      const auto ladder = parallelogram_levels(ctx);
      REQUIRE_FALSE(ladder.events.empty());
      for (std::size_t i = 0; i < ladder.events.size(); ++i) {
        const auto& ev = ladder.events[i];
        CHECK(sign(ev.level.k_squared() - num(ctx, 1)) >= 0);
        CHECK(sign(pow(eps, 8) - ev.level.k_squared()) >= 0);
        CHECK(ev.level == parallelogram_level(ev.pair));
        if (i) CHECK(ladder.events[i - 1].level < ev.level);
      }
      const bool starts_at_one = ladder.events.front().level == Level::one(ctx);
      CHECK(starts_at_one == (ctx.kind() == AlphaKind::Sqrt));
      CHECK(ladder.above_top.has_value() == (ctx.kind() == AlphaKind::HalfPlusSqrt));
      if (ladder.above_top) CHECK(Level(pow(eps, 8)) < ladder.above_top->level);
    }
  }

  TEST_CASE("the slice at every event is the predicted parallelogram") {
    for (const std::int64_t n : {2, 3, 5, 6, 7, 13, 17, 21, 29}) {
      CAPTURE(n);
      const Tower& t = tower_of(n);
      const long box = oracle::voronoi_box(t.epsilon);
      for (const auto& ev : t.events) {
        const TorusSlice s = dirichlet_slice(t.ctx, ev.level);
        CHECK(s.shape == SliceShape::Parallelogram);
        CHECK(s.contributing == sorted({canonical_positive(ev.pair.z), canonical_positive(ev.pair.z_prime)}));
        if (box <= 400) {
          const auto v = oracle::voronoi_sides(t.ctx, ev.level, box);
          CAPTURE(to_sqrt_string(ev.level.k_squared()));
          CHECK(v == s.contributing);
        }
      }
    }
  }
}

TEST_SUITE("gluing") {
  TEST_CASE("anosov matrices") {
    const auto q2 = FieldCtx::make(2);
    const GluingMap g2 = anosov(q2);
    CHECK(g2.kind == GluingKind::Anosov);
    CHECK(g2.matrix[0] == num(q2, 1, 1));
    CHECK(g2.matrix[3] == num(q2, -1, 1));
    CHECK(g2.matrix[1].is_zero());
    CHECK(g2.matrix[2].is_zero());
    const auto q3 = FieldCtx::make(3);
    const GluingMap g3 = anosov(q3);
    CHECK(g3.matrix[0] == num(q3, 2, 1));
    CHECK(g3.matrix[3] == num(q3, 2, -1));
  }

  TEST_CASE("anosov carries level 1 to the top level") {
    for (const std::int64_t n : {2, 3, 5, 13}) {
      const Tower& t = tower_of(n);
      const GluingMap g = anosov(t.epsilon);
      CHECK(g.apply(t.bottom()) == t.top());
      CHECK(t.top().k_squared() == pow(t.epsilon, 8));
      // the level-1 slice maps onto the top slice, vertex by vertex
      const TorusSlice bottom = dirichlet_slice(t.ctx, t.bottom());
      const TorusSlice top = dirichlet_slice(t.ctx, t.top());
      REQUIRE(bottom.vertices.size() == top.vertices.size());
      for (const auto& v : bottom.vertices) {
        CHECK(std::find(top.vertices.begin(), top.vertices.end(), g.apply(v)) != top.vertices.end());
      }
    }
  }

  TEST_CASE("side transport") {
    const auto q2 = FieldCtx::make(2);
    const QuadElem e = num(q2, 1, 1);
    CHECK(anosov_side_transport(q2, num(q2, 1)) == num(q2, 3, 2));
    CHECK(anosov_side_transport(q2, num(q2, 0, 1)) == e * e * num(q2, 0, 1));
    const auto q5 = FieldCtx::make(5);
    const QuadElem g = QuadElem::alpha(q5);
    CHECK(anosov_side_transport(q5, g) == g * g * g);
    CHECK(code_of([&] { (void)anosov_side_transport(q2, num(q2, 0)); }) == ErrorCode::ZeroTranslation);
  }

  TEST_CASE("translations pair opposite sides") {
    const Tower& t = tower_of(13);
    std::mt19937 rng(3);
    for (const auto& g : t.gluings) {
      if (g.kind != GluingKind::Translation) continue;
      const Level level = oracle::random_level(t.epsilon, rng);
      const TorusSlice s = dirichlet_slice(t.ctx, level);
      CHECK(g.apply(level) == level);
      for (std::size_t i = 0; i < s.vertices.size(); ++i) {
        // the edge carried by z is mapped onto the edge carried by -z
        if (!(s.edge_labels[i] == g.data)) continue;
        const std::size_t m = s.vertices.size();
        const Point2 p = g.apply(s.vertices[i]);
        const MediatrixLine opposite = mediatrix(-g.data, level);
        CHECK(opposite.eval(p).is_zero());
        CHECK(std::find(s.vertices.begin(), s.vertices.end(), p) != s.vertices.end());
        (void)m;
      }
    }
    CHECK(std::count_if(t.gluings.begin(), t.gluings.end(),
                        [](const GluingMap& g) { return g.kind == GluingKind::Anosov; }) == 1);
  }
}

TEST_SUITE("tower") {
  TEST_CASE("n = 3 event levels") {
    const Tower& t = tower_of(3);
    const QuadElem e = t.epsilon;
    REQUIRE(t.events.size() == 7);
    const int powers[] = {0, 1, 3, 4, 5, 7, 8};
    for (std::size_t i = 0; i < 7; ++i) CHECK(t.events[i].level.k_squared() == pow(e, powers[i]));
    CHECK(t.bottom_shape == SliceShape::Parallelogram);
  }

  TEST_CASE("n = 5 boundaries are hexagons") {
    const Tower& t = tower_of(5);
    REQUIRE(t.events.size() == 2);
    CHECK(t.events[0].level.k_squared() == pow(t.epsilon, 2));
    CHECK(t.events[1].level.k_squared() == pow(t.epsilon, 6));
    CHECK(t.bottom_shape == SliceShape::Hexagon);
    CHECK(t.top_shape == SliceShape::Hexagon);
    CHECK(dirichlet_slice(t.ctx, t.bottom()).shape == SliceShape::Hexagon);
    CHECK(dirichlet_slice(t.ctx, t.top()).shape == SliceShape::Hexagon);
  }

  TEST_CASE("n = 2 has five events and rectangular boundaries") {
    const Tower& t = tower_of(2);
    CHECK(t.events.size() == 5);
    CHECK(t.bottom_shape == SliceShape::Parallelogram);
    CHECK(t.top_shape == SliceShape::Parallelogram);
    CHECK(t.breakpoints().size() == 5);
  }

  TEST_CASE("side surfaces") {
    for (const std::int64_t n : {2, 3, 5, 13, 17, 46}) {
      CAPTURE(n);
      const Tower& t = tower_of(n);
      const auto bps = t.breakpoints();
      for (const auto& s : t.sides) {
        CHECK(s.valid_from < s.valid_to);
        CHECK(sign(s.z) == 1);
        CHECK(std::find(bps.begin(), bps.end(), s.valid_from) != bps.end());
        CHECK(std::find(bps.begin(), bps.end(), s.valid_to) != bps.end());
      }
      // every side of the list shows up in some slice of the ladder
      for (const auto& z : t.side_list) {
        CAPTURE(to_sqrt_string(z));
        bool found = false;
        for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
          const auto sides = t.interval_sides(j);
          found = found || std::find(sides.begin(), sides.end(), z) != sides.end();
        }
        CHECK(found);
      }
    }
  }

  TEST_CASE("predicted sides") {
    const Tower& t = tower_of(13);
    CHECK(t.predicted_sides(t.bottom()) == t.interval_sides(0));
    CHECK(t.predicted_sides(t.events[0].level) ==
          sorted({canonical_positive(t.events[0].pair.z), canonical_positive(t.events[0].pair.z_prime)}));
    CHECK(code_of([&] { (void)t.predicted_sides(Level(num(t.ctx, 1) * mpq_class(1, 2))); }) ==
          ErrorCode::LevelOutOfRange);
    CHECK(code_of([&] { (void)t.predicted_sides(Level(pow(t.epsilon, 9))); }) == ErrorCode::LevelOutOfRange);
  }

  TEST_CASE("hexagon cycle") {
    const auto q5 = FieldCtx::make(5);
    const QuadElem one = num(q5, 1), a = QuadElem::alpha(q5);
    const auto cyc = hexagon_cycle({one, a - one, a});
    REQUIRE(cyc.size() == 6);
    for (std::size_t i = 0; i < 3; ++i) CHECK(cyc[i + 3] == -cyc[i]);
    CHECK(cyc[1] == a);
    CHECK(code_of([&] { (void)hexagon_cycle({one, a, a + a + one}); }) == ErrorCode::InternalError);
    // matches the labels the slice itself reports
    const TorusSlice s = dirichlet_slice(q5, Level::one(q5));
    const auto it = std::find(s.edge_labels.begin(), s.edge_labels.end(), cyc[0]);
    REQUIRE(it != s.edge_labels.end());
    const std::size_t k = static_cast<std::size_t>(it - s.edge_labels.begin());
    for (std::size_t i = 0; i < 6; ++i) CHECK(s.edge_labels[(k + i) % 6] == cyc[i]);
  }

  TEST_CASE("the bifurcation graph is 3-valent") {
    for (const std::int64_t n : {2, 3, 5, 7, 13, 17, 19, 21}) {
      CAPTURE(n);
      const Tower& t = tower_of(n);
      const auto& g = t.graph;
      std::size_t internal = 0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.nodes[i].boundary) continue;
        ++internal;
        CHECK(g.degree(i) == 3);
      }
      CHECK(internal > 0);
      // four corners at each event
      for (const auto& ev : t.events) {
        CHECK(std::count_if(g.nodes.begin(), g.nodes.end(), [&](const GraphNode& nd) { return nd.level == ev.level; }) ==
              4);
      }
      // gluing the top to the bottom by the Anosov map completes the valence
      const GluingMap eta = anosov(t.epsilon);
      const std::size_t want = t.ctx.kind() == AlphaKind::Sqrt ? 3 : 2;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (!(g.nodes[i].level == t.bottom())) continue;
        const Point2 image = eta.apply(g.nodes[i].point);
        const auto it = std::find_if(g.nodes.begin(), g.nodes.end(), [&](const GraphNode& nd) {
          return nd.level == t.top() && nd.point == image;
        });
        REQUIRE(it != g.nodes.end());
        CHECK(g.degree(i) + g.degree(static_cast<std::size_t>(it - g.nodes.begin())) == want);
      }
      for (const auto& e : g.edges) CHECK(g.nodes[e.lower].level < g.nodes[e.upper].level);
    }
    CHECK(tower_of(2).graph.event_layers(tower_of(2).events) == 5);
    CHECK(tower_of(3).graph.event_layers(tower_of(3).events) == 7);
  }

  TEST_CASE("level display") {
    const Tower& t3 = tower_of(3);
    CHECK(level_display(t3.events[0].level, t3.epsilon) == "1");
    CHECK(level_display(t3.events[1].level, t3.epsilon) == "ε^(1/2)");
    CHECK(level_display(t3.events[3].level, t3.epsilon) == "ε^2");
    CHECK(level_display(t3.events[6].level, t3.epsilon) == "ε^4");
    const Tower& t2 = tower_of(2);
    CHECK(level_display(t2.events[1].level, t2.epsilon) == "ε");
    const Tower& t13 = tower_of(13);
    CHECK(level_display(t13.events[0].level, t13.epsilon) == "sqrt((7+√13)/6)");
  }

  TEST_CASE("interior levels") {
    const Tower& t = tower_of(13);
    const auto bps = t.breakpoints();
    for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
      Level prev = bps[j];
      for (int s = 1; s < 5; ++s) {
        const Level mid = interior_level(bps[j], bps[j + 1], s, 5);
        CHECK(prev < mid);
        CHECK(mid < bps[j + 1]);
        prev = mid;
      }
    }
    CHECK(code_of([&] { (void)interior_level(bps[1], bps[0], 1, 2); }) == ErrorCode::InvalidLevel);
    CHECK(code_of([&] { (void)interior_level(bps[0], bps[1], 0, 2); }) == ErrorCode::InvalidLevel);
    // very close levels still get an exact interior point
    const Level a(num(t.ctx, 1)), b(num(t.ctx, 1) + QuadElem(t.ctx, mpq_class(1, 1000000000)) *
                                                       QuadElem(t.ctx, mpq_class(1, 1000000000)));
    const Level m = interior_level(a, b, 1, 2);
    CHECK(a < m);
    CHECK(m < b);
  }
}

TEST_SUITE("verification") {
  TEST_CASE("towers agree with the oracle") {
    for (const std::int64_t n : {2, 3, 5, 7, 13, 17, 19, 46}) {
      CAPTURE(n);
      const VerifyReport r = verify_tower(FieldCtx::make(n), 3);
      CHECK(r.ok);
      CHECK(r.mismatches.empty());
      CHECK(r.events == tower_of(n).events.size());
      CHECK(r.levels_checked == tower_of(n).breakpoints().size() + 3 * (tower_of(n).breakpoints().size() - 1));
    }
  }

  TEST_CASE("a tampered level is caught") {
    Tower t = tower_of(13);
    t.events[2].level = Level(t.events[2].level.k_squared() * mpq_class(2));
    const mpz_class bound = 2 * default_coeff_bound(t.epsilon);
    const VerifyReport r = check_tower(t, 2, bound);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.mismatches.empty());
    CHECK(code_of([&] { (void)verify_tower(t, 2, bound); }) == ErrorCode::VerificationFailed);

    Tower t2 = tower_of(2);
    t2.events[1].level = Level(t2.events[1].level.k_squared() * mpq_class(2));
    CHECK_FALSE(check_tower(t2, 1, 2 * default_coeff_bound(t2.epsilon)).ok);
  }

  TEST_CASE("a wrong side pair is caught") {
    Tower t = tower_of(3);
    std::swap(t.events[2].pair, t.events[3].pair);
    CHECK_FALSE(check_tower(t, 1, 2 * default_coeff_bound(t.epsilon)).ok);
  }

  TEST_CASE("sample count must be positive") {
    CHECK(code_of([] { (void)check_tower(tower_of(2), 0, 10); }) == ErrorCode::InvalidLevel);
  }
}
