#pragma once

// The cusp-section tower T_n: the union of torus slices over levels
// k in [1, eps^4], its side list, the discrete ladder of parallelogram
// levels, the gluing maps, and the 3-valent edge graph.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cusp/dirichlet.hpp"

namespace cusp {

struct SidePair {
  QuadElem z;
  QuadElem z_prime;
  friend bool operator==(const SidePair&, const SidePair&) = default;
};

struct SideListResult {
  /// L: canonical-positive, deduplicated, ascending.
  std::vector<QuadElem> sides;
  /// (z_i, z_i') for i = 1..m, repetitions kept.
  std::vector<SidePair> trace;
};

constexpr std::size_t kDefaultMaxIterations = 10000;

/// Generates the side list: start from (1, alpha), replace the pair by
/// (z + z', whichever of z, z' has smaller |sigma|) until it equals
/// eps^2 * (1, alpha) as an unordered pair.
SideListResult side_list(const FieldCtx& ctx, std::size_t max_iterations = kDefaultMaxIterations);
SideListResult side_list(const FieldCtx& ctx, const QuadElem& eps,
                         std::size_t max_iterations = kDefaultMaxIterations);

struct ParallelogramEvent {
  int index;  // i of (z_i, z_i'), 1-based
  Level level;
  SidePair pair;
  friend bool operator==(const ParallelogramEvent&, const ParallelogramEvent&) = default;
};

/// k^2 = -z z' / sigma(z z').
Level parallelogram_level(const SidePair& pair);

struct LevelLadder {
  /// In [1, eps^4], strictly increasing.
  std::vector<ParallelogramEvent> events;
  /// For n == 1 (mod 4) the i = m parallelogram lies above eps^4.
  std::optional<ParallelogramEvent> above_top;
};

LevelLadder parallelogram_levels(const FieldCtx& ctx);
LevelLadder parallelogram_levels(const FieldCtx& ctx, const QuadElem& eps, const SideListResult& sides);

enum class GluingKind { Translation, Anosov };

struct GluingMap {
  GluingKind kind;
  /// Translation element z, or eps for the Anosov map.
  QuadElem data;
  /// Row-major 2x2 matrix over Z_K.
  std::array<QuadElem, 4> matrix;

  /// Action on the projected leaf coordinates. The Anosov map also moves the
  /// level: (x1, x2, k) -> (eps^2 x1, eps^-2 x2, eps^4 k).
  Point2 apply(const Point2& p) const;
  Level apply(const Level& level) const;

  friend bool operator==(const GluingMap&, const GluingMap&) = default;
};

GluingMap translation(const QuadElem& z);
GluingMap anosov(const FieldCtx& ctx);
GluingMap anosov(const QuadElem& eps);

/// eps^2 * z: the side at level eps^4 matching side z at level 1.
QuadElem anosov_side_transport(const FieldCtx& ctx, const QuadElem& z);
QuadElem anosov_side_transport(const QuadElem& eps, const QuadElem& z);

struct SideSurface {
  QuadElem z;
  Level valid_from;
  Level valid_to;
  friend bool operator==(const SideSurface&, const SideSurface&) = default;
};

/// A tower edge is the trajectory of a slice vertex between two consecutive
/// breakpoint levels; it is labelled by the two signed sides meeting there.
struct GraphNode {
  Level level;
  Point2 point;
  bool boundary;
  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::size_t lower;
  std::size_t upper;
  QuadElem side_a;
  QuadElem side_b;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct BifurcationGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  std::size_t degree(std::size_t node) const;
  /// Number of distinct levels carrying a parallelogram corner.
  std::size_t event_layers(const std::vector<ParallelogramEvent>& events) const;

  friend bool operator==(const BifurcationGraph&, const BifurcationGraph&) = default;
};

/// Cyclic (counter-clockwise) signed side labels of the hexagon formed by
/// the three given canonical-positive sides, one of which is the sum of the
/// other two.
std::vector<QuadElem> hexagon_cycle(const std::vector<QuadElem>& sides);

struct Tower {
  FieldCtx ctx;
  QuadElem epsilon;
  std::vector<QuadElem> side_list;
  std::vector<SidePair> trace;
  std::vector<ParallelogramEvent> events;
  std::optional<ParallelogramEvent> above_top;
  std::vector<SideSurface> sides;
  SliceShape bottom_shape;
  SliceShape top_shape;
  std::vector<GluingMap> gluings;
  BifurcationGraph graph;

  Level bottom() const { return Level::one(ctx); }
  /// k = eps^4, i.e. k^2 = eps^8.
  Level top() const { return Level(pow(epsilon, 8)); }

  /// Levels where the slice combinatorics change: 1, every event, eps^4.
  std::vector<Level> breakpoints() const;
  /// Sides predicted by the ladder at a level in [1, eps^4].
  std::vector<QuadElem> predicted_sides(const Level& level) const;
  /// Sides on the open interval just above breakpoint `index`.
  std::vector<QuadElem> interval_sides(std::size_t index) const;

  friend bool operator==(const Tower&, const Tower&) = default;
};

struct TowerOptions {
  std::size_t max_iterations = kDefaultMaxIterations;
};

Tower bifurcation_table(const FieldCtx& ctx, const TowerOptions& opts = {});

/// An exact level strictly between lo and hi, close to lo^(1-t) hi^t.
Level interior_level(const Level& lo, const Level& hi, int step, int steps);

struct VerifyReport {
  bool ok = true;
  std::size_t levels_checked = 0;
  std::size_t events = 0;
  std::vector<std::string> mismatches;
};

/// Compares the tower against the Dirichlet oracle at every breakpoint and
/// at `samples_per_interval` interior levels of every interval. Never throws
/// on mismatch; see verify_tower.
VerifyReport check_tower(const Tower& tower, int samples_per_interval, const mpz_class& coeff_bound);

/// Like check_tower but throws VerificationFailed with the first mismatch.
VerifyReport verify_tower(const Tower& tower, int samples_per_interval, const mpz_class& coeff_bound);
VerifyReport verify_tower(const FieldCtx& ctx, int samples_per_interval,
                          std::optional<mpz_class> coeff_bound = std::nullopt);

/// "eps^(j/2)" when k^2 = eps^j for some 0 <= j <= 8, else "sqrt(<k^2>)".
std::string level_display(const Level& level, const QuadElem& eps);

}  // namespace cusp
