#pragma once

// Projection Psi_n, tower meshes and serialization (OBJ, JSON, SVG, CSV).

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cusp/tower.hpp"
#include "json.hpp"

namespace cusp {

using Json = nlohmann::ordered_json;

enum class PsiScale {
  LogEps,  // third coordinate log_eps(k), in [0, 4]
  Linear,  // third coordinate k itself
};

std::array<double, 3> psi_project(const Point2& point, const Level& level, const QuadElem& eps,
                                  PsiScale scale = PsiScale::LogEps);

struct Mesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 3>> faces;
  /// Signed translation whose mediatrix surface carries the face; empty for
  /// the caps at k = 1 and k = eps^4.
  std::vector<std::optional<QuadElem>> face_tags;
  /// One closed counter-clockwise loop of vertex indices per sampled level.
  std::vector<std::vector<std::size_t>> slice_polylines;
  std::vector<Level> levels;
  /// Float k^2 of each vertex's level.
  std::vector<double> vertex_k_squared;
};

/// Samples every breakpoint plus `subdivisions` geometric intermediates per
/// interval and stitches consecutive slices face by face.
Mesh build_mesh(const Tower& tower, int subdivisions, PsiScale scale = PsiScale::LogEps);

/// 2z x1 + z^2 + k^2 (2 sigma(z) x2 + sigma(z)^2) evaluated in floating point.
double surface_residual(const QuadElem& z, double x1, double x2, double k_squared);

/// Largest |residual| over the vertices of all tagged faces.
double max_face_residual(const Mesh& mesh);

void write_obj(const Mesh& mesh, std::ostream& os, int digits = 9);
void write_obj(const Mesh& mesh, const std::filesystem::path& path, int digits = 9);

Json element_to_json(const QuadElem& z, int digits = 17);
QuadElem element_from_json(const FieldCtx& ctx, const Json& j);

Json tower_to_json(const Tower& tower, int digits = 17);
Tower tower_from_json(const Json& j);
void write_json(const Tower& tower, const std::filesystem::path& path, int digits = 17);
Tower read_json(const std::filesystem::path& path);

/// Slice polygon with the mediatrices of its sides and of the neighbouring
/// sums and differences.
void write_svg_slice(const TorusSlice& slice, std::ostream& os, int digits = 9);
void write_svg_slice(const TorusSlice& slice, const std::filesystem::path& path, int digits = 9);

/// n, epsilon, N(epsilon), epsilon^2 as p + q*eps.
void write_table1_csv(std::span<const FieldCtx> fields, std::ostream& os);
/// The bifurcation levels with their sides, one row per parallelogram
/// plus the hexagonal boundary rows when n == 1 (mod 4).
void write_table2_csv(const Tower& tower, std::ostream& os);
/// Writes <prefix>_table1.csv and <prefix>_table2.csv; returns both paths.
std::array<std::filesystem::path, 2> write_csv_tables(const FieldCtx& ctx, const std::filesystem::path& prefix);

/// "ε²=1+2ε" style combination of eps^2 in terms of 1 and eps.
std::string epsilon_squared_combo(const QuadElem& eps);

}  // namespace cusp
