#include "cusp/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace cusp {

namespace {

std::string fmt_double(double x, int digits) {
  if (x == 0.0) x = 0.0;  // drop negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double rounded(double x, int digits) { return std::stod(fmt_double(x, digits)); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return os;
}

void check_stream(const std::ostream& os, const std::filesystem::path& path) {
  if (!os) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

// log_eps(k) with the exact powers eps^(j/2) pinned to j/2.
double level_height(const Level& level, const QuadElem& eps) {
  QuadElem power(eps.ctx(), 1, 0);
  for (int j = 0; j <= 8; ++j) {
    if (level.k_squared() == power) return j / 2.0;
    power *= eps;
  }
  return level.log_eps_k(eps);
}

}  // namespace

std::array<double, 3> psi_project(const Point2& point, const Level& level, const QuadElem& eps,
                                  PsiScale scale) {
  const double h = scale == PsiScale::LogEps ? level_height(level, eps) : std::sqrt(level.k_squared_value());
  return {to_double(point.x1), to_double(point.x2), h};
}

Mesh build_mesh(const Tower& tower, int subdivisions, PsiScale scale) {
  if (subdivisions < 1) throw Error(ErrorCode::InvalidLevel, "subdivisions must be at least 1");
  const auto bps = tower.breakpoints();
  Mesh mesh;

  // Sampled levels; interval j owns indices first[j] .. first[j+1].
  std::vector<std::size_t> first;
  for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
    first.push_back(mesh.levels.size());
    mesh.levels.push_back(bps[j]);
    for (int s = 1; s <= subdivisions; ++s) {
      mesh.levels.push_back(interior_level(bps[j], bps[j + 1], s, subdivisions + 1));
    }
  }
  first.push_back(mesh.levels.size());
  mesh.levels.push_back(bps.back());

  // Vertices are shared by exact position within a level, so the vanishing
  // edge at an event collapses onto the bifurcation vertex.
  std::vector<std::vector<std::pair<Point2, std::size_t>>> seen(mesh.levels.size());
  auto vertex_at = [&](std::size_t li, const Point2& p) {
    for (const auto& [q, id] : seen[li]) {
      if (q == p) return id;
    }
    mesh.vertices.push_back(psi_project(p, mesh.levels[li], tower.epsilon, scale));
    mesh.vertex_k_squared.push_back(mesh.levels[li].k_squared_value());
    seen[li].emplace_back(p, mesh.vertices.size() - 1);
    return mesh.vertices.size() - 1;
  };

  mesh.slice_polylines.resize(mesh.levels.size());
  for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
    const auto cycle = hexagon_cycle(tower.interval_sides(j));
    const std::size_t c = cycle.size();
    // corner[l][e]: end of edge e at sampled level first[j] + l
    std::vector<std::vector<std::size_t>> corner;
    for (std::size_t li = first[j]; li <= first[j + 1]; ++li) {
      std::vector<std::size_t> row;
      for (std::size_t e = 0; e < c; ++e) {
        const Point2 p = intersect(mediatrix(cycle[e], mesh.levels[li]), mediatrix(cycle[(e + 1) % c], mesh.levels[li]));
        row.push_back(vertex_at(li, p));
      }
      corner.push_back(std::move(row));
    }
    for (std::size_t l = 0; l < corner.size(); ++l) {
      const std::size_t li = first[j] + l;
      if (!mesh.slice_polylines[li].empty()) continue;
      std::vector<std::size_t> loop;
      for (std::size_t id : corner[l]) {
        if (loop.empty() || loop.back() != id) loop.push_back(id);
      }
      while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
      mesh.slice_polylines[li] = std::move(loop);
    }
    for (std::size_t l = 0; l + 1 < corner.size(); ++l) {
      for (std::size_t e = 0; e < c; ++e) {
        const std::size_t prev = (e + c - 1) % c;
        const std::size_t a = corner[l][prev], b = corner[l][e];
        const std::size_t d = corner[l + 1][prev], f = corner[l + 1][e];
        for (const std::array<std::size_t, 3> tri : {std::array{a, b, f}, std::array{a, f, d}}) {
          if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
          mesh.faces.push_back(tri);
          mesh.face_tags.push_back(cycle[e]);
        }
      }
    }
  }

  // Caps at k = 1 and k = eps^4, fanned from the first vertex.
  for (std::size_t li : {std::size_t{0}, mesh.levels.size() - 1}) {
    const auto& loop = mesh.slice_polylines[li];
    for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
      mesh.faces.push_back({loop[0], loop[i], loop[i + 1]});
      mesh.face_tags.push_back(std::nullopt);
    }
  }
  return mesh;
}

double surface_residual(const QuadElem& z, double x1, double x2, double k_squared) {
  const double zd = to_double(z);
  const double sd = to_double(conjugate(z));
  return 2 * zd * x1 + zd * zd + k_squared * (2 * sd * x2 + sd * sd);
}

double max_face_residual(const Mesh& mesh) {
  double worst = 0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!mesh.face_tags[f]) continue;
    for (std::size_t v : mesh.faces[f]) {
      const auto& p = mesh.vertices[v];
      worst = std::max(worst, std::abs(surface_residual(*mesh.face_tags[f], p[0], p[1], mesh.vertex_k_squared[v])));
    }
  }
  return worst;
}

void write_obj(const Mesh& mesh, std::ostream& os, int digits) {
  os << "# cusp tower mesh: " << mesh.vertices.size() << " vertices, " << mesh.faces.size() << " faces\n";
  for (const auto& v : mesh.vertices) {
    os << "v " << fmt_double(v[0], digits) << ' ' << fmt_double(v[1], digits) << ' ' << fmt_double(v[2], digits)
       << '\n';
  }
  for (const auto& f : mesh.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_obj(const Mesh& mesh, const std::filesystem::path& path, int digits) {
  auto os = open_out(path);
  write_obj(mesh, os, digits);
  check_stream(os, path);
}

// ---- JSON ----

namespace {

const char* alpha_name(AlphaKind kind) { return kind == AlphaKind::Sqrt ? "sqrt(n)" : "(1+sqrt(n))/2"; }

Json level_to_json(const Level& level, const QuadElem& eps, int digits) {
  return Json{{"k_squared", element_to_json(level.k_squared(), digits)},
              {"log_eps_k", rounded(level_height(level, eps), digits)},
              {"display", level_display(level, eps)}};
}

Level level_from_json(const FieldCtx& ctx, const Json& j) { return Level(element_from_json(ctx, j.at("k_squared"))); }

Json pair_to_json(const SidePair& p, int digits) {
  return Json{{"z", element_to_json(p.z, digits)}, {"z_prime", element_to_json(p.z_prime, digits)}};
}

SidePair pair_from_json(const FieldCtx& ctx, const Json& j) {
  return SidePair{element_from_json(ctx, j.at("z")), element_from_json(ctx, j.at("z_prime"))};
}

Json event_to_json(const ParallelogramEvent& e, const QuadElem& eps, int digits) {
  return Json{{"i", e.index}, {"level", level_to_json(e.level, eps, digits)}, {"pair", pair_to_json(e.pair, digits)}};
}

ParallelogramEvent event_from_json(const FieldCtx& ctx, const Json& j) {
  return ParallelogramEvent{j.at("i").get<int>(), level_from_json(ctx, j.at("level")), pair_from_json(ctx, j.at("pair"))};
}

SliceShape shape_from_string(const std::string& s) {
  if (s == to_string(SliceShape::Parallelogram)) return SliceShape::Parallelogram;
  if (s == to_string(SliceShape::Hexagon)) return SliceShape::Hexagon;
  throw Error(ErrorCode::ParseError, "unknown slice shape '" + s + "'");
}

Json elems_to_json(const std::vector<QuadElem>& xs, int digits) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(element_to_json(x, digits));
  return out;
}

std::vector<QuadElem> elems_from_json(const FieldCtx& ctx, const Json& j) {
  std::vector<QuadElem> out;
  for (const auto& x : j) out.push_back(element_from_json(ctx, x));
  return out;
}

}  // namespace

Json element_to_json(const QuadElem& z, int digits) {
  return Json{{"a", z.a().get_str()},
              {"b", z.b().get_str()},
              {"basis", alpha_name(z.ctx().kind())},
              {"text", to_sqrt_string(z)},
              {"value", rounded(to_double(z), digits)}};
}

QuadElem element_from_json(const FieldCtx& ctx, const Json& j) {
  try {
    if (j.at("basis").get<std::string>() != alpha_name(ctx.kind())) {
      throw Error(ErrorCode::CtxMismatch, "element basis does not match the field");
    }
    mpq_class a(j.at("a").get<std::string>()), b(j.at("b").get<std::string>());
    a.canonicalize();
    b.canonicalize();
    return QuadElem(ctx, a, b);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::ParseError, std::string("bad rational: ") + e.what());
  }
}

Json tower_to_json(const Tower& t, int digits) {
  Json j;
  j["schema_version"] = "1";
  j["n"] = t.ctx.n();
  j["alpha"] = alpha_name(t.ctx.kind());
  j["epsilon"] = element_to_json(t.epsilon, digits);
  j["norm_epsilon"] = norm(t.epsilon).get_str();
  j["side_list"] = elems_to_json(t.side_list, digits);
  Json trace = Json::array();
  for (const auto& p : t.trace) trace.push_back(pair_to_json(p, digits));
  j["trace"] = trace;
  Json events = Json::array();
  for (const auto& e : t.events) events.push_back(event_to_json(e, t.epsilon, digits));
  j["events"] = events;
  j["above_top"] = t.above_top ? event_to_json(*t.above_top, t.epsilon, digits) : Json(nullptr);
  Json sides = Json::array();
  for (const auto& s : t.sides) {
    sides.push_back(Json{{"z", element_to_json(s.z, digits)},
                         {"valid_from", level_to_json(s.valid_from, t.epsilon, digits)},
                         {"valid_to", level_to_json(s.valid_to, t.epsilon, digits)}});
  }
  j["sides"] = sides;
  j["bottom_shape"] = to_string(t.bottom_shape);
  j["top_shape"] = to_string(t.top_shape);
  Json gluings = Json::array();
  for (const auto& g : t.gluings) {
    gluings.push_back(Json{{"kind", g.kind == GluingKind::Translation ? "translation" : "anosov"},
                           {"data", element_to_json(g.data, digits)},
                           {"matrix", elems_to_json({g.matrix.begin(), g.matrix.end()}, digits)}});
  }
  j["gluings"] = gluings;
  Json nodes = Json::array();
  for (const auto& nd : t.graph.nodes) {
    nodes.push_back(Json{{"level", level_to_json(nd.level, t.epsilon, digits)},
                         {"point", elems_to_json({nd.point.x1, nd.point.x2}, digits)},
                         {"boundary", nd.boundary}});
  }
  Json edges = Json::array();
  for (const auto& e : t.graph.edges) {
    edges.push_back(Json{{"lower", e.lower}, {"upper", e.upper}, {"sides", elems_to_json({e.side_a, e.side_b}, digits)}});
  }
  j["graph"] = Json{{"nodes", nodes}, {"edges", edges}};
  return j;
}

Tower tower_from_json(const Json& j) {
  try {
    if (j.at("schema_version").get<std::string>() != "1") {
      throw Error(ErrorCode::ParseError, "unsupported schema_version");
    }
    const FieldCtx ctx = FieldCtx::make(j.at("n").get<std::int64_t>());
    Tower t{ctx,
            element_from_json(ctx, j.at("epsilon")),
            elems_from_json(ctx, j.at("side_list")),
            {},
            {},
            std::nullopt,
            {},
            shape_from_string(j.at("bottom_shape").get<std::string>()),
            shape_from_string(j.at("top_shape").get<std::string>()),
            {},
            {}};
    for (const auto& p : j.at("trace")) t.trace.push_back(pair_from_json(ctx, p));
    for (const auto& e : j.at("events")) t.events.push_back(event_from_json(ctx, e));
    if (!j.at("above_top").is_null()) t.above_top = event_from_json(ctx, j.at("above_top"));
    for (const auto& s : j.at("sides")) {
      t.sides.push_back(SideSurface{element_from_json(ctx, s.at("z")), level_from_json(ctx, s.at("valid_from")),
                                    level_from_json(ctx, s.at("valid_to"))});
    }
    for (const auto& g : j.at("gluings")) {
      const auto m = elems_from_json(ctx, g.at("matrix"));
      if (m.size() != 4) throw Error(ErrorCode::ParseError, "gluing matrix must have 4 entries");
      const std::string kind = g.at("kind").get<std::string>();
      if (kind != "translation" && kind != "anosov") throw Error(ErrorCode::ParseError, "unknown gluing kind " + kind);
      t.gluings.push_back(GluingMap{kind == "translation" ? GluingKind::Translation : GluingKind::Anosov,
                                    element_from_json(ctx, g.at("data")),
                                    {m[0], m[1], m[2], m[3]}});
    }
    for (const auto& nd : j.at("graph").at("nodes")) {
      const auto p = elems_from_json(ctx, nd.at("point"));
      if (p.size() != 2) throw Error(ErrorCode::ParseError, "graph point must have 2 coordinates");
      t.graph.nodes.push_back(GraphNode{level_from_json(ctx, nd.at("level")), Point2{p[0], p[1]},
                                        nd.at("boundary").get<bool>()});
    }
    for (const auto& e : j.at("graph").at("edges")) {
      const auto s = elems_from_json(ctx, e.at("sides"));
      if (s.size() != 2) throw Error(ErrorCode::ParseError, "graph edge must carry 2 sides");
      t.graph.edges.push_back(GraphEdge{e.at("lower").get<std::size_t>(), e.at("upper").get<std::size_t>(), s[0], s[1]});
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void write_json(const Tower& tower, const std::filesystem::path& path, int digits) {
  auto os = open_out(path);
  os << tower_to_json(tower, digits).dump(2) << '\n';
  check_stream(os, path);
}

Tower read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  Json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return tower_from_json(j);
}

// ---- SVG ----

void write_svg_slice(const TorusSlice& slice, std::ostream& os, int digits) {
  constexpr double size = 480, margin = 20;
  std::vector<std::array<double, 2>> pts;
  for (const auto& v : slice.vertices) pts.push_back({to_double(v.x1), to_double(v.x2)});
  double lo1 = pts[0][0], hi1 = lo1, lo2 = pts[0][1], hi2 = lo2;
  for (const auto& p : pts) {
    lo1 = std::min(lo1, p[0]), hi1 = std::max(hi1, p[0]);
    lo2 = std::min(lo2, p[1]), hi2 = std::max(hi2, p[1]);
  }
  // The two axes scale independently: x2 shrinks like 1/k.
  const double pad1 = 0.3 * (hi1 - lo1), pad2 = 0.3 * (hi2 - lo2);
  lo1 -= pad1, hi1 += pad1, lo2 -= pad2, hi2 += pad2;
  auto sx = [&](double x) { return margin + (x - lo1) / (hi1 - lo1) * (size - 2 * margin); };
  auto sy = [&](double y) { return size - margin - (y - lo2) / (hi2 - lo2) * (size - 2 * margin); };
  auto f = [&](double x) { return fmt_double(x, digits); };

  std::vector<QuadElem> lines = slice.contributing;
  for (std::size_t i = 0; i < slice.contributing.size(); ++i) {
    for (std::size_t k = i + 1; k < slice.contributing.size(); ++k) {
      lines.push_back(canonical_positive(slice.contributing[i] + slice.contributing[k]));
      lines.push_back(canonical_positive(slice.contributing[i] - slice.contributing[k]));
    }
  }
  sort_unique(lines);

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
     << "<title>slice at k^2=" << to_sqrt_string(slice.level.k_squared()) << " (" << to_string(slice.shape)
     << ")</title>\n"
     << "<defs><clipPath id=\"frame\"><rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
     << size - 2 * margin << "\" height=\"" << size - 2 * margin << "\"/></clipPath></defs>\n"
     << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size - 2 * margin << "\" height=\""
     << size - 2 * margin << "\" fill=\"none\" stroke=\"#999\"/>\n"
     << "<g clip-path=\"url(#frame)\" stroke-width=\"1\">\n";
  const double k2 = slice.level.k_squared_value();
  for (const auto& z : lines) {
    const bool side = std::find(slice.contributing.begin(), slice.contributing.end(), z) != slice.contributing.end();
    for (int sgn : {1, -1}) {
      const double zd = sgn * to_double(z), sd = sgn * to_double(conjugate(z));
      // 2 zd x1 + 2 k2 sd x2 + zd^2 + k2 sd^2 = 0
      const double A = 2 * zd, B = 2 * k2 * sd, C = zd * zd + k2 * sd * sd;
      // Parametrize over whichever coordinate the line is less steep in (screen units).
      const double w1 = hi1 - lo1, w2 = hi2 - lo2;
      double ax, ay, bx, by;
      if (std::abs(A * w1) <= std::abs(B * w2)) {
        ax = lo1 - w1, bx = hi1 + w1;
        ay = -(A * ax + C) / B, by = -(A * bx + C) / B;
      } else {
        ay = lo2 - w2, by = hi2 + w2;
        ax = -(B * ay + C) / A, bx = -(B * by + C) / A;
      }
      os << "<line x1=\"" << f(sx(ax)) << "\" y1=\"" << f(sy(ay)) << "\" x2=\"" << f(sx(bx)) << "\" y2=\""
         << f(sy(by)) << "\" stroke=\"" << (side ? "#1f5fbf" : "#bbbbbb") << "\"><title>"
         << to_sqrt_string(sgn > 0 ? z : -z) << "</title></line>\n";
    }
  }
  os << "</g>\n<polygon fill=\"#f2c14e\" fill-opacity=\"0.5\" stroke=\"#000\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << f(sx(pts[i][0])) << ',' << f(sy(pts[i][1]));
  os << "\"/>\n<circle cx=\"" << f(sx(0)) << "\" cy=\"" << f(sy(0)) << "\" r=\"2.5\" fill=\"#000\"/>\n</svg>\n";
}

void write_svg_slice(const TorusSlice& slice, const std::filesystem::path& path, int digits) {
  auto os = open_out(path);
  write_svg_slice(slice, os, digits);
  check_stream(os, path);
}

// ---- CSV ----

std::string epsilon_squared_combo(const QuadElem& eps) {
  return "ε²=" + to_linear_string(eps * eps, eps, "ε");
}

void write_table1_csv(std::span<const FieldCtx> fields, std::ostream& os) {
  os << "n,epsilon,norm,epsilon_squared\r\n";
  for (const auto& ctx : fields) {
    const QuadElem eps = fundamental_unit(ctx);
    os << ctx.n() << ',' << to_sqrt_string(eps) << ',' << norm(eps).get_str() << ','
       << to_linear_string(eps * eps, eps, "ε") << "\r\n";
  }
}

void write_table2_csv(const Tower& tower, std::ostream& os) {
  const std::size_t m = tower.trace.size();
  const bool half = tower.ctx.kind() == AlphaKind::HalfPlusSqrt;
  auto row = [&](const std::string& i, const std::string& note, const Level& level, std::vector<QuadElem> sides) {
    os << tower.ctx.n() << ',' << i << ',' << note << ',' << level_display(level, tower.epsilon) << ','
       << to_sqrt_string(level.k_squared());
    sides.resize(3, QuadElem(tower.ctx));
    for (std::size_t s = 0; s < 3; ++s) os << ',' << (sides[s].is_zero() ? "" : to_sqrt_string(sides[s]));
    os << "\r\n";
  };
  os << "n,i,note,level,k_squared,side1,side2,side3\r\n";
  if (half) row("", "hexagonal", tower.bottom(), tower.interval_sides(0));
  for (const auto& e : tower.events) {
    std::string note;
    if (!half && static_cast<std::size_t>(e.index) == m) note = "m";
    if (half && static_cast<std::size_t>(e.index) + 1 == m) note = "m-1";
    row(std::to_string(e.index), note, e.level, {e.pair.z, e.pair.z_prime});
  }
  if (half) row("", "hexagonal", tower.top(), tower.interval_sides(tower.breakpoints().size() - 2));
}

std::array<std::filesystem::path, 2> write_csv_tables(const FieldCtx& ctx, const std::filesystem::path& prefix) {
  std::array<std::filesystem::path, 2> paths{prefix.string() + "_table1.csv", prefix.string() + "_table2.csv"};
  {
    auto os = open_out(paths[0]);
    write_table1_csv(std::span<const FieldCtx>(&ctx, 1), os);
    check_stream(os, paths[0]);
  }
  {
    auto os = open_out(paths[1]);
    write_table2_csv(bifurcation_table(ctx), os);
    check_stream(os, paths[1]);
  }
  return paths;
}

}  // namespace cusp
