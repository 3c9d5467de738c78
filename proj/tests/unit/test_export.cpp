#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cusp/export.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cusp;
using oracle::num;

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

const Tower& tower_of(std::int64_t n) {
  static std::map<std::int64_t, Tower> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, bifurcation_table(FieldCtx::make(n))).first;
  return it->second;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cusp_tower_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("projection") {
  TEST_CASE("heights of exact powers") {
    const Tower& t = tower_of(3);
    const Point2 origin{num(t.ctx, 0), num(t.ctx, 0)};
    CHECK(psi_project(origin, t.bottom(), t.epsilon)[2] == 0.0);
    CHECK(psi_project(origin, t.top(), t.epsilon)[2] == 4.0);
    CHECK(psi_project(origin, Level(t.epsilon), t.epsilon)[2] == 0.5);
    const Point2 p{num(t.ctx, 1, 2), num(t.ctx, -3)};
    const auto v = psi_project(p, t.bottom(), t.epsilon);
    CHECK(v[0] == doctest::Approx(1 + 2 * std::sqrt(3.0)));
    CHECK(v[1] == doctest::Approx(-3));
    CHECK(psi_project(p, t.top(), t.epsilon, PsiScale::Linear)[2] ==
          doctest::Approx(std::pow(to_double(t.epsilon), 4)));
  }

  TEST_CASE("heights of other levels") {
    const Tower& t = tower_of(13);
    std::mt19937 rng(17);
    for (int i = 0; i < 50; ++i) {
      const Level l = oracle::random_level(t.epsilon, rng);
      const double h = psi_project(Point2{num(t.ctx, 0), num(t.ctx, 0)}, l, t.epsilon)[2];
      CHECK(h == doctest::Approx(std::log(l.k_squared_value()) / (2 * std::log(to_double(t.epsilon)))));
    }
  }
}

TEST_SUITE("mesh") {
  TEST_CASE("n = 2 with one subdivision") {
    const Mesh m = build_mesh(tower_of(2), 1);
    CHECK(m.levels.size() == 9);
    REQUIRE(m.slice_polylines.size() == 9);
    for (const auto& loop : m.slice_polylines) {
      CHECK(loop.size() >= 4);
      CHECK(loop.size() <= 6);
    }
    CHECK(m.faces.size() == m.face_tags.size());
    CHECK(m.vertex_k_squared.size() == m.vertices.size());
    // rectangles at both ends
    CHECK(m.slice_polylines.front().size() == 4);
    CHECK(m.slice_polylines.back().size() == 4);
  }

  TEST_CASE("n = 5 ends are hexagons") {
    const Mesh m = build_mesh(tower_of(5), 2);
    CHECK(m.slice_polylines.front().size() == 6);
    CHECK(m.slice_polylines.back().size() == 6);
    CHECK(m.levels.size() == 3 * 3 + 1);
  }

  TEST_CASE("tagged faces lie on their mediatrix surfaces") {
    for (const std::int64_t n : {2, 3, 5, 13}) {
      CAPTURE(n);
      const Mesh m = build_mesh(tower_of(n), 6, PsiScale::Linear);
      CHECK(max_face_residual(m) < 1e-9);
      std::mt19937 rng(static_cast<unsigned>(n));
      std::uniform_int_distribution<std::size_t> pick(0, m.faces.size() - 1);
      for (int i = 0; i < 1000; ++i) {
        const std::size_t f = pick(rng);
        if (!m.face_tags[f]) continue;
        for (const std::size_t v : m.faces[f]) {
          const auto& p = m.vertices[v];
          CHECK(std::abs(surface_residual(*m.face_tags[f], p[0], p[1], m.vertex_k_squared[v])) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("heights in [0, 4] and faces are valid") {
    const Mesh m = build_mesh(tower_of(7), 4);
    for (const auto& v : m.vertices) {
      CHECK(v[2] >= 0.0);
      CHECK(v[2] <= 4.0);
    }
    for (const auto& f : m.faces) {
      for (const auto i : f) CHECK(i < m.vertices.size());
      CHECK(f[0] != f[1]);
      CHECK(f[1] != f[2]);
      CHECK(f[0] != f[2]);
    }
  }

  TEST_CASE("every side surface shows up") {
    const Tower& t = tower_of(13);
    const Mesh m = build_mesh(t, 2);
    for (const auto& z : t.side_list) {
      CAPTURE(to_sqrt_string(z));
      const bool found = std::any_of(m.face_tags.begin(), m.face_tags.end(), [&](const auto& tag) {
        return tag && (*tag == z || *tag == -z);
      });
      CHECK(found);
    }
  }

  TEST_CASE("bad subdivision count") {
    CHECK(code_of([] { (void)build_mesh(tower_of(2), 0); }) == ErrorCode::InvalidLevel);
  }
}

TEST_SUITE("obj") {
  TEST_CASE("records and determinism") {
    const Mesh m = build_mesh(tower_of(3), 3);
    std::ostringstream a, b;
    write_obj(m, a);
    write_obj(build_mesh(tower_of(3), 3), b);
    CHECK(a.str() == b.str());
    std::istringstream is(a.str());
    std::string line;
    std::size_t v = 0, f = 0;
    while (std::getline(is, line)) {
      if (line.rfind("v ", 0) == 0) ++v;
      if (line.rfind("f ", 0) == 0) {
        ++f;
        std::istringstream ls(line.substr(2));
        std::size_t i;
        while (ls >> i) {
          CHECK(i >= 1);
          CHECK(i <= m.vertices.size());
        }
      }
    }
    CHECK(v == m.vertices.size());
    CHECK(f == m.faces.size());
  }

  TEST_CASE("file output") {
    const auto p = scratch("n2.obj");
    write_obj(build_mesh(tower_of(2), 1), p);
    CHECK(slurp(p).rfind("# cusp tower mesh", 0) == 0);
    CHECK(code_of([] { write_obj(build_mesh(tower_of(2), 1), "/nonexistent-dir/x.obj"); }) == ErrorCode::IoError);
  }
}

TEST_SUITE("json") {
  TEST_CASE("element round trip") {
    std::mt19937 rng(5);
    for (const std::int64_t n : {2, 5, 13, 30}) {
      const auto ctx = FieldCtx::make(n);
      for (int i = 0; i < 100; ++i) {
        const QuadElem z = oracle::random_elem(ctx, rng, 1000, true);
        const Json j = element_to_json(z);
        CHECK(element_from_json(ctx, j) == z);
        CHECK(j["value"].get<double>() == doctest::Approx(to_double(z)));
      }
    }
  }

  TEST_CASE("element keys") {
    const auto ctx = FieldCtx::make(13);
    const Json j = element_to_json(num(ctx, 1, 1));
    CHECK(j["a"] == "1");
    CHECK(j["b"] == "1");
    CHECK(j["basis"] == "(1+sqrt(n))/2");
    CHECK(j["text"] == "(3+√13)/2");
    CHECK(element_to_json(num(FieldCtx::make(2), 0, 1))["basis"] == "sqrt(n)");
  }

  TEST_CASE("element errors") {
    const auto q5 = FieldCtx::make(5), q2 = FieldCtx::make(2);
    CHECK(code_of([&] { (void)element_from_json(q2, element_to_json(num(q5, 1, 1))); }) == ErrorCode::CtxMismatch);
    CHECK(code_of([&] { (void)element_from_json(q2, Json{{"a", "1"}}); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { (void)element_from_json(q2, Json{{"a", "x"}, {"b", "1"}, {"basis", "sqrt(n)"}}); }) ==
          ErrorCode::ParseError);
  }

  TEST_CASE("tower round trip") {
    for (const std::int64_t n : {2, 3, 5, 13, 21}) {
      CAPTURE(n);
      const Tower& t = tower_of(n);
      const Json j = tower_to_json(t);
      CHECK(j["schema_version"] == "1");
      CHECK(j["n"] == n);
      const Tower back = tower_from_json(j);
      CHECK(back == t);
      CHECK(tower_from_json(Json::parse(j.dump())) == t);
    }
    const auto p = scratch("t13.json");
    write_json(tower_of(13), p);
    CHECK(read_json(p) == tower_of(13));
  }

  TEST_CASE("schema errors") {
    Json j = tower_to_json(tower_of(2));
    j["schema_version"] = "2";
    CHECK(code_of([&] { (void)tower_from_json(j); }) == ErrorCode::ParseError);
    Json k = tower_to_json(tower_of(2));
    k.erase("events");
    CHECK(code_of([&] { (void)tower_from_json(k); }) == ErrorCode::ParseError);
    const auto p = scratch("garbage.json");
    std::ofstream(p) << "{not json";
    CHECK(code_of([&] { (void)read_json(p); }) == ErrorCode::ParseError);
    CHECK(code_of([] { (void)read_json("/nonexistent-dir/t.json"); }) == ErrorCode::IoError);
  }
}

TEST_SUITE("svg") {
  TEST_CASE("slice picture") {
    const auto ctx = FieldCtx::make(5);
    const TorusSlice s = dirichlet_slice(ctx, Level::one(ctx));
    std::ostringstream os;
    write_svg_slice(s, os);
    const std::string svg = os.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);
    CHECK(svg.find("hexagon") != std::string::npos);
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = svg.find("<line ", pos)) != std::string::npos; ++pos) ++lines;
    CHECK(lines >= 6);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
  }
}

TEST_SUITE("csv") {
  TEST_CASE("levels CSV for n = 2") {
    std::ostringstream os;
    write_table2_csv(tower_of(2), os);
    CHECK(os.str() ==
          "n,i,note,level,k_squared,side1,side2,side3\r\n"
          "2,1,,1,1,1,√2,\r\n"
          "2,2,,ε,3+2√2,1+√2,1,\r\n"
          "2,3,,ε^2,17+12√2,2+√2,1+√2,\r\n"
          "2,4,,ε^3,99+70√2,3+2√2,1+√2,\r\n"
          "2,5,m,ε^4,577+408√2,4+3√2,3+2√2,\r\n");
  }

  TEST_CASE("levels CSV for n = 5 with hexagonal rows") {
    std::ostringstream os;
    write_table2_csv(tower_of(5), os);
    CHECK(os.str() ==
          "n,i,note,level,k_squared,side1,side2,side3\r\n"
          "5,,hexagonal,1,1,(-1+√5)/2,1,(1+√5)/2\r\n"
          "5,1,,ε,(3+√5)/2,1,(1+√5)/2,\r\n"
          "5,2,m-1,ε^3,9+4√5,(3+√5)/2,(1+√5)/2,\r\n"
          "5,,hexagonal,ε^4,(47+21√5)/2,(1+√5)/2,(3+√5)/2,2+√5\r\n");
  }

  TEST_CASE("units CSV") {
    std::vector<FieldCtx> fields;
    for (const std::int64_t n : {2, 3, 5, 13}) fields.push_back(FieldCtx::make(n));
    std::ostringstream os;
    write_table1_csv(fields, os);
    CHECK(os.str() ==
          "n,epsilon,norm,epsilon_squared\r\n"
          "2,1+√2,-1,1+2ε\r\n"
          "3,2+√3,1,-1+4ε\r\n"
          "5,(1+√5)/2,-1,1+ε\r\n"
          "13,(3+√13)/2,-1,1+3ε\r\n");
  }

  TEST_CASE("files") {
    const auto paths = write_csv_tables(FieldCtx::make(3), scratch("n3"));
    CHECK(paths[0].filename() == "n3_table1.csv");
    CHECK(paths[1].filename() == "n3_table2.csv");
    CHECK(slurp(paths[0]).rfind("n,epsilon,norm,epsilon_squared\r\n3,", 0) == 0);
    std::ostringstream os;
    write_table2_csv(tower_of(3), os);
    CHECK(slurp(paths[1]) == os.str());
    CHECK(code_of([] { (void)write_csv_tables(FieldCtx::make(3), "/nonexistent-dir/x"); }) == ErrorCode::IoError);
  }

  TEST_CASE("eps^2 combination") {
    CHECK(epsilon_squared_combo(fundamental_unit(FieldCtx::make(2))) == "ε²=1+2ε");
    CHECK(epsilon_squared_combo(fundamental_unit(FieldCtx::make(13))) == "ε²=1+3ε");
  }
}
