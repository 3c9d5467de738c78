// cusp_tower: fundamental units, side lists, bifurcation levels, slices,
// meshes and oracle verification for cusp sections of Hilbert modular
// surfaces over Q(sqrt(n)).
//
// Exit status: 0 success, 1 verification failure, 2 bad input.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cusp/export.hpp"
#include "cusp/parse.hpp"
#include "cusp/tower.hpp"

namespace {

using namespace cusp;

enum class Format { Text, Json, Csv, Obj, Svg };

struct Common {
  std::string format = "text";
  std::string out;
  std::optional<int> digits;
};

Format format_of(const std::string& s) {
  if (s == "text") return Format::Text;
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "obj") return Format::Obj;
  if (s == "svg") return Format::Svg;
  throw Error(ErrorCode::ParseError, "unknown format " + s);
}

[[noreturn]] void unsupported(const std::string& cmd, const std::string& fmt) {
  throw Error(ErrorCode::ParseError, cmd + " does not support --format " + fmt);
}

TowerOptions tower_options() {
  TowerOptions opts;
  if (const char* env = std::getenv("CUSP_TOWER_MAX_ITERS")) {
    try {
      const long long v = std::stoll(env);
      if (v <= 0) throw std::invalid_argument("non-positive");
      opts.max_iterations = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, std::string("CUSP_TOWER_MAX_ITERS must be a positive integer, got ") + env);
    }
  }
  return opts;
}

// Writes to --out when given, else stdout.
template <class F>
void emit(const Common& c, F&& body) {
  if (c.out.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream os(c.out, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + c.out);
  body(os);
  if (!os) throw Error(ErrorCode::IoError, "write failed: " + c.out);
}

int json_digits(const Common& c) { return c.digits.value_or(17); }
int plot_digits(const Common& c) { return c.digits.value_or(9); }

void cmd_unit(std::int64_t n, const Common& c) {
  const FieldCtx ctx = FieldCtx::make(n);
  const QuadElem eps = fundamental_unit(ctx);
  const Format f = format_of(c.format);
  emit(c, [&](std::ostream& os) {
    if (f == Format::Json) {
      Json j{{"n", n}, {"epsilon", element_to_json(eps, json_digits(c))}, {"norm", norm(eps).get_str()},
             {"epsilon_squared", to_linear_string(eps * eps, eps, "ε")}};
      os << j.dump() << '\n';
    } else if (f == Format::Csv) {
      write_table1_csv(std::span<const FieldCtx>(&ctx, 1), os);
    } else if (f == Format::Text) {
      os << "ε=" << to_sqrt_string(eps) << "  N=" << norm(eps).get_str() << "  " << epsilon_squared_combo(eps)
         << '\n';
    } else {
      unsupported("unit", c.format);
    }
  });
}

void cmd_sides(std::int64_t n, const Common& c) {
  const FieldCtx ctx = FieldCtx::make(n);
  const auto result = side_list(ctx, tower_options().max_iterations);
  const Format f = format_of(c.format);
  emit(c, [&](std::ostream& os) {
    if (f == Format::Json) {
      Json sides = Json::array(), trace = Json::array();
      for (const auto& z : result.sides) sides.push_back(element_to_json(z, json_digits(c)));
      for (const auto& p : result.trace) {
        trace.push_back(Json{{"z", element_to_json(p.z, json_digits(c))},
                             {"z_prime", element_to_json(p.z_prime, json_digits(c))}});
      }
      os << Json{{"n", n}, {"sides", sides}, {"trace", trace}}.dump() << '\n';
    } else if (f == Format::Text) {
      os << "L:";
      for (std::size_t i = 0; i < result.sides.size(); ++i) os << (i ? ", " : " ") << to_sqrt_string(result.sides[i]);
      os << '\n';
      for (std::size_t i = 0; i < result.trace.size(); ++i) {
        os << i + 1 << "  " << to_sqrt_string(result.trace[i].z) << "  " << to_sqrt_string(result.trace[i].z_prime)
           << '\n';
      }
    } else {
      unsupported("sides", c.format);
    }
  });
}

void cmd_levels(std::int64_t n, const Common& c) {
  const Tower t = bifurcation_table(FieldCtx::make(n), tower_options());
  const Format f = format_of(c.format);
  emit(c, [&](std::ostream& os) {
    if (f == Format::Csv) {
      write_table2_csv(t, os);
    } else if (f == Format::Json) {
      os << tower_to_json(t, json_digits(c)).dump() << '\n';
    } else if (f == Format::Text) {
      std::ostringstream csv;
      write_table2_csv(t, csv);
      // Same rows as the CSV, tab separated, header dropped.
      std::string line;
      std::istringstream in(csv.str());
      std::getline(in, line);
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        for (char& ch : line) {
          if (ch == ',') ch = '\t';
        }
        os << line << '\n';
      }
    } else {
      unsupported("levels", c.format);
    }
  });
}

void cmd_slice(std::int64_t n, const std::string& ksq, const std::optional<long>& bound, const Common& c) {
  const FieldCtx ctx = FieldCtx::make(n);
  const Level level(parse_element(ctx, ksq));
  std::optional<mpz_class> b;
  if (bound) b = mpz_class(*bound);
  const TorusSlice s = dirichlet_slice(ctx, level, b);
  const Format f = format_of(c.format);
  emit(c, [&](std::ostream& os) {
    if (f == Format::Svg) {
      write_svg_slice(s, os, plot_digits(c));
    } else if (f == Format::Json) {
      Json verts = Json::array(), labels = Json::array(), contrib = Json::array();
      for (const auto& v : s.vertices) {
        verts.push_back(Json::array({element_to_json(v.x1, json_digits(c)), element_to_json(v.x2, json_digits(c))}));
      }
      for (const auto& z : s.edge_labels) labels.push_back(element_to_json(z, json_digits(c)));
      for (const auto& z : s.contributing) contrib.push_back(element_to_json(z, json_digits(c)));
      os << Json{{"n", n},
                 {"k_squared", element_to_json(level.k_squared(), json_digits(c))},
                 {"shape", to_string(s.shape)},
                 {"vertices", verts},
                 {"edge_labels", labels},
                 {"contributing", contrib}}
                .dump()
         << '\n';
    } else if (f == Format::Text) {
      os << "k^2=" << to_sqrt_string(level.k_squared()) << "  shape=" << to_string(s.shape) << '\n';
      os << "contributing:";
      for (const auto& z : s.contributing) os << ' ' << to_sqrt_string(z);
      os << '\n';
      for (std::size_t i = 0; i < s.vertices.size(); ++i) {
        os << "(" << to_sqrt_string(s.vertices[i].x1) << ", " << to_sqrt_string(s.vertices[i].x2) << ")  edge "
           << to_sqrt_string(s.edge_labels[i]) << '\n';
      }
    } else {
      unsupported("slice", c.format);
    }
  });
}

void cmd_mesh(std::int64_t n, int subdivisions, bool linear, const Common& c) {
  const Tower t = bifurcation_table(FieldCtx::make(n), tower_options());
  const Mesh mesh = build_mesh(t, subdivisions, linear ? PsiScale::Linear : PsiScale::LogEps);
  const Format f = format_of(c.format);
  if (f == Format::Json) {
    emit(c, [&](std::ostream& os) { os << tower_to_json(t, json_digits(c)).dump(2) << '\n'; });
    return;
  }
  if (f == Format::Csv) {
    if (c.out.empty()) throw Error(ErrorCode::ParseError, "mesh --format csv needs --out PREFIX");
    const auto paths = write_csv_tables(t.ctx, c.out);
    std::cout << "wrote " << paths[0].string() << " and " << paths[1].string() << '\n';
    return;
  }
  if (f != Format::Text && f != Format::Obj) unsupported("mesh", c.format);
  if (c.out.empty()) {
    write_obj(mesh, std::cout, plot_digits(c));
    return;
  }
  // --out PREFIX writes PREFIX.obj and PREFIX.json.
  write_obj(mesh, std::filesystem::path(c.out + ".obj"), plot_digits(c));
  write_json(t, std::filesystem::path(c.out + ".json"), json_digits(c));
  std::cout << "wrote " << c.out << ".obj (" << mesh.vertices.size() << " vertices, " << mesh.faces.size()
            << " faces) and " << c.out << ".json\n";
}

int cmd_verify(std::int64_t n, int samples, const std::optional<long>& bound) {
  const FieldCtx ctx = FieldCtx::make(n);
  const Tower t = bifurcation_table(ctx, tower_options());
  const mpz_class b = bound ? mpz_class(*bound) : mpz_class(2 * default_coeff_bound(t.epsilon));
  const VerifyReport report = check_tower(t, samples, b);
  if (report.ok) {
    std::cout << "OK: " << report.events << " events, all oracle checks passed\n";
    return 0;
  }
  std::cout << "FAIL: " << report.mismatches.size() << " mismatches\n";
  for (const auto& m : report.mismatches) std::cout << "  " << m << '\n';
  return 1;
}

void cmd_census(const std::string& range, const Common& c) {
  const auto [lo, hi] = parse_range(range);
  if (lo < 2) throw Error(ErrorCode::TooSmall, "census range must start at 2 or above");
  const TowerOptions opts = tower_options();
  emit(c, [&](std::ostream& os) {
    for (std::int64_t n = lo; n <= hi; ++n) {
      if (!is_squarefree(n)) {
        std::cerr << "warning: skipping " << n << " (not squarefree)\n";
        continue;
      }
      os << tower_to_json(bifurcation_table(FieldCtx::make(n), opts), json_digits(c)).dump() << '\n';
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cusp sections of Hilbert modular surfaces over real quadratic fields"};
  app.require_subcommand(1);
  Common common;
  std::int64_t n = 0;
  std::string ksq, range;
  std::optional<long> bound;
  int subdivisions = 16, samples = 3;
  bool linear = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv", "obj", "svg"}));
    sub->add_option("--out", common.out, "Output file (or prefix for mesh)");
    sub->add_option("--digits", common.digits, "Significant digits for float views")->check(CLI::Range(1, 40));
  };
  auto add_n = [&](CLI::App* sub) { sub->add_option("n", n, "Squarefree integer n >= 2")->required(); };

  auto* unit = app.add_subcommand("unit", "Fundamental unit, its norm and eps^2 in terms of eps");
  add_n(unit);
  add_common(unit);
  auto* sides = app.add_subcommand("sides", "Side list and the (z, z') trace");
  add_n(sides);
  add_common(sides);
  auto* levels = app.add_subcommand("levels", "Levels where the slice is a parallelogram, with their sides");
  add_n(levels);
  add_common(levels);
  auto* slice = app.add_subcommand("slice", "Dirichlet slice at one level");
  add_n(slice);
  add_common(slice);
  slice->add_option("--ksq", ksq, "k^2 as an exact expression, e.g. 7/6+1/6*sqrt(13)")->required();
  slice->add_option("--bound", bound, "Coefficient bound of the candidate box")->check(CLI::PositiveNumber);
  auto* mesh = app.add_subcommand("mesh", "Boundary mesh of the tower (OBJ) plus its JSON");
  add_n(mesh);
  add_common(mesh);
  mesh->add_option("--subdivisions", subdivisions, "Intermediate levels per interval")->check(CLI::PositiveNumber);
  mesh->add_flag("--linear", linear, "Use k instead of log_eps(k) as third coordinate");
  auto* verify = app.add_subcommand("verify", "Check the tower against the Dirichlet oracle");
  add_n(verify);
  verify->add_option("--samples", samples, "Interior levels per interval")->check(CLI::NonNegativeNumber);
  verify->add_option("--bound", bound, "Coefficient bound of the oracle")->check(CLI::PositiveNumber);
  auto* census = app.add_subcommand("census", "JSON-lines towers for a range such as 2..30");
  census->add_option("range", range, "n or lo..hi")->required();
  add_common(census);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*unit) cmd_unit(n, common);
    if (*sides) cmd_sides(n, common);
    if (*levels) cmd_levels(n, common);
    if (*slice) cmd_slice(n, ksq, bound, common);
    if (*mesh) cmd_mesh(n, subdivisions, linear, common);
    if (*verify) return cmd_verify(n, samples, bound);
    if (*census) cmd_census(range, common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::VerificationFailed ? 1 : 2;
  }
  return 0;
}
