#include "lfrac/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "lfrac/io_util.hpp"

namespace lfrac::cli {
namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
  throw std::invalid_argument("config: " + ctx + ": " + msg);
}

void check_keys(const ojson& obj, const std::string& ctx,
                std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&](std::string_view k) { return k == it.key(); });
    if (!known) fail(ctx, "unknown key \"" + it.key() + "\"");
  }
}

const ojson& need(const ojson& obj, const std::string& ctx,
                  const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ctx, "missing key \"" + key + "\"");
  return *it;
}

const ojson& need_object(const ojson& v, const std::string& ctx) {
  if (!v.is_object()) fail(ctx, "must be an object");
  return v;
}

double as_number(const ojson& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx, "must be a number");
  return v.get<double>();
}

int as_int(const ojson& v, const std::string& ctx) {
  if (!v.is_number_integer()) fail(ctx, "must be an integer");
  return v.get<int>();
}

std::string as_string(const ojson& v, const std::string& ctx) {
  if (!v.is_string()) fail(ctx, "must be a string");
  return v.get<std::string>();
}

std::vector<double> as_number_array(const ojson& v, const std::string& ctx) {
  if (!v.is_array()) fail(ctx, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_number(e, ctx));
  return out;
}

Point as_point(const ojson& v, const std::string& ctx, int n) {
  const auto a = as_number_array(v, ctx);
  if (a.size() != static_cast<std::size_t>(n)) {
    std::ostringstream os;
    os << "expected " << n << " coordinates, got " << a.size();
    fail(ctx, os.str());
  }
  return n == 1 ? Point(a[0]) : Point(a[0], a[1]);
}

Box as_box(const ojson& v, const std::string& ctx, int n) {
  need_object(v, ctx);
  check_keys(v, ctx, {"lower", "upper"});
  return Box(as_point(need(v, ctx, "lower"), ctx + ".lower", n),
             as_point(need(v, ctx, "upper"), ctx + ".upper", n));
}

Similitude as_map(const ojson& v, const std::string& ctx, int n) {
  need_object(v, ctx);
  check_keys(v, ctx, {"scale", "translate", "ortho"});
  const double gamma = as_number(need(v, ctx, "scale"), ctx + ".scale");
  const Point tau =
      as_point(need(v, ctx, "translate"), ctx + ".translate", n);
  if (n == 1) {
    const double ortho = v.contains("ortho")
                             ? as_number(v["ortho"], ctx + ".ortho")
                             : 1.0;
    return Similitude(gamma, ortho, tau[0]);
  }
  std::array<double, 4> ortho{1.0, 0.0, 0.0, 1.0};
  if (v.contains("ortho")) {
    const auto a = as_number_array(v["ortho"], ctx + ".ortho");
    if (a.size() != 4)
      fail(ctx + ".ortho", "expected 4 row-major entries for dimension 2");
    std::copy(a.begin(), a.end(), ortho.begin());
  }
  return Similitude(gamma, ortho, tau);
}

FunctionSpec as_funcspec(const ojson& v, const std::string& ctx,
                         const Box& domain) {
  need_object(v, ctx);
  const std::string kind = as_string(need(v, ctx, "kind"), ctx + ".kind");
  if (kind == "constant") {
    check_keys(v, ctx, {"kind", "value"});
    return FunctionSpec::constant(domain,
                                  as_number(need(v, ctx, "value"),
                                            ctx + ".value"));
  }
  if (kind == "polynomial") {
    check_keys(v, ctx, {"kind", "coefficients"});
    const ojson& c = need(v, ctx, "coefficients");
    if (!c.is_array()) fail(ctx + ".coefficients", "must be an array");
    if (domain.dim() == 1)
      return FunctionSpec::polynomial(domain,
                                      as_number_array(c, ctx + ".coefficients"));
    std::vector<std::vector<double>> rows;
    rows.reserve(c.size());
    for (const auto& row : c)
      rows.push_back(as_number_array(row, ctx + ".coefficients"));
    return FunctionSpec::polynomial(domain, rows);
  }
  if (kind == "samples") {
    check_keys(v, ctx, {"kind", "shape", "values"});
    const auto raw = as_number_array(need(v, ctx, "shape"), ctx + ".shape");
    std::vector<std::size_t> shape;
    for (double d : raw) {
      if (d < 1.0 || d != std::floor(d))
        fail(ctx + ".shape", "entries must be positive integers");
      shape.push_back(static_cast<std::size_t>(d));
    }
    return FunctionSpec::samples(
        domain, shape, as_number_array(need(v, ctx, "values"), ctx + ".values"));
  }
  fail(ctx + ".kind",
       "must be one of \"constant\", \"polynomial\", \"samples\"");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_space_arg(std::string_view token, const std::string& query) {
  if (token == "inf" || token == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    return parse_double(token);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("space query \"" + query +
                                "\": bad argument \"" + std::string(token) +
                                "\"");
  }
}

int integral_arg(double v, const std::string& query, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e6)
    throw std::invalid_argument("space query \"" + query + "\": " + what +
                                " must be a non-negative integer");
  return static_cast<int>(v);
}

SolverSettings parse_solver(const ojson& v) {
  need_object(v, "solver");
  check_keys(v, "solver", {"level", "tolerance", "max_iterations"});
  SolverSettings s;
  if (v.contains("level")) s.level = as_int(v["level"], "solver.level");
  if (v.contains("tolerance"))
    s.tol = as_number(v["tolerance"], "solver.tolerance");
  if (v.contains("max_iterations"))
    s.max_iter = as_int(v["max_iterations"], "solver.max_iterations");
  return s;
}

SeminormSettings parse_seminorm(const ojson& v, int system_dim) {
  need_object(v, "seminorm");
  check_keys(v, "seminorm",
             {"space", "h_min", "h_max", "radii", "directions", "regions",
              "fixed_point_csv"});
  SeminormSettings s;
  if (v.contains("space"))
    s.space = as_string(v["space"], "seminorm.space");
  if (v.contains("h_min"))
    s.h_min = as_number(v["h_min"], "seminorm.h_min");
  if (v.contains("h_max"))
    s.h_max = as_number(v["h_max"], "seminorm.h_max");
  if (v.contains("radii"))
    s.radius_count = as_int(v["radii"], "seminorm.radii");
  if (v.contains("directions"))
    s.direction_count = as_int(v["directions"], "seminorm.directions");
  if (v.contains("fixed_point_csv"))
    s.fixed_point_csv =
        as_string(v["fixed_point_csv"], "seminorm.fixed_point_csv");
  if (v.contains("regions")) {
    const ojson& r = v["regions"];
    if (r.is_string()) {
      if (r.get<std::string>() != "pieces")
        fail("seminorm.regions",
             "string form must be \"pieces\" (the piece images)");
      if (system_dim == 0)
        fail("seminorm.regions",
             "\"pieces\" needs a system config, not a direct function");
      s.regions_from_pieces = true;
    } else if (r.is_array()) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::ostringstream ctx;
        ctx << "seminorm.regions[" << i << "]";
        const ojson& e = r[i];
        need_object(e, ctx.str());
        int n = system_dim;
        if (n == 0) {
          const auto it = e.find("lower");
          n = (it != e.end() && it->is_array()) ? static_cast<int>(it->size())
                                                : 1;
        }
        s.regions.push_back(as_box(e, ctx.str(), n));
      }
    } else {
      fail("seminorm.regions", "must be \"pieces\" or an array of boxes");
    }
  }
  return s;
}

AttractorSettings parse_attractor(const ojson& v) {
  need_object(v, "attractor");
  check_keys(v, "attractor",
             {"mode", "steps", "seed_count", "seed_level", "y_bound", "snap"});
  AttractorSettings a;
  if (v.contains("mode")) {
    const std::string mode = as_string(v["mode"], "attractor.mode");
    if (mode == "base")
      a.mode = AttractorSettings::Mode::base;
    else if (mode == "graph")
      a.mode = AttractorSettings::Mode::graph;
    else
      fail("attractor.mode", "must be \"base\" or \"graph\"");
  }
  if (v.contains("steps")) a.steps = as_int(v["steps"], "attractor.steps");
  if (v.contains("seed_count"))
    a.seed_count = as_int(v["seed_count"], "attractor.seed_count");
  if (v.contains("seed_level"))
    a.seed_level = as_int(v["seed_level"], "attractor.seed_level");
  if (v.contains("y_bound"))
    a.y_bound = as_number(v["y_bound"], "attractor.y_bound");
  if (v.contains("snap")) a.snap = as_number(v["snap"], "attractor.snap");
  return a;
}

// Cache key: the system and solver subtrees re-serialized with sorted
// keys, so formatting and key order in the file do not matter.
std::string system_digest(const ojson& doc, const SolverSettings& solver) {
  ojson sub;
  sub["dimension"] = doc["dimension"];
  sub["domain"] = doc["domain"];
  sub["pieces"] = doc["pieces"];
  sub["solver"] = ojson{{"level", solver.level},
                        {"tolerance", solver.tol},
                        {"max_iterations", solver.max_iter}};
  const nlohmann::json canon = nlohmann::json::parse(sub.dump());
  return "fnv1a:" + fnv1a_hex(canon.dump());
}

}  // namespace

SpaceQuery parse_space_query(const std::string& text) {
  std::string compact;
  compact.reserve(text.size());
  for (char c : text)
    if (c != ' ' && c != '\t') compact.push_back(c);

  const std::size_t open = compact.find('(');
  if (open == std::string::npos || compact.empty() ||
      compact.back() != ')' || open + 1 >= compact.size())
    throw std::invalid_argument(
        "space query \"" + text +
        "\": expected name(arg, ...), e.g. hoelder(0.6) or besov(2,2,0.5,1)");

  SpaceQuery q;
  const std::string name = compact.substr(0, open);
  const std::string inner = compact.substr(open + 1, compact.size() - open - 2);
  for (std::string_view tok : split(inner, ','))
    q.args.push_back(parse_space_arg(tok, text));

  const auto arity = [&](std::size_t want, const char* sig) {
    if (q.args.size() != want)
      throw std::invalid_argument("space query \"" + text + "\": " + name +
                                  " takes arguments (" + sig + ")");
  };
  if (name == "besov" || name == "triebel") {
    q.kind = name == "besov" ? SpaceQuery::Kind::besov
                             : SpaceQuery::Kind::triebel;
    arity(4, "p, q, s, M");
  } else if (name == "lp") {
    q.kind = SpaceQuery::Kind::lp;
    arity(1, "p");
  } else if (name == "hoelder") {
    q.kind = SpaceQuery::Kind::preset;
    q.preset = name;
    arity(1, "s");
  } else if (name == "sobolev") {
    q.kind = SpaceQuery::Kind::preset;
    q.preset = name;
    arity(2, "k, p");
  } else if (name == "slodeckij" || name == "bessel") {
    q.kind = SpaceQuery::Kind::preset;
    q.preset = name;
    arity(2, "s, p");
  } else if (name == "hardy") {
    q.kind = SpaceQuery::Kind::preset;
    q.preset = name;
    arity(1, "p");
  } else {
    throw std::invalid_argument(
        "space query \"" + text + "\": unknown space \"" + name +
        "\"; known: hoelder, sobolev, slodeckij, bessel, hardy, lp, besov, "
        "triebel");
  }

  std::string norm = name + "(";
  for (std::size_t i = 0; i < q.args.size(); ++i) {
    if (i) norm += ",";
    norm += format_double(q.args[i]);
  }
  norm += ")";
  q.text = norm;
  return q;
}

ResolvedSpace resolve_space(const SpaceQuery& q, int dim) {
  ResolvedSpace r;
  r.query = q;
  switch (q.kind) {
    case SpaceQuery::Kind::lp:
      r.lp_p = q.args[0];
      return r;
    case SpaceQuery::Kind::besov:
    case SpaceQuery::Kind::triebel: {
      r.family = q.kind == SpaceQuery::Kind::besov
                     ? SpaceFamily::besov
                     : SpaceFamily::triebel_lizorkin;
      r.params.n = dim;
      r.params.p = q.args[0];
      r.params.q = q.args[1];
      r.params.s = q.args[2];
      r.params.M = integral_arg(q.args[3], q.text, "M");
      return r;
    }
    case SpaceQuery::Kind::preset:
      break;
  }
  PresetSpace preset;
  if (q.preset == "hoelder") {
    preset = preset_hoelder(q.args[0], dim);
  } else if (q.preset == "sobolev") {
    preset = preset_sobolev(integral_arg(q.args[0], q.text, "k"), q.args[1],
                            dim);
  } else if (q.preset == "slodeckij") {
    preset = preset_slodeckij(q.args[0], q.args[1], dim);
  } else if (q.preset == "bessel") {
    preset = preset_bessel(q.args[0], q.args[1], dim);
  } else {
    preset = preset_local_hardy(q.args[0], dim);
    r.lp_p = q.args[0];
  }
  r.family = preset.family;
  r.params = preset.params;
  r.reporting_only = preset.reporting_only;
  r.caveat = preset.caveat;
  return r;
}

Config load_config(const std::string& path) {
  const std::string text = read_file(path);
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, byte);
    std::ostringstream os;
    os << path << ": malformed document at line " << line << ", column "
       << col;
    throw ParseError(os.str());
  }
  if (!doc.is_object()) fail("top level", "must be an object");
  check_keys(doc, "top level",
             {"dimension", "domain", "pieces", "function", "solver", "spaces",
              "seminorm", "attractor"});

  Config cfg;
  const bool has_pieces = doc.contains("pieces");
  const bool has_function = doc.contains("function");
  if (has_pieces == has_function)
    fail("top level",
         "exactly one of \"pieces\" (system mode) and \"function\" "
         "(direct-function mode) must be present");

  if (doc.contains("solver")) cfg.solver = parse_solver(doc["solver"]);

  int dim = 0;
  if (has_function) {
    if (doc.contains("dimension") || doc.contains("domain"))
      fail("top level",
           "\"dimension\" and \"domain\" are not used in direct-function "
           "mode; the CSV determines both");
    const ojson& fn = need_object(doc["function"], "function");
    check_keys(fn, "function", {"csv"});
    cfg.function_csv = as_string(need(fn, "function", "csv"), "function.csv");
  } else {
    dim = as_int(need(doc, "top level", "dimension"), "dimension");
    if (dim != 1 && dim != 2) fail("dimension", "must be 1 or 2");
    const Box domain = as_box(need(doc, "top level", "domain"), "domain", dim);
    const ojson& pieces = doc["pieces"];
    if (!pieces.is_array() || pieces.empty())
      fail("pieces", "must be a non-empty array");
    std::vector<PartitionPiece> parts;
    std::vector<FunctionSpec> lambdas, scalings;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      std::ostringstream ctx;
      ctx << "pieces[" << i << "]";
      const ojson& pc = need_object(pieces[i], ctx.str());
      check_keys(pc, ctx.str(), {"subdomain", "map", "lambda", "scaling"});
      const Box sub =
          as_box(need(pc, ctx.str(), "subdomain"), ctx.str() + ".subdomain",
                 dim);
      parts.push_back(PartitionPiece{
          sub, as_map(need(pc, ctx.str(), "map"), ctx.str() + ".map", dim)});
      lambdas.push_back(as_funcspec(need(pc, ctx.str(), "lambda"),
                                    ctx.str() + ".lambda", sub));
      scalings.push_back(as_funcspec(need(pc, ctx.str(), "scaling"),
                                     ctx.str() + ".scaling", sub));
    }
    cfg.system.emplace(Partition(domain, std::move(parts)),
                       std::move(lambdas), std::move(scalings));
    cfg.digest = system_digest(doc, cfg.solver);
  }

  if (doc.contains("spaces")) {
    const ojson& arr = doc["spaces"];
    if (!arr.is_array()) fail("spaces", "must be an array of query strings");
    for (const auto& e : arr)
      cfg.spaces.push_back(parse_space_query(as_string(e, "spaces")));
  }
  if (doc.contains("seminorm"))
    cfg.seminorm = parse_seminorm(doc["seminorm"], dim);
  if (doc.contains("attractor"))
    cfg.attractor = parse_attractor(doc["attractor"]);
  return cfg;
}

std::string function_to_csv(const SampledFunction& f) {
  const bool planar = f.domain().dim() == 2;
  std::string out = planar ? "x,y,value\n" : "x,value\n";
  const std::size_t per = f.points_per_axis();
  for (std::size_t ix = 0; ix < per; ++ix) {
    if (!planar) {
      out += format_double17(f.grid_point(ix)[0]);
      out += ',';
      out += format_double17(f.at(ix));
      out += '\n';
      continue;
    }
    for (std::size_t iy = 0; iy < per; ++iy) {
      const Point g = f.grid_point(ix, iy);
      out += format_double17(g[0]);
      out += ',';
      out += format_double17(g[1]);
      out += ',';
      out += format_double17(f.at(ix, iy));
      out += '\n';
    }
  }
  return out;
}

namespace {

int dyadic_level(std::size_t per, const std::string& path) {
  for (int level = 0; level <= 25; ++level)
    if ((std::size_t{1} << level) + 1 == per) return level;
  throw std::invalid_argument(
      "function CSV " + path + ": " + std::to_string(per) +
      " points per axis do not form a dyadic grid (2^L + 1 points)");
}

}  // namespace

SampledFunction read_function_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() &&
         (lines.back().empty() || lines.back() == "\r"))
    lines.pop_back();
  if (lines.empty())
    throw std::invalid_argument("function CSV " + path + ": file is empty");

  std::string header(lines.front());
  if (!header.empty() && header.back() == '\r') header.pop_back();
  int dim = 0;
  if (header == "x,value")
    dim = 1;
  else if (header == "x,y,value")
    dim = 2;
  else
    throw std::invalid_argument("function CSV " + path +
                                ": header must be \"x,value\" or "
                                "\"x,y,value\", got \"" +
                                header + "\"");

  std::vector<std::array<double, 3>> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != static_cast<std::size_t>(dim) + 1)
      throw std::invalid_argument("function CSV " + path + ": row " +
                                  std::to_string(i + 1) + " has " +
                                  std::to_string(cells.size()) +
                                  " cells, expected " +
                                  std::to_string(dim + 1));
    std::array<double, 3> row{0.0, 0.0, 0.0};
    for (std::size_t c = 0; c < cells.size(); ++c)
      row[c] = parse_double(cells[c]);
    rows.push_back(row);
  }
  if (rows.empty())
    throw std::invalid_argument("function CSV " + path + ": no data rows");

  if (dim == 1) {
    const std::size_t per = rows.size();
    const int level = dyadic_level(per, path);
    const double lo = rows.front()[0], hi = rows.back()[0];
    if (!(lo < hi))
      throw std::invalid_argument("function CSV " + path +
                                  ": x column must increase");
    SampledFunction f(Box::interval(lo, hi), level);
    const double tol = 1e-9 * (hi - lo);
    for (std::size_t i = 0; i < per; ++i) {
      if (std::abs(rows[i][0] - f.grid_point(i)[0]) > tol)
        throw std::invalid_argument("function CSV " + path + ": row " +
                                    std::to_string(i + 2) +
                                    " is not on the uniform grid");
      f.at(i) = rows[i][1];
    }
    return f;
  }

  const std::size_t count = rows.size();
  const auto per = static_cast<std::size_t>(std::llround(std::sqrt(
      static_cast<double>(count))));
  if (per * per != count)
    throw std::invalid_argument("function CSV " + path +
                                ": planar grids need a square row count");
  const int level = dyadic_level(per, path);
  const double lx = rows.front()[0], ly = rows.front()[1];
  const double ux = rows.back()[0], uy = rows.back()[1];
  if (!(lx < ux && ly < uy))
    throw std::invalid_argument("function CSV " + path +
                                ": corner coordinates must increase");
  SampledFunction f(Box::rectangle(lx, ly, ux, uy), level);
  const double tol = 1e-9 * f.domain().diameter();
  for (std::size_t ix = 0; ix < per; ++ix) {
    for (std::size_t iy = 0; iy < per; ++iy) {
      const auto& row = rows[ix * per + iy];
      const Point g = f.grid_point(ix, iy);
      if (std::abs(row[0] - g[0]) > tol || std::abs(row[1] - g[1]) > tol)
        throw std::invalid_argument(
            "function CSV " + path + ": row " +
            std::to_string(ix * per + iy + 2) +
            " is not on the uniform grid (rows must be x-major)");
      f.at(ix, iy) = row[2];
    }
  }
  return f;
}

}  // namespace lfrac::cli
