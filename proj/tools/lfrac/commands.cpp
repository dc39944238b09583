#include "lfrac/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "lfrac/attractor.hpp"
#include "lfrac/config.hpp"
#include "lfrac/io_util.hpp"
#include "lfrac/seminorms.hpp"

namespace lfrac::cli {
namespace {

using ojson = nlohmann::ordered_json;

void emit(const ojson& doc) { std::cout << doc.dump(2) << "\n"; }

const LocalFractalSystem& require_system(const Config& cfg, const char* cmd) {
  if (!cfg.system)
    throw std::invalid_argument(std::string(cmd) +
                                " needs a system config; direct-function "
                                "configs carry no pieces");
  return *cfg.system;
}

ojson num_or_inf(double v) {
  return std::isfinite(v) ? ojson(v) : ojson("inf");
}

ojson params_json(const SpaceParams& sp) {
  return ojson{{"n", sp.n},
               {"p", num_or_inf(sp.p)},
               {"q", num_or_inf(sp.q)},
               {"s", sp.s},
               {"M", sp.M}};
}

ojson report_json(const ConditionReport& rep) {
  return ojson{{"xi", rep.xi},
               {"eta", rep.eta},
               {"xi_norm", rep.xi_norm},
               {"eta_norm", rep.eta_norm},
               {"condition_value", rep.condition_value},
               {"sigma_threshold", rep.sigma_threshold},
               {"verdict",
                rep.verdict == Verdict::sufficient ? "sufficient"
                                                   : "not_implied"},
               {"notes", rep.notes}};
}

ojson specialized_json(const std::string& formula, double value,
                       double threshold) {
  return ojson{{"formula", formula},
               {"value", value},
               {"threshold", threshold},
               {"satisfied", value < threshold}};
}

// The one-line left-hand sides the uniform shape admits; attached next to
// the general checker result so the two can be compared directly.
void attach_specialized(ojson& entry, const ResolvedSpace& rs,
                        const SystemSummary& sum,
                        const std::optional<UniformSystem>& uni) {
  const std::string& preset = rs.query.preset;
  if (preset == "hoelder") {
    entry["specialized"] = specialized_json(
        "max(max supS, max gamma^-s supS)",
        hoelder_value(sum, rs.query.args[0]), 1.0);
    return;
  }
  if (!uni) return;
  if (preset == "sobolev" && rs.params.p == 2.0) {
    entry["specialized"] = specialized_json(
        "sum supS^2 m^(2k-1)",
        sobolev_uniform_value(*uni, static_cast<int>(rs.query.args[0])), 1.0);
  } else if (preset == "slodeckij") {
    entry["specialized"] = specialized_json(
        "sum supS^p m^(sp-1)",
        slodeckij_uniform_value(*uni, rs.query.args[0], rs.query.args[1]),
        1.0);
  } else if (preset == "bessel") {
    entry["specialized"] = specialized_json(
        "sum supS^p m^(sp-1)",
        bessel_uniform_value(*uni, rs.query.args[0], rs.query.args[1]), 1.0);
  } else if (preset == "hardy") {
    entry["specialized"] =
        specialized_json("sum supS^p", local_hardy_uniform_value(*uni, rs.lp_p),
                         static_cast<double>(uni->m));
  }
}

void fill_check_entry(ojson& entry, const ResolvedSpace& rs,
                      const SystemSummary& sum,
                      const std::optional<UniformSystem>& uni) {
  if (rs.query.kind == SpaceQuery::Kind::lp) {
    entry["family"] = "lebesgue";
    entry["params"] = ojson{{"p", num_or_inf(rs.lp_p)}};
    entry["report"] = report_json(check_Lp(sum, rs.lp_p));
    return;
  }
  if (rs.query.kind == SpaceQuery::Kind::preset && rs.query.preset == "hardy") {
    entry["family"] = "local_hardy";
    entry["params"] = ojson{{"p", num_or_inf(rs.lp_p)}, {"s", 0.0}};
    if (!rs.caveat.empty()) entry["caveat"] = rs.caveat;
    entry["report"] = report_json(check_Lp(sum, rs.lp_p));
    attach_specialized(entry, rs, sum, uni);
    return;
  }
  entry["family"] = rs.family == SpaceFamily::besov ? "besov"
                                                    : "triebel_lizorkin";
  entry["params"] = params_json(rs.params);
  if (!rs.caveat.empty()) entry["caveat"] = rs.caveat;
  const ConditionReport rep = rs.family == SpaceFamily::besov
                                  ? check_besov(sum, rs.params)
                                  : check_triebel(sum, rs.params);
  entry["report"] = report_json(rep);
  if (rs.query.kind == SpaceQuery::Kind::preset)
    attach_specialized(entry, rs, sum, uni);
}

std::string format_point(const Point& x) {
  std::string out = "(" + format_double(x[0]);
  if (x.dim == 2) out += ", " + format_double(x[1]);
  return out + ")";
}

SolveOptions solve_options(const Config& cfg) {
  SolveOptions opts;
  opts.level = cfg.solver.level;
  opts.tol = cfg.solver.tol;
  opts.max_iter = cfg.solver.max_iter;
  return opts;
}

SampledFunction solve_or_throw(const Config& cfg) {
  const SolveOptions opts = solve_options(cfg);
  FixedPointResult res = solve_fixed_point(*cfg.system, opts);
  if (!res.diagnostics.converged) {
    std::ostringstream os;
    os << "solver did not converge within " << opts.max_iter
       << " iterations; last residual " << res.diagnostics.final_residual;
    throw std::runtime_error(os.str());
  }
  return std::move(res.f);
}

HGrid build_hgrid(const SampledFunction& f, const SeminormSettings& s) {
  if (!s.h_min && !s.h_max)
    return HGrid::defaults_for(f, s.radius_count, s.direction_count);
  const int dim = f.domain().dim();
  double spacing = f.spacing(0);
  if (dim == 2) spacing = std::max(spacing, f.spacing(1));
  const double h_max = s.h_max.value_or(f.domain().diameter());
  const double h_min = s.h_min.value_or(4.0 * spacing);
  const double snap = dim == 1 ? f.spacing(0) : 0.0;
  return HGrid::make(dim, h_min, h_max, s.radius_count, s.direction_count,
                     snap);
}

}  // namespace

int cmd_validate(const CommonArgs& a) {
  const Config cfg = load_config(a.config_path);
  const LocalFractalSystem& sys = require_system(cfg, "validate");
  const Partition& part = sys.partition();
  const ValidationReport rep = validate(part);

  const auto yesno = [](bool b) { return b ? "yes" : "no"; };
  std::cout << "pieces: " << part.size() << "\n";
  std::cout << "method: "
            << (rep.exact ? "interval arithmetic" : "probe grid") << "\n";
  std::cout << "subdomains contained: " << yesno(rep.pieces_contained)
            << "\n";
  std::cout << "images disjoint: " << yesno(rep.images_disjoint) << "\n";
  std::cout << "images cover: " << yesno(rep.images_cover) << "\n";
  std::cout << "max scaling sup: " << format_double(max_scaling_sup(sys))
            << "\n";
  for (const std::string& p : rep.problems)
    std::cout << "problem: " << p << "\n";
  for (const Point& w : rep.witness_points)
    std::cout << "witness: " << format_point(w) << "\n";
  std::cout << (rep.valid() ? "result: valid partition\n"
                            : "result: invalid partition\n");
  return rep.valid() ? 0 : 1;
}

int cmd_solve(const CommonArgs& a) {
  const Config cfg = load_config(a.config_path);
  const LocalFractalSystem& sys = require_system(cfg, "solve");
  if (a.out_path.empty())
    throw std::invalid_argument("solve needs --out for the fixed-point CSV");

  const SolveOptions opts = solve_options(cfg);
  FixedPointResult res = solve_fixed_point(sys, opts);
  if (!res.diagnostics.converged) {
    std::ostringstream os;
    os << "solver did not converge within " << opts.max_iter
       << " iterations; last residual " << res.diagnostics.final_residual;
    throw std::runtime_error(os.str());
  }

  const std::string csv = function_to_csv(res.f);
  write_file(a.out_path, csv);
  const std::string meta_path = a.out_path + ".meta.json";
  ojson meta;
  meta["schema"] = "lfrac-fixed-point/1";
  meta["system_digest"] = cfg.digest;
  meta["level"] = opts.level;
  meta["csv_fnv1a"] = fnv1a_hex(csv);
  write_file(meta_path, meta.dump(2) + "\n");

  const int probe_level = std::min(opts.level,
                                   sys.partition().dim() == 1 ? 10 : 6);
  ojson rep;
  rep["command"] = "solve";
  rep["seed"] = a.seed;
  rep["threads"] = a.threads;
  rep["grid"] = ojson{{"level", opts.level},
                      {"points", res.f.value_count()}};
  rep["solver"] = ojson{{"iterations", res.diagnostics.iterations},
                        {"residual", res.diagnostics.final_residual},
                        {"converged", res.diagnostics.converged},
                        {"tolerance", opts.tol},
                        {"max_iterations", opts.max_iter}};
  rep["contraction"] =
      ojson{{"sup_bound", max_scaling_sup(sys)},
            {"estimate",
             sup_contraction_estimate(sys, 6, a.seed, probe_level)}};
  rep["artifacts"] =
      ojson{{"fixed_point_csv", a.out_path}, {"meta", meta_path}};
  emit(rep);
  return 0;
}

int cmd_check(const CommonArgs& a) {
  const Config cfg = load_config(a.config_path);
  const LocalFractalSystem& sys = require_system(cfg, "check");

  std::vector<SpaceQuery> queries;
  if (!a.spaces.empty()) {
    for (const std::string& s : a.spaces)
      queries.push_back(parse_space_query(s));
  } else {
    queries = cfg.spaces;
  }
  if (queries.empty())
    throw std::invalid_argument(
        "no space queries: pass --space or add a \"spaces\" list to the "
        "config");
  // Each queried space appears exactly once, first occurrence wins.
  std::vector<SpaceQuery> unique;
  for (SpaceQuery& q : queries) {
    const bool seen = std::any_of(
        unique.begin(), unique.end(),
        [&](const SpaceQuery& u) { return u.text == q.text; });
    if (!seen) unique.push_back(std::move(q));
  }

  const SystemSummary sum = SystemSummary::from_system(sys);
  const auto uni = as_uniform(sum);

  ojson out;
  out["command"] = "check";
  out["seed"] = a.seed;
  out["threads"] = a.threads;
  out["system"] = ojson{{"pieces", sum.gammas.size()},
                        {"gammas", sum.gammas},
                        {"scaling_sups", sum.sup_S},
                        {"uniform", uni ? ojson(uni->m) : ojson(nullptr)}};
  out["spaces"] = ojson::array();
  for (const SpaceQuery& q : unique) {
    ojson entry;
    entry["query"] = q.text;
    try {
      fill_check_entry(entry, resolve_space(q, sum.n), sum, uni);
    } catch (const std::exception& e) {
      entry["error"] = e.what();
    }
    out["spaces"].push_back(std::move(entry));
  }
  emit(out);
  return 0;
}

int cmd_seminorm(const CommonArgs& a) {
  const Config cfg = load_config(a.config_path);

  std::string query_text;
  if (a.spaces.size() > 1)
    throw std::invalid_argument("seminorm takes exactly one --space");
  if (a.spaces.size() == 1)
    query_text = a.spaces[0];
  else if (cfg.seminorm.space)
    query_text = *cfg.seminorm.space;
  else if (cfg.spaces.size() == 1)
    query_text = cfg.spaces[0].text;
  else
    throw std::invalid_argument(
        "no space query: pass --space or set seminorm.space in the config");
  const SpaceQuery q = parse_space_query(query_text);

  std::optional<SampledFunction> fopt;
  std::string source;
  std::string cache_note;
  if (cfg.function_csv) {
    fopt = read_function_csv(*cfg.function_csv);
    source = "direct";
  } else {
    require_system(cfg, "seminorm");
    if (cfg.seminorm.fixed_point_csv) {
      const std::string& fp = *cfg.seminorm.fixed_point_csv;
      const std::string meta_path = fp + ".meta.json";
      if (std::filesystem::exists(fp) && std::filesystem::exists(meta_path)) {
        // Reuse the solve artifact only when both the config subtree and
        // the file bytes still match the recorded hashes.
        try {
          const ojson meta = ojson::parse(read_file(meta_path));
          const std::string csv = read_file(fp);
          if (meta.value("system_digest", std::string()) == cfg.digest &&
              meta.value("csv_fnv1a", std::string()) == fnv1a_hex(csv)) {
            fopt = read_function_csv(fp);
            source = "cache";
          } else {
            cache_note = "cached fixed point at " + fp +
                         " does not match this config; re-solved";
          }
        } catch (const std::exception&) {
          cache_note = "cached fixed point at " + fp +
                       " is unreadable; re-solved";
        }
      } else {
        cache_note = "no cached fixed point at " + fp + "; solved";
      }
    }
    if (!fopt) {
      fopt = solve_or_throw(cfg);
      source = "solved";
    }
  }
  const SampledFunction& f = *fopt;
  const int dim = f.domain().dim();
  // The membership preset rejects integer-s Hoelder queries (the classical
  // identification fails there), but the order-(s+1) difference seminorm is
  // still well defined; read them as the matching Besov-scale estimate.
  const ResolvedSpace rs = [&] {
    if (q.kind == SpaceQuery::Kind::preset && q.preset == "hoelder" &&
        q.args[0] >= 1.0 && q.args[0] == std::floor(q.args[0])) {
      ResolvedSpace r;
      r.query = q;
      r.family = SpaceFamily::besov;
      r.params.n = dim;
      r.params.p = std::numeric_limits<double>::infinity();
      r.params.q = std::numeric_limits<double>::infinity();
      r.params.s = q.args[0];
      r.params.M = static_cast<int>(q.args[0]) + 1;
      r.caveat =
          "integer s estimated as the Zygmund-type scale with differences "
          "of order s + 1";
      return r;
    }
    return resolve_space(q, dim);
  }();

  ojson out;
  out["command"] = "seminorm";
  out["space"] = q.text;
  out["seed"] = a.seed;
  out["threads"] = a.threads;
  out["fixed_point_source"] = source;
  if (!cache_note.empty()) out["cache_note"] = cache_note;
  out["grid"] = ojson{{"level", f.level()}, {"points", f.value_count()}};

  if (q.kind == SpaceQuery::Kind::lp) {
    if (!a.out_path.empty())
      throw std::invalid_argument(
          "lp queries have no h-profile; drop --out or query a smoothness "
          "space");
    out["family"] = "lebesgue";
    out["lp_norm"] = lp_norm_grid(f, rs.lp_p);
    emit(out);
    return 0;
  }
  if (rs.query.kind == SpaceQuery::Kind::preset && rs.query.preset == "hardy")
    throw std::invalid_argument(
        "the local Hardy scale sits at smoothness 0 and has no seminorm; "
        "query lp(p) or use check");

  const SpaceParams sp = rs.params;
  const HGrid hg = build_hgrid(f, cfg.seminorm);
  const bool besov_side = rs.family == SpaceFamily::besov;
  const SeminormEstimate est = besov_side
                                   ? besov_seminorm_estimate(f, sp, hg)
                                   : triebel_seminorm_estimate(f, sp, hg);
  const double lp_part = lp_norm_grid(f, sp.p);

  out["family"] = besov_side ? "besov" : "triebel_lizorkin";
  out["params"] = params_json(sp);
  if (!rs.caveat.empty()) out["caveat"] = rs.caveat;
  out["h_grid"] = ojson{{"h_min", hg.h_min},
                        {"h_max", hg.h_max},
                        {"radii", hg.radii.size()},
                        {"directions", hg.directions.size()}};
  out["estimate"] = ojson{{"value", est.value},
                          {"refined_value", est.refined_value},
                          {"divergence_flag", est.divergence_flag},
                          {"h_min", est.h_min},
                          {"h_max", est.h_max},
                          {"resolution", est.resolution}};
  out["lp_norm"] = lp_part;
  out["total"] = lp_part + est.value;

  std::vector<Box> regions = cfg.seminorm.regions;
  if (cfg.seminorm.regions_from_pieces) {
    const Partition& part = require_system(cfg, "seminorm").partition();
    for (std::size_t i = 0; i < part.size(); ++i)
      regions.push_back(part.image(i));
  }
  if (!regions.empty()) {
    const double interior =
        besov_side ? besov_seminorm_masked(f, sp, hg, regions)
                   : triebel_seminorm_masked(f, sp, hg, regions);
    out["regions"] = ojson{
        {"count", regions.size()},
        {"interior", interior},
        {"boundary_contribution", std::max(0.0, est.value - interior)}};
  }

  if (!a.out_path.empty()) {
    const auto prof = h_profile(f, sp, hg);
    std::string csv = "h,value\n";
    for (const auto& [h, v] : prof) {
      csv += format_double(h);
      csv += ',';
      csv += format_double(v);
      csv += '\n';
    }
    write_file(a.out_path, csv);
    out["artifacts"] = ojson{{"h_profile_csv", a.out_path}};
  }
  emit(out);
  return 0;
}

int cmd_attractor(const CommonArgs& a) {
  const Config cfg = load_config(a.config_path);
  const LocalFractalSystem& sys = require_system(cfg, "attractor");
  if (a.out_path.empty())
    throw std::invalid_argument(
        "attractor needs --out for the point-cloud CSV");
  const AttractorSettings& at = cfg.attractor;
  const int steps = a.steps >= 0 ? a.steps : at.steps;
  if (steps < 0)
    throw std::invalid_argument("steps must be non-negative");

  LocalMapSystem ms;
  std::optional<PointSet> k0;
  std::string mode;
  if (at.mode == AttractorSettings::Mode::base) {
    ms = base_map_system(sys.partition());
    k0 = PointSet::grid_sample(sys.partition().domain(),
                               static_cast<std::size_t>(at.seed_count));
    mode = "base";
  } else {
    const double y = at.y_bound.value_or(fixed_point_sup_bound(sys));
    ms = wloc_system(sys, y);
    // Zero-function graph: the graph maps pull it toward the fixed-point
    // graph at the contraction rate.
    const SampledFunction zero(sys.partition().domain(), at.seed_level);
    k0 = sampled_graph(zero, /*half_open=*/true);
    mode = "graph";
  }
  const IterationResult res = iterate_attractor(ms, *k0, steps, at.snap);

  const int dim = res.final_set.dim();
  std::string cloud = dim == 1 ? "x" : (dim == 2 ? "x,y" : "x,y,z");
  cloud += '\n';
  for (std::size_t i = 0; i < res.final_set.size(); ++i) {
    const APoint p = res.final_set.get(i);
    for (int c = 0; c < dim; ++c) {
      if (c) cloud += ',';
      cloud += format_double(p[c]);
    }
    cloud += '\n';
  }
  write_file(a.out_path, cloud);

  const std::string dist_path = with_suffix(a.out_path, ".distances.csv");
  std::string dist = "step,points,distance\n";
  for (std::size_t l = 0; l < res.distances.size(); ++l) {
    dist += std::to_string(l);
    dist += ',';
    dist += std::to_string(res.sizes[l + 1]);
    dist += ',';
    dist += format_double(res.distances[l]);
    dist += '\n';
  }
  write_file(dist_path, dist);

  if (!res.warning.empty())
    std::cerr << "warning: " << res.warning << "\n";

  ojson rep;
  rep["command"] = "attractor";
  rep["mode"] = mode;
  rep["steps"] = steps;
  rep["seed"] = a.seed;
  rep["threads"] = a.threads;
  rep["seed_points"] = k0->size();
  rep["final_points"] = res.final_set.size();
  rep["collapsed"] = res.collapsed;
  if (!res.warning.empty()) rep["warning"] = res.warning;
  rep["distance_floor"] = res.distance_floor;
  rep["artifacts"] =
      ojson{{"points_csv", a.out_path}, {"distances_csv", dist_path}};
  emit(rep);
  return 0;
}

}  // namespace lfrac::cli
