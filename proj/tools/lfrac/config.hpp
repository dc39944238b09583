#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfrac/rb_operator.hpp"
#include "lfrac/sampled_function.hpp"
#include "lfrac/space_conditions.hpp"

namespace lfrac::cli {

// Malformed document (exit code 2). Everything else the loader throws is
// a semantic error (exit code 1).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A space query as written on the command line or in the config:
//   hoelder(s) sobolev(k,p) slodeckij(s,p) bessel(s,p) hardy(p) lp(p)
//   besov(p,q,s,M) triebel(p,q,s,M)
// with "inf" accepted for p and q.
struct SpaceQuery {
  enum class Kind { preset, besov, triebel, lp };

  std::string text;  // normalized form; used for dedup and in reports
  Kind kind = Kind::preset;
  std::string preset;
  std::vector<double> args;
};

SpaceQuery parse_space_query(const std::string& text);

// Query bound to a system dimension: the checker/estimator parameters.
// lp and hardy queries carry only lp_p.
struct ResolvedSpace {
  SpaceQuery query;
  SpaceFamily family = SpaceFamily::besov;
  SpaceParams params;
  double lp_p = 0.0;
  bool reporting_only = false;
  std::string caveat;
};

ResolvedSpace resolve_space(const SpaceQuery& q, int dim);

struct SolverSettings {
  int level = 10;
  double tol = 1e-12;
  int max_iter = 200;
};

struct SeminormSettings {
  std::optional<std::string> space;
  std::optional<double> h_min;
  std::optional<double> h_max;
  int radius_count = 48;
  int direction_count = 64;
  bool regions_from_pieces = false;
  std::vector<Box> regions;
  std::optional<std::string> fixed_point_csv;
};

struct AttractorSettings {
  enum class Mode { base, graph };

  Mode mode = Mode::base;
  int steps = 12;
  int seed_count = 33;   // base mode: grid sample of the domain
  int seed_level = 5;    // graph mode: zero-function graph at this level
  std::optional<double> y_bound;
  double snap = 1e-12;
};

struct Config {
  // Exactly one of the two is set: a full system, or a sampled function
  // read from CSV (direct-function mode, estimator-only).
  std::optional<LocalFractalSystem> system;
  std::optional<std::string> function_csv;

  SolverSettings solver;
  std::vector<SpaceQuery> spaces;
  SeminormSettings seminorm;
  AttractorSettings attractor;

  // FNV-1a over the canonical system + solver subtree; empty in
  // direct-function mode. Keys the fixed-point cache.
  std::string digest;
};

Config load_config(const std::string& path);

// Fixed-point CSV artifact: header x[,y],value, one row per grid node in
// storage order, 17 significant digits so values survive the round trip.
std::string function_to_csv(const SampledFunction& f);
SampledFunction read_function_csv(const std::string& path);

}  // namespace lfrac::cli
