#include <iostream>

#include <CLI11.hpp>

#include "lfrac/commands.hpp"
#include "lfrac/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "lfrac: local fractal functions driven by JSON configs. Validates "
      "partitions, solves the self-referential fixed-point equation, checks "
      "smoothness-space membership conditions, estimates seminorms and "
      "iterates attractors. Outputs are CSV and JSON only."};
  app.require_subcommand(1);

  lfrac::cli::CommonArgs args;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON config path")
        ->required();
    sub->add_option("--seed", args.seed,
                    "seed for randomized diagnostics (default 0)");
    sub->add_option("--threads", args.threads,
                    "worker cap for the numeric kernels (currently "
                    "single-threaded; validated and echoed)")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* validate = app.add_subcommand(
      "validate", "check the partition property and system invariants");
  add_common(validate);

  CLI::App* solve = app.add_subcommand(
      "solve", "iterate to the fixed point and write it as CSV");
  add_common(solve);
  solve->add_option("--out", args.out_path, "fixed-point CSV path")
      ->required();

  CLI::App* check = app.add_subcommand(
      "check", "report membership conditions per queried space (JSON)");
  add_common(check);
  check->add_option("--space", args.spaces,
                    "space query, e.g. hoelder(0.6) or besov(2,2,0.5,1); "
                    "repeatable, overrides the config list");

  CLI::App* seminorm = app.add_subcommand(
      "seminorm", "estimate a smoothness seminorm of the fixed point or of "
                  "a CSV function (JSON; --out adds an h-profile CSV)");
  add_common(seminorm);
  seminorm->add_option("--space", args.spaces, "space query (exactly one)");
  seminorm->add_option("--out", args.out_path, "h-profile CSV path");

  CLI::App* attractor = app.add_subcommand(
      "attractor", "iterate the set map and write the point cloud plus the "
                   "step-distance sequence");
  add_common(attractor);
  attractor->add_option("--out", args.out_path, "point-cloud CSV path")
      ->required();
  attractor->add_option("--steps", args.steps,
                        "iteration count (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(validate)) return lfrac::cli::cmd_validate(args);
    if (app.got_subcommand(solve)) return lfrac::cli::cmd_solve(args);
    if (app.got_subcommand(check)) return lfrac::cli::cmd_check(args);
    if (app.got_subcommand(seminorm)) return lfrac::cli::cmd_seminorm(args);
    return lfrac::cli::cmd_attractor(args);
  } catch (const lfrac::cli::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
