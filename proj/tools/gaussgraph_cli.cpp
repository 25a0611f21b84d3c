// Command line front end: gaussgraph <curvature|solve|validate|sweep> --config FILE

#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "gaussgraph/commands.hpp"

using namespace gaussgraph;

int main(int argc, char** argv) {
  CLI::App app{"Prescribed Gauss curvature graphs over hypersurfaces"};
  app.require_subcommand(1);
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  app.add_option("--config", config, "run configuration (JSON)")->required();
  app.add_option("--seed", seed, "override solver.seed");
  app.add_option("--out", out, "override output.dir");
  app.add_option("--jobs", jobs, "parallel sweep entries")->check(CLI::PositiveNumber);
  app.fallthrough();
  auto* curvature = app.add_subcommand("curvature", "curvature field and oracle comparison of a grid file");
  auto* solve = app.add_subcommand("solve", "solve the configured curvature problem");
  auto* validate = app.add_subcommand("validate", "run the diagnostics battery on a solution");
  auto* sweep = app.add_subcommand("sweep", "grid refinement study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code_for(ErrorCode::ConfigError);
  }

  try {
    RunConfig c = load_config(config);
    if (seed) c.solver.seed = *seed;
    if (!out.empty()) c.output.dir = out;
    if (*curvature) return cmd_curvature(c);
    if (*solve) return cmd_solve(c);
    if (*validate) return cmd_validate(c);
    if (*sweep) return cmd_sweep(c, jobs);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 15;
  }
  return 0;
}
