// Command-line front end.  Exit codes: 0 success, 1 declared-tolerance
// breach, 2 invalid input, 3 numeric failure.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "limabean/errors.hpp"
#include "spec.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "limabean: rescaled matrix random walks and the geometry of their "
      "limiting spectra"};
  std::string command, spec_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("command", command,
                 "one of: sample-esd, density-grid, domain, compare, "
                 "wz-convergence, sigma-min, k2-oracle, limabean")
      ->required();
  app.add_option("--spec", spec_path, "experiment spec file (JSON)");
  app.add_option("--out", out_dir, "output directory (overrides spec.output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "override the spec's seed");
  app.add_option("--threads", threads,
                 "worker threads (0 = LIMABEAN_THREADS, then hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help/--version exit 0; bad usage exits 2
  }

  using namespace limabean;
  using namespace limabean::cli;
  try {
    if (!is_known_command(command)) throw SpecError("unknown command '" + command + "'");
    ExperimentSpec spec;
    if (!spec_path.empty()) {
      spec = parse_spec_file(spec_path);
      if (spec.command != command)
        throw SpecError("spec file declares command '" + spec.command +
                        "' but '" + command + "' was requested");
    } else if (command == "k2-oracle") {
      // The oracle run is fully pinned; no spec file is needed.
      spec = parse_spec_json(R"({"format_version":1,"command":"k2-oracle"})");
    } else {
      throw SpecError("--spec is required for '" + command + "'");
    }
    CliOptions opt;
    opt.out_dir = out_dir;
    if (seed_opt->count() > 0) opt.seed = seed;
    opt.threads = threads;
    return run_command(spec, opt);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
