#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fblab/cli.hpp"
#include "fblab/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fblab: a laboratory for nonlinear-superposition free-boundary energies"};
  app.require_subcommand(1);

  std::string config_path, out_dir, field_path;
  int seed = -1;
  int threads = 1;
  int resolution = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario config file");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--threads", threads, "worker threads (default 1, reproducible)");
    sub->add_option("--resolution", resolution, "nodes-per-axis override");
  };

  CLI::App* solve = app.add_subcommand("solve", "minimize and write the report bundle");
  add_common(solve);
  CLI::App* analyze =
      app.add_subcommand("analyze", "run the property matrix on a field dump");
  add_common(analyze);
  analyze->add_option("--field", field_path, "field dump to analyze (default <out>/u.dump)");
  CLI::App* blowup =
      app.add_subcommand("blowup", "blow-up sequence, limit compare, Weiss/ACF traces");
  add_common(blowup);
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep over a phi family");
  add_common(sweep);
  CLI::App* repro = app.add_subcommand("repro", "reproduction runs");
  repro->require_subcommand(1);
  CLI::App* ne = repro->add_subcommand(
      "nonexistence1d", "degenerating 1D family: J_h against the analytic curve");
  std::vector<int> resolutions{8, 16, 32, 64};
  ne->add_option("--resolutions", resolutions, "list of 1/h values");
  ne->add_option("--out", out_dir, "output directory");
  CLI::App* sd = repro->add_subcommand(
      "saddle2d", "saddle datum on the disk: energy, minimality, flatness");
  int sd_resolution = 128;
  int sd_perturbations = 200;
  sd->add_option("--resolution", sd_resolution, "nodes per axis");
  sd->add_option("--perturbations", sd_perturbations, "random perturbation count");
  sd->add_option("--out", out_dir, "output directory");
  CLI::App* oc = app.add_subcommand("oracle-check",
                                    "tiny built-in problems, oracle vs direct solver");
  oc->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    fblab::set_threads(threads);
    fblab::Overrides ov;
    if (!out_dir.empty()) ov.out = out_dir;
    if (seed >= 0) ov.seed = (unsigned)seed;
    if (resolution > 0) ov.resolution = resolution;
    auto scenario = [&]() {
      if (config_path.empty())
        throw std::runtime_error("this command needs --config");
      return fblab::build_scenario(fblab::parse_config_file(config_path), ov);
    };

    if (solve->parsed()) return fblab::run_scenario(scenario(), "solve").exit_code;
    if (analyze->parsed()) {
      const fblab::ScenarioConfig sc = scenario();
      const std::string fp = field_path.empty() ? sc.out_dir + "/u.dump" : field_path;
      return fblab::run_analyze(sc, fp);
    }
    if (blowup->parsed()) return fblab::run_blowup(scenario());
    if (sweep->parsed()) return fblab::run_sweep(scenario());
    if (ne->parsed()) {
      fblab::repro_nonexistence(resolutions, out_dir.empty() ? "out" : out_dir);
      return 0;
    }
    if (sd->parsed())
      return fblab::repro_saddle(sd_resolution, sd_perturbations,
                                 out_dir.empty() ? "out" : out_dir)
                 .pass
                 ? 0
                 : 1;
    if (oc->parsed()) return fblab::run_oracle_check(out_dir.empty() ? "out" : out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
