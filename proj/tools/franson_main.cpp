#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "franson/commands.hpp"
#include "franson/constants.hpp"

namespace {

CLI::Option* opt_double(CLI::App* app, const std::string& name, std::optional<double>& slot,
                        const std::string& desc) {
  return app
      ->add_option(
          name,
          [&slot](const CLI::results_t& v) {
            try {
              slot = std::stod(v.back());
            } catch (...) {
              return false;
            }
            return true;
          },
          desc)
      ->type_name("FLOAT");
}

void add_common(CLI::App* app, franson::CliOptions& opt) {
  app->add_option("--config", opt.config_path, "TOML config file");
  app->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  app->add_option(
         "--seed",
         [&opt](const CLI::results_t& v) {
           try {
             opt.seed = std::stoull(v.back());
           } catch (...) {
             return false;
           }
           return true;
         },
         "RNG seed (overrides config)")
      ->type_name("UINT");
  app->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  app->add_option(
         "--mode",
         [&opt](const CLI::results_t& v) {
           opt.mode = v.back();
           return true;
         },
         "bs|pbs")
      ->type_name("TEXT");
  app->add_option("--phi", opt.phi, "side-A long-arm phase, rad");
  app->add_option("--psi", opt.psi, "side-B long-arm phase, rad");
  opt_double(app, "--window", opt.window, "coincidence window, s");
  opt_double(app, "--tau", opt.tau, "detection delay tau_ab, s");
  opt_double(app, "--duration", opt.duration, "simulated seconds (overrides config)");
  opt_double(app, "--pair-rate", opt.pair_rate, "pair emissions per second (overrides config)");
  opt_double(app, "--singles-rate", opt.singles_rate,
             "uncorrelated singles per second per side (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coherence-model Franson interferometry simulator"};
  app.set_version_flag("--version", std::string(franson::kVersion));
  app.require_subcommand(1);

  franson::CliOptions opt;

  auto* sim = app.add_subcommand("simulate", "generate a time-tag stream");
  add_common(sim, opt);
  sim->add_flag("--events", opt.dump_events, "also dump the emission stream (events.csv)");

  auto* coin = app.add_subcommand("coincide", "count coincidences in tag files");
  add_common(coin, opt);
  std::vector<std::string> tag_files;
  double offset_s = 0.0;
  coin->add_option("files", tag_files, "tag file(s): one merged or side A then side B")
      ->required()
      ->expected(1, 2);
  coin->add_option("--offset", offset_s, "offset added to side-A times, s");

  auto* scan = app.add_subcommand("scan", "phase scan: joint fringe or local counts");
  add_common(scan, opt);
  std::string kind = "fringe", pipeline, grid_spec, pair_spec;
  std::uint64_t n_per_point = 100000;
  scan->add_option("kind", kind, "fringe|local")->check(CLI::IsMember({"fringe", "local"}));
  scan->add_option("--pipeline", pipeline, "analytic|montecarlo|timetag");
  scan->add_option("--grid", grid_spec, "start:stop:n over phi (rad)");
  scan->add_option("--n", n_per_point, "samples / pairs / counts per grid point");
  scan->add_option("--pair", pair_spec, "detector pair, e.g. D1,D3");

  auto* vis = app.add_subcommand("visibility", "visibility sweep");
  add_common(vis, opt);
  std::string variable = "tau_ab", vis_grid, vis_pair;
  std::size_t phase_points = 12;
  vis->add_option("variable", variable, "tau_ab|singles_rate|window");
  vis->add_option("--grid", vis_grid, "start:stop:n over the sweep variable");
  vis->add_option("--phase-points", phase_points, "phase grid size per sweep point");
  vis->add_option("--pair", vis_pair, "detector pair, e.g. D1,D3");

  auto* orc = app.add_subcommand("oracle", "run the quadrature/enumeration reference suite");
  add_common(orc, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return franson::cmd_simulate(opt);
    if (coin->parsed()) return franson::cmd_coincide(opt, tag_files, offset_s);
    if (scan->parsed())
      return franson::cmd_scan(opt, kind, pipeline, grid_spec, n_per_point, pair_spec);
    if (vis->parsed())
      return franson::cmd_visibility(opt, variable, vis_grid, phase_points, vis_pair);
    if (orc->parsed()) return franson::cmd_oracle(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
