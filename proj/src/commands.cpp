#include "franson/commands.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "franson/analysis.hpp"
#include "franson/correlator.hpp"
#include "franson/oracle.hpp"
#include "franson/source.hpp"
#include "franson/svg.hpp"
#include "franson/timetag.hpp"
#include "json.hpp"

namespace franson {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json config_json(const ExperimentConfig& cfg) {
  return json{{"f0", cfg.f0},
              {"sigma_f", cfg.sigma_f},
              {"f_center", cfg.f_center},
              {"delta_l", cfg.delta_l},
              {"laser_linewidth", cfg.laser_linewidth},
              {"pair_rate", cfg.pair_rate},
              {"singles_rate", cfg.singles_rate},
              {"t_res", cfg.t_res},
              {"dead_time", cfg.dead_time},
              {"window", cfg.window},
              {"theta0", cfg.theta0},
              {"mode", to_string(cfg.mode)},
              {"seed", cfg.seed},
              {"duration", cfg.duration}};
}

// Collects output names and warnings; writes manifest.json last so the
// output list (which includes the manifest itself) is complete.
struct Run {
  const CliOptions& opt;
  std::string subcommand;
  ExperimentConfig cfg;
  PhaseSettings settings;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  Run(const CliOptions& o, std::string name) : opt(o), subcommand(std::move(name)) {
    cfg = resolve_config(o, warnings);
    settings.phi = o.phi;
    settings.psi = o.psi;
    settings.theta0 = cfg.theta0;
    fs::create_directories(opt.out_dir);
  }

  std::string path(const std::string& name) const { return (fs::path(opt.out_dir) / name).string(); }

  void emit(const std::string& name, const std::string& content) {
    std::ofstream os(path(name), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path(name));
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("short write on " + path(name));
    outputs.push_back(name);
  }

  void note_output(const std::string& name) { outputs.push_back(name); }

  void warn(const std::string& w) {
    if (!w.empty()) warnings.push_back(w);
  }

  void finish() {
    outputs.push_back("manifest.json");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json j{{"subcommand", subcommand},
           {"version", kVersion},
           {"seed", cfg.seed},
           {"config", config_json(cfg)},
           {"settings",
            {{"phi", settings.phi}, {"psi", settings.psi}, {"theta0", settings.theta0}}},
           {"outputs", outputs},
           {"warnings", warnings},
           {"wall_seconds", wall}};
    std::ofstream os(path("manifest.json"), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path("manifest.json"));
    os << j.dump(2) << "\n";
  }
};

std::string curve_csv(const std::vector<ScanPoint>& pts) {
  std::ostringstream os;
  os.precision(17);
  os << "x,value,error\n";
  for (const auto& p : pts) os << p.x << "," << p.value << "," << p.error << "\n";
  return os.str();
}

json fit_json(const FringeFit& fit, const std::vector<ScanPoint>& pts) {
  double lo = pts.empty() ? 0.0 : pts[0].value;
  double hi = lo;
  for (const auto& p : pts) {
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
  }
  const double maxmin = (hi + lo) > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
  json j{{"amplitude", fit.amplitude},
         {"amplitude_err", fit.amplitude_err},
         {"visibility_fit", fit.visibility},
         {"visibility_err", fit.visibility_err},
         {"visibility_maxmin_raw", maxmin},
         {"cosine_amplitude", fit.cosine_amplitude()},
         {"phase", fit.phase},
         {"phase_err", fit.phase_err},
         {"chi2_dof", fit.chi2_dof}};
  // visibility_fit: V in the A(1+V cos) parameterization (equals the
  // Michelson contrast of the fitted curve). visibility_maxmin_raw: contrast
  // of the raw data points.
  if (!fit.warning.empty()) j["warning"] = fit.warning;
  return j;
}

std::vector<TimeTag> read_tags_any(const std::string& file) {
  if (file.size() >= 4 && file.substr(file.size() - 4) == ".csv") return read_tags_csv(file);
  return read_tags_binary(file);
}

std::string histogram_csv(const DelayHistogram& h) {
  std::ostringstream os;
  os << "delay_ps,count\n";
  for (const auto& [center, count] : h.bins) os << center << "," << count << "\n";
  return os.str();
}

json counts_json(const PairCounts& c) {
  return json{{"d1_d3", c.at(1, 3)}, {"d1_d4", c.at(1, 4)},
              {"d2_d3", c.at(2, 3)}, {"d2_d4", c.at(2, 4)},
              {"total", c.total()}};
}

}  // namespace

ExperimentConfig resolve_config(const CliOptions& opt, std::vector<std::string>& warnings) {
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) cfg = load_config_toml(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.mode) cfg.mode = mode_from_string(*opt.mode);
  if (opt.window) cfg.window = *opt.window;
  if (opt.duration) cfg.duration = *opt.duration;
  if (opt.pair_rate) cfg.pair_rate = *opt.pair_rate;
  if (opt.singles_rate) cfg.singles_rate = *opt.singles_rate;
  for (auto& w : validate(cfg)) warnings.push_back(w);
  return cfg;
}

int effective_threads(const CliOptions& opt) {
  if (opt.threads > 0) return opt.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<double> parse_grid_spec(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("invalid grid spec '" + spec + "' (want start:stop:n)");
  try {
    std::size_t used = 0;
    const double start = std::stod(spec.substr(0, c1));
    const double stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const std::string tail = spec.substr(c2 + 1);
    const long n = std::stol(tail, &used);
    if (used != tail.size() || n < 2)
      throw std::invalid_argument("invalid grid spec '" + spec + "' (n must be an integer >= 2)");
    return make_grid(start, stop, static_cast<std::size_t>(n));
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid grid spec '" + spec + "'");
  }
}

std::pair<Detector, Detector> parse_pair_spec(const std::string& spec) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("invalid pair spec '" + spec + "' (want D1,D3)");
  auto parse_one = [](std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (s == "D1") return Detector::D1;
    if (s == "D2") return Detector::D2;
    if (s == "D3") return Detector::D3;
    if (s == "D4") return Detector::D4;
    throw std::invalid_argument("unknown detector '" + s + "'");
  };
  const Detector a = parse_one(spec.substr(0, comma));
  const Detector b = parse_one(spec.substr(comma + 1));
  if (side_of(a) != Side::A || side_of(b) != Side::B)
    throw std::invalid_argument("pair spec must name one side-A detector (D1/D2) then one side-B detector (D3/D4)");
  return {a, b};
}

int cmd_simulate(const CliOptions& opt) {
  Run run(opt, "simulate");
  const int threads = effective_threads(opt);
  const auto stream = generate_stream(run.cfg, threads);
  const auto tags = simulate_tags(run.cfg, run.settings, stream, threads);
  const auto merged = merge_streams(tags);
  write_tags_binary(run.path("tags.ftt1"), merged);
  run.note_output("tags.ftt1");
  write_tags_csv(run.path("tags.csv"), merged);
  run.note_output("tags.csv");
  if (opt.dump_events) {
    write_events_csv(run.path("events.csv"), stream);
    run.note_output("events.csv");
  }
  run.finish();
  std::cout << "simulate: " << merged.size() << " tags -> " << run.path("tags.ftt1") << "\n";
  return 0;
}

int cmd_coincide(const CliOptions& opt, const std::vector<std::string>& tag_files,
                 double offset_s) {
  Run run(opt, "coincide");
  if (tag_files.empty() || tag_files.size() > 2)
    throw std::invalid_argument("coincide wants one merged tag file or two per-side files");
  std::vector<TimeTag> all;
  for (const auto& f : tag_files) {
    auto t = read_tags_any(f);
    all.insert(all.end(), t.begin(), t.end());
  }
  TagStreams sides = split_sides(all);
  auto by_time = [](const TimeTag& x, const TimeTag& y) {
    return x.t_ps != y.t_ps ? x.t_ps < y.t_ps : x.channel < y.channel;
  };
  std::stable_sort(sides.side_a.begin(), sides.side_a.end(), by_time);
  std::stable_sort(sides.side_b.begin(), sides.side_b.end(), by_time);

  CoincidenceOptions copts;
  copts.window = opt.window ? *opt.window : run.cfg.window;
  copts.offset = offset_s;
  copts.hist_half_range = 2.0 * delay_dT(run.cfg);
  const auto res = count_coincidences(sides.side_a, sides.side_b, copts);
  const auto central = select_central_peak(res.records, copts.window, delay_dT(run.cfg));
  run.warn(central.warning);

  json j{{"window", copts.window},
         {"offset", copts.offset},
         {"delta_t", delay_dT(run.cfg)},
         {"tags_a", sides.side_a.size()},
         {"tags_b", sides.side_b.size()},
         {"matched_records", res.records.size()},
         {"windowed", counts_json(res.counts)},
         {"central_peak", counts_json(central.counts)}};
  if (!central.warning.empty()) j["central_peak_warning"] = central.warning;
  run.emit("counts.json", j.dump(2) + "\n");
  run.emit("histogram.csv", histogram_csv(res.histogram));
  run.finish();
  std::cout << "coincide: " << res.counts.total() << " windowed, " << central.counts.total()
            << " central-peak coincidences\n";
  return 0;
}

int cmd_scan(const CliOptions& opt, const std::string& kind, const std::string& pipeline,
             const std::string& grid_spec, std::uint64_t n_per_point,
             const std::string& pair_spec) {
  Run run(opt, "scan");
  const auto grid = parse_grid_spec(grid_spec.empty() ? "0:6.283185307179586:24" : grid_spec);
  const int threads = effective_threads(opt);

  if (kind == "local") {
    const LocalScan a = local_scan(run.cfg, Side::A, grid, static_cast<double>(n_per_point), 0);
    const LocalScan b = local_scan(run.cfg, Side::B, grid, static_cast<double>(n_per_point), 1);
    const FlatnessReport rep =
        flatness_report({a.counts[0], a.counts[1], b.counts[0], b.counts[1]});

    std::ostringstream csv;
    csv.precision(17);
    csv << "x,d1,d2,d3,d4\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      csv << grid[i] << "," << a.counts[0][i] << "," << a.counts[1][i] << "," << b.counts[0][i]
          << "," << b.counts[1][i] << "\n";
    run.emit("local_counts.csv", csv.str());

    json j{{"max_abs_z", rep.max_abs_z},
           {"pass", rep.pass},
           {"counts_per_detector", n_per_point},
           {"points", grid.size()}};
    run.emit("flatness.json", j.dump(2) + "\n");

    Plot plot;
    plot.title = "local detection counts vs phase";
    plot.x_label = "phase (rad)";
    plot.y_label = "counts";
    const char* names[4] = {"D1", "D2", "D3", "D4"};
    const char* colors[4] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};
    const std::vector<std::uint64_t>* series[4] = {&a.counts[0], &a.counts[1], &b.counts[0],
                                                   &b.counts[1]};
    for (int s = 0; s < 4; ++s) {
      PlotSeries ps;
      ps.label = names[s];
      ps.color = colors[s];
      ps.line = true;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        ps.x.push_back(grid[i]);
        ps.y.push_back(static_cast<double>((*series[s])[i]));
        ps.err.push_back(std::sqrt(static_cast<double>((*series[s])[i])));
      }
      plot.add(std::move(ps));
    }
    run.emit("plot.svg", plot.render());
    run.finish();
    std::cout << "scan local: max |z| = " << rep.max_abs_z << (rep.pass ? " PASS" : " FAIL")
              << "\n";
    return 0;
  }

  if (kind != "fringe") throw std::invalid_argument("scan kind must be fringe or local");

  const Pipeline p = pipeline_from_string(pipeline.empty() ? "analytic" : pipeline);
  const auto [da, db] = parse_pair_spec(pair_spec.empty() ? "D1,D3" : pair_spec);
  JointSetting base;
  base.det_a = da;
  base.det_b = db;
  base.settings = run.settings;
  base.tau_ab = opt.tau ? *opt.tau : 0.0;

  const auto pts = scan_fringe(p, run.cfg, base, grid, n_per_point, threads);
  const FringeFit fit = fit_fringe(pts);
  run.warn(fit.warning);

  run.emit("curve.csv", curve_csv(pts));
  json j = fit_json(fit, pts);
  j["pipeline"] = to_string(p);
  j["pair"] = to_string(da) + "," + to_string(db);
  j["n_per_point"] = n_per_point;
  run.emit("fit.json", j.dump(2) + "\n");

  Plot plot;
  plot.title = "coincidence fringe (" + to_string(p) + ")";
  plot.x_label = "phi (rad), psi fixed";
  plot.y_label = "correlation";
  PlotSeries data;
  data.label = to_string(da) + "x" + to_string(db);
  for (const auto& pt : pts) {
    data.x.push_back(pt.x);
    data.y.push_back(pt.value);
    data.err.push_back(pt.error);
  }
  plot.add(std::move(data));
  PlotSeries model;
  model.label = "fit";
  model.color = "#d62728";
  model.line = true;
  model.marker = false;
  const double x0 = grid.front(), x1 = grid.back();
  for (int i = 0; i <= 200; ++i) {
    const double x = x0 + (x1 - x0) * i / 200.0;
    model.x.push_back(x);
    model.y.push_back(fit.amplitude * (1.0 + fit.visibility * std::cos(x + fit.phase)));
  }
  plot.add(std::move(model));
  run.emit("plot.svg", plot.render());
  run.finish();
  std::cout << "scan fringe: V = " << fit.visibility << " +/- " << fit.visibility_err
            << ", theta = " << fit.phase << "\n";
  return 0;
}

int cmd_visibility(const CliOptions& opt, const std::string& variable,
                   const std::string& grid_spec, std::size_t phase_points,
                   const std::string& pair_spec) {
  Run run(opt, "visibility");
  const SweepVariable var = sweep_variable_from_string(variable);
  std::vector<double> grid;
  if (!grid_spec.empty()) {
    grid = parse_grid_spec(grid_spec);
  } else {
    switch (var) {
      case SweepVariable::TauAb:
        grid = make_grid(0.0, 2.0 / run.cfg.sigma_f, 9);
        break;
      case SweepVariable::SinglesRate:
        grid = make_grid(0.0, 100.0 * run.cfg.pair_rate, 5);
        break;
      case SweepVariable::Window:
        grid = make_grid(0.2 * delay_dT(run.cfg), 3.0 * delay_dT(run.cfg), 5);
        break;
    }
  }
  const auto [da, db] = parse_pair_spec(pair_spec.empty() ? "D1,D3" : pair_spec);
  JointSetting base;
  base.det_a = da;
  base.det_b = db;
  base.settings = run.settings;
  base.tau_ab = opt.tau ? *opt.tau : 0.0;

  const VisibilityCurve curve =
      visibility_vs(run.cfg, base, var, grid, phase_points, effective_threads(opt));

  std::ostringstream csv;
  csv.precision(17);
  csv << "x,value,error\n";
  for (const auto& p : curve.points) csv << p.x << "," << p.visibility << "," << p.error << "\n";
  run.emit("visibility.csv", csv.str());

  json j{{"variable", to_string(var)},
         {"monotone_nonincreasing", curve.monotone_nonincreasing},
         {"points", json::array()}};
  for (const auto& p : curve.points)
    j["points"].push_back({{"x", p.x}, {"visibility", p.visibility}, {"error", p.error}});
  run.emit("visibility.json", j.dump(2) + "\n");

  Plot plot;
  plot.title = "visibility vs " + to_string(var);
  plot.x_label = to_string(var);
  plot.y_label = "visibility";
  PlotSeries s;
  s.line = true;
  for (const auto& p : curve.points) {
    s.x.push_back(p.x);
    s.y.push_back(p.visibility);
    s.err.push_back(p.error);
  }
  plot.add(std::move(s));
  run.emit("plot.svg", plot.render());
  run.finish();
  std::cout << "visibility vs " << to_string(var) << ": "
            << (curve.monotone_nonincreasing ? "monotone nonincreasing" : "non-monotone") << "\n";
  return 0;
}

int cmd_oracle(const CliOptions& opt) {
  Run run(opt, "oracle");
  const oracle::Report rep =
      oracle::run_reference_suite(run.cfg.f_center, run.cfg.sigma_f, run.cfg.delta_l);
  run.emit("oracle.json", oracle::report_to_json(rep));
  run.emit("oracle.txt", oracle::report_to_text(rep));
  if (!rep.all_pass) run.warn("reference suite reported failures");
  run.finish();
  std::cout << oracle::report_to_text(rep);
  return rep.all_pass ? 0 : 1;
}

}  // namespace franson
