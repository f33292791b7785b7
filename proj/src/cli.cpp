#include "wildwarn/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>

#include "wildwarn/analysis.hpp"
#include "wildwarn/csv.hpp"
#include "wildwarn/errors.hpp"
#include "wildwarn/export.hpp"
#include "wildwarn/geometry.hpp"
#include "wildwarn/hexgrid.hpp"
#include "wildwarn/model_io.hpp"

namespace wildwarn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void normalize_thresholds(std::vector<double>& thresholds) {
  if (thresholds.empty()) throw InputError("at least one threshold is required");
  std::sort(thresholds.begin(), thresholds.end());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0) || !std::isfinite(thresholds[i]))
      throw InputError("thresholds must be strictly positive");
    if (i > 0 && thresholds[i] == thresholds[i - 1]) throw InputError("thresholds must be distinct");
  }
}

DayCount parse_day_count(const std::string& text) {
  if (text == "365") return DayCount::fixed_365;
  if (text == "calendar") return DayCount::calendar;
  throw InputError("--days-per-year must be 365 or calendar, got '" + text + "'");
}

namespace {

std::ifstream open_input(const std::string& path, const char* flag) {
  if (path.empty()) throw InputError(std::string(flag) + " is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

/// Re-throws input errors with the file they came from.
template <class F>
auto with_context(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

fs::path output_path(const RunConfig& cfg, const char* name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Dataset load_accidents(const std::string& path, const std::string& period) {
  auto in = open_input(path, "--accidents");
  return with_context(path, [&] { return period.empty() ? parse_accidents(in) : parse_accidents(in, parse_period(period)); });
}

std::map<LineId, LineGeometry> load_geometry(const std::string& path) {
  if (path.empty()) return {};
  auto in = open_input(path, "--geometry");
  return with_context(path, [&] { return parse_line_geometry(in); });
}

TrafficTable load_traffic(const std::string& path, double delta_x) {
  auto in = open_input(path, "--traffic");
  return with_context(path, [&] { return parse_traffic(in, delta_x); });
}

FittedModel load_model_file(const std::string& path) {
  auto in = open_input(path, "--model");
  return with_context(path, [&] { return load_model(in); });
}

SeasonScheme seasons_of(const RunConfig& cfg) {
  return cfg.seasons.empty() ? SeasonScheme() : SeasonScheme::parse(cfg.seasons);
}

/// Returns the parsed document so callers can tell which keys were set.
json apply_config_file(const std::string& path, RunConfig& cfg) {
  auto in = open_input(path, "--config");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": not valid JSON: " + e.what());
  }
  try {
    auto str = [&](const char* key, std::string& dst) {
      if (doc.contains(key)) dst = doc[key].get<std::string>();
    };
    str("accidents", cfg.accidents);
    str("traffic", cfg.traffic);
    str("geometry", cfg.geometry);
    str("speeds", cfg.speeds);
    str("model", cfg.model);
    str("test", cfg.test);
    str("out", cfg.out_dir);
    str("seasons", cfg.seasons);
    str("period", cfg.period);
    if (doc.contains("delta_x")) cfg.bins.delta_x = doc["delta_x"].get<double>();
    if (doc.contains("delta_t")) cfg.bins.delta_t = doc["delta_t"].get<int>();
    if (doc.contains("thresholds")) cfg.thresholds = doc["thresholds"].get<std::vector<double>>();
    if (doc.contains("days_per_year")) {
      const auto& d = doc["days_per_year"];
      cfg.day_count = parse_day_count(d.is_string() ? d.get<std::string>() : d.dump());
    }
    if (doc.contains("smoothing")) cfg.smoothing = doc["smoothing"].get<double>();
    if (doc.contains("spacing")) cfg.hex_spacing = doc["spacing"].get<double>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("relaxed")) cfg.relaxed = doc["relaxed"].get<bool>();
    if (doc.contains("threads")) cfg.threads = doc["threads"].get<unsigned>();
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return doc;
}

// --- subcommands -----------------------------------------------------------

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load_accidents(cfg.accidents, cfg.period);
  FitOptions opts;
  opts.day_count = cfg.day_count;
  opts.smoothing = cfg.smoothing;
  opts.line_ends = line_ends(load_geometry(cfg.geometry));
  const FittedModel model = fit(data, seasons_of(cfg), cfg.bins, opts);

  const auto path = output_path(cfg, "model.json");
  write_file(path, [&](std::ostream& os) { save_model(os, model); });

  const auto& c = model.counts();
  out << "accidents N=" << c.n << "  days T=" << csv::format_double(c.t_days)
      << (cfg.day_count == DayCount::fixed_365 ? " (365-day years)" : " (calendar)") << '\n';
  out << "month  N_tau  mu    mu_exact\n";
  for (int m = 1; m <= kMonths; ++m) {
    char row[96];
    std::snprintf(row, sizeof row, "%5d  %5ld  %s  %s\n", m, c.per_month[static_cast<std::size_t>(m - 1)],
                  fixed(model.mu(m), 2).c_str(), fixed(model.mu(m), 6).c_str());
    out << row;
  }
  out << "model written to " << path.string() << '\n';
  return kExitOk;
}

void check_bins_match(const FittedModel& model, const RunConfig& cfg, bool dx_given, bool dt_given) {
  if (dx_given && cfg.bins.delta_x != model.bins().delta_x)
    throw InputError("--delta-x " + csv::format_double(cfg.bins.delta_x) + " does not match the model's delta_x " +
                     csv::format_double(model.bins().delta_x));
  if (dt_given && cfg.bins.delta_t != model.bins().delta_t)
    throw InputError("--delta-t " + std::to_string(cfg.bins.delta_t) + " does not match the model's delta_t " +
                     std::to_string(model.bins().delta_t));
}

int cmd_warn(const RunConfig& cfg, bool dx_given, bool dt_given, std::ostream& out) {
  const FittedModel model = load_model_file(cfg.model);
  check_bins_match(model, cfg, dx_given, dt_given);
  const TrafficTable traffic = load_traffic(cfg.traffic, model.bins().delta_x);
  const auto geoms = load_geometry(cfg.geometry);
  const WarningGrid grid = sweep_all(model, traffic, TrafficProfile(), cfg.thresholds, cfg.threads);

  write_file(output_path(cfg, "warnings.csv"), [&](std::ostream& os) { write_warnings_csv(os, grid); });
  write_file(output_path(cfg, "warnings.geojson"),
             [&](std::ostream& os) { os << warnings_geojson(grid, geoms).dump(1) << '\n'; });
  if (cfg.all_year)
    write_file(output_path(cfg, "warnings_all_year.csv"), [&](std::ostream& os) { write_all_year_csv(os, grid); });

  out << "warned cells per line and month\nline\tmonth";
  for (double t : grid.thresholds()) out << "\t@" << csv::format_double(t);
  out << '\n';
  std::vector<std::size_t> totals(grid.thresholds().size(), 0);
  for (const auto& [key, counts] : warned_summary(grid)) {
    if (std::all_of(counts.begin(), counts.end(), [](std::size_t n) { return n == 0; })) continue;
    out << key.first << '\t' << key.second;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out << '\t' << counts[i];
      totals[i] += counts[i];
    }
    out << '\n';
  }
  out << "total\t";
  for (auto n : totals) out << '\t' << n;
  out << "\ncells: " << grid.cells().size() << '\n';
  return kExitOk;
}

int cmd_map(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load_accidents(cfg.accidents, cfg.period);
  const auto geoms = load_geometry(cfg.geometry);
  if (geoms.empty()) throw InputError("--geometry is required for map");
  std::vector<GeoPoint> points;
  for (const auto& r : data.records()) {
    const auto g = geoms.find(r.line);
    if (g == geoms.end() || !g->second.covers(r.km)) continue;
    points.push_back(km_to_geo(g->second, r.km));
  }
  const HexGrid grid = hex_bin(points, cfg.hex_spacing);
  write_file(output_path(cfg, "hexgrid.geojson"), [&](std::ostream& os) { os << hexgrid_geojson(grid).dump(1) << '\n'; });
  out << "geocoded " << points.size() << " of " << data.size() << " accidents into " << grid.cells.size()
      << " hexagons (spacing " << csv::format_double(cfg.hex_spacing) << " km)\n";
  return kExitOk;
}

int cmd_profile(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load_accidents(cfg.accidents, cfg.period);
  const auto seasons = seasons_of(cfg);
  const auto species = species_profile(data);
  const auto hourly = hourly_profile(data, seasons);
  write_file(output_path(cfg, "species.csv"), [&](std::ostream& os) { write_species_csv(os, species); });
  write_file(output_path(cfg, "hourly.csv"), [&](std::ostream& os) { write_hourly_csv(os, hourly, seasons); });
  out << "species\tcount\n";
  for (const auto& [name, n] : species) out << name << '\t' << n << '\n';
  return kExitOk;
}

int cmd_corr(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load_accidents(cfg.accidents, cfg.period);
  const TrafficTable traffic = load_traffic(cfg.traffic, cfg.bins.delta_x);
  auto in = open_input(cfg.speeds, "--speeds");
  const auto speeds = with_context(cfg.speeds, [&] { return parse_speeds(in); });
  const auto report = speed_correlation(data, traffic, speeds, cfg.bins.delta_x);
  write_file(output_path(cfg, "correlation.json"),
             [&](std::ostream& os) { os << correlation_json(report).dump(2) << '\n'; });
  out << "bins n=" << report.n << "  pearson=" << fixed(report.pearson, 4) << "  spearman=" << fixed(report.spearman, 4)
      << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, bool dx_given, bool dt_given, std::ostream& out) {
  const FittedModel model = load_model_file(cfg.model);
  check_bins_match(model, cfg, dx_given, dt_given);
  const TrafficTable traffic = load_traffic(cfg.traffic, model.bins().delta_x);

  Dataset test;
  if (cfg.synthetic_test > 0) {
    test = sample_from_model(model, cfg.synthetic_test, cfg.seed, model.period().end.year + 1);
  } else {
    auto in = open_input(cfg.test, "--test");
    test = with_context(cfg.test, [&] { return parse_accidents(in); });
  }
  if (test.empty()) throw InputError("test set is empty");

  const WarningGrid grid = sweep_all(model, traffic, TrafficProfile(), cfg.thresholds, cfg.threads);
  const EvalReport report = evaluate_curve(grid, test, cfg.thresholds, {cfg.relaxed});
  write_file(output_path(cfg, "eval.json"), [&](std::ostream& os) { os << eval_json(report).dump(2) << '\n'; });

  out << "test accidents " << report.n_test << ", unmapped " << report.unmapped
      << (report.relaxed ? ", relaxed matching" : "") << '\n';
  out << "theta\thit_rate\twarned_fraction\thits/mappable\n";
  for (const auto& p : report.curve)
    out << csv::format_double(p.theta) << '\t' << fixed(p.hit_rate, 4) << '\t' << fixed(p.warned_fraction, 4) << '\t'
        << p.hits << '/' << p.mappable << '\n';
  return kExitOk;
}

/// Flag values parsed by CLI11, layered over defaults and the config file.
class Cli {
 public:
  Cli() : app_("Wildlife-train collision risk model and warnings") {
    app_.require_subcommand(1);
    app_.set_help_all_flag("--help-all", "Help for every subcommand");

    auto* fit_cmd = sub("fit", "Fit the model tables from an accidents CSV");
    inputs(fit_cmd, {"accidents", "geometry"});
    model_options(fit_cmd);

    auto* warn_cmd = sub("warn", "Compute per-train probabilities and threshold warnings");
    inputs(warn_cmd, {"model", "traffic", "geometry"});
    bins_options(warn_cmd);
    thresholds_option(warn_cmd);
    flag(warn_cmd, "--all-year", &RunConfig::all_year, "Also write month-aggregated warnings");

    auto* map_cmd = sub("map", "Hexagonal hotspot grid of geocoded accidents");
    inputs(map_cmd, {"accidents", "geometry"});
    option(map_cmd, "--spacing", &RunConfig::hex_spacing, "Hexagon centre spacing in km");

    auto* profile_cmd = sub("profile", "Species and hour-of-day profiles");
    inputs(profile_cmd, {"accidents"});
    option(profile_cmd, "--seasons", &RunConfig::seasons, "Season scheme, e.g. 'w=11,12,1,2;s=5,6,7,8;i=3,4,9,10'");

    auto* corr_cmd = sub("corr", "Correlation of accidents per train with maximal speed");
    inputs(corr_cmd, {"accidents", "traffic", "speeds"});
    bins_options(corr_cmd);

    auto* eval_cmd = sub("eval", "Hold-out evaluation of warnings against later accidents");
    inputs(eval_cmd, {"model", "traffic", "test"});
    bins_options(eval_cmd);
    thresholds_option(eval_cmd);
    flag(eval_cmd, "--relaxed", &RunConfig::relaxed, "Count hits in neighbouring x bins too");
    option(eval_cmd, "--synthetic-test", &RunConfig::synthetic_test,
           "Sample this many test accidents from the model instead of reading --test");
  }

  int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app_.exit(e, out, err);
      return code == 0 ? kExitOk : kExitInput;
    }

    try {
      RunConfig cfg;
      json file_doc = json::object();
      for (auto* s : app_.get_subcommands())
        if (auto* c = s->get_option_no_throw("--config"); c && c->count()) file_doc = apply_config_file(config_path_, cfg);
      for (const auto& b : bindings_)
        if (b.opt->count()) b.apply(cfg);
      if (!days_per_year_.empty() && days_opt_given()) cfg.day_count = parse_day_count(days_per_year_);
      cfg.bins.validate();
      normalize_thresholds(cfg.thresholds);

      const std::string name = app_.get_subcommands().front()->get_name();
      const bool dx = given("--delta-x") || file_doc.contains("delta_x");
      const bool dt = given("--delta-t") || file_doc.contains("delta_t");
      if (name == "fit") return cmd_fit(cfg, out);
      if (name == "warn") return cmd_warn(cfg, dx, dt, out);
      if (name == "map") return cmd_map(cfg, out);
      if (name == "profile") return cmd_profile(cfg, out);
      if (name == "corr") return cmd_corr(cfg, out);
      if (name == "eval") return cmd_eval(cfg, dx, dt, out);
      return kExitInput;
    } catch (const InputError& e) {
      err << "error: " << e.what() << '\n';
      return kExitInput;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitComputation;
    }
  }

 private:
  struct Binding {
    CLI::Option* opt;
    std::function<void(RunConfig&)> apply;
  };

  CLI::App* sub(const char* name, const char* desc) {
    auto* s = app_.add_subcommand(name, desc);
    s->add_option("--config", config_path_, "JSON config file; explicit flags take precedence");
    option(s, "--out", &RunConfig::out_dir, "Output directory");
    option(s, "--period", &RunConfig::period, "Observation period YYYY-MM-DD:YYYY-MM-DD");
    option(s, "--threads", &RunConfig::threads, "Worker threads for grid sweeps (0 = auto)");
    option(s, "--seed", &RunConfig::seed, "Random seed for sampling");
    return s;
  }

  template <class T>
  void option(CLI::App* s, const char* name, T RunConfig::*field, const char* desc) {
    auto* opt = s->add_option(name, flags_.*field, desc);
    bindings_.push_back({opt, [this, field](RunConfig& c) { c.*field = flags_.*field; }});
  }

  void flag(CLI::App* s, const char* name, bool RunConfig::*field, const char* desc) {
    auto* opt = s->add_flag(name, flags_.*field, desc);
    bindings_.push_back({opt, [this, field](RunConfig& c) { c.*field = flags_.*field; }});
  }

  void inputs(CLI::App* s, std::initializer_list<std::string> names) {
    for (const auto& n : names) {
      if (n == "accidents") option(s, "--accidents", &RunConfig::accidents, "Accidents CSV (date,time,line,km,species)");
      if (n == "traffic") option(s, "--traffic", &RunConfig::traffic, "Traffic CSV (line,km_from,count)");
      if (n == "geometry") option(s, "--geometry", &RunConfig::geometry, "Line geometry GeoJSON");
      if (n == "speeds") option(s, "--speeds", &RunConfig::speeds, "Speed profile CSV (line,km_from,km_to,vmax)");
      if (n == "model") option(s, "--model", &RunConfig::model, "Model JSON written by fit");
      if (n == "test") option(s, "--test", &RunConfig::test, "Test accidents CSV");
    }
  }

  void bins_options(CLI::App* s) {
    auto* dx = s->add_option("--delta-x", delta_x_, "Spatial bin width in km");
    bindings_.push_back({dx, [this](RunConfig& c) { c.bins.delta_x = delta_x_; }});
    auto* dt = s->add_option("--delta-t", delta_t_, "Temporal bin width in hours (divides 24)");
    bindings_.push_back({dt, [this](RunConfig& c) { c.bins.delta_t = delta_t_; }});
  }

  void model_options(CLI::App* s) {
    bins_options(s);
    option(s, "--seasons", &RunConfig::seasons, "Season scheme, e.g. 'w=11,12,1,2;s=5,6,7,8;i=3,4,9,10'");
    option(s, "--smoothing", &RunConfig::smoothing, "Additive pseudo-count for the probability tables");
    days_opts_.push_back(s->add_option("--days-per-year", days_per_year_, "365 or calendar"));
  }

  void thresholds_option(CLI::App* s) {
    auto* opt = s->add_option("--thresholds", thresholds_, "Comma-separated warning thresholds")->delimiter(',');
    bindings_.push_back({opt, [this](RunConfig& c) { c.thresholds = thresholds_; }});
  }

  bool days_opt_given() const {
    return std::any_of(days_opts_.begin(), days_opts_.end(), [](CLI::Option* o) { return o->count() > 0; });
  }

  bool given(const char* name) {
    for (auto* s : app_.get_subcommands())
      if (auto* o = s->get_option_no_throw(name); o && o->count()) return true;
    return false;
  }

  CLI::App app_;
  RunConfig flags_;
  std::vector<Binding> bindings_;
  std::string config_path_;
  double delta_x_ = 5.0;
  int delta_t_ = 1;
  std::vector<double> thresholds_;
  std::string days_per_year_;
  std::vector<CLI::Option*> days_opts_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Cli cli;
  return cli.run(argc, argv, out, err);
}

}  // namespace wildwarn::cli
