// hpflex: command-line front end for the heat-pump MPC experiments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hpflex/experiment.hpp"
#include "hpflex/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hpflex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::config:
    case Errc::invalid_material:
    case Errc::invalid_geometry:
    case Errc::stack:
    case Errc::infeasible_target:
      return kExitConfig;
    case Errc::parse:
    case Errc::gap:
    case Errc::coverage:
      return kExitData;
    default:
      return kExitFailure;
  }
}

struct Options {
  std::string scenario;
  fs::path out_dir = ".";
  int workers = 1;
  std::uint64_t seed = 20210101;
  std::vector<int> horizons;
  std::vector<double> p_max_list;
  std::vector<std::string> code_years;
  std::vector<double> concrete_list;
  // smooth-forecast
  std::string forecast_csv;
  SmoothingConfig smoothing;
};

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw Error(Errc::config, "cli-io", "cannot write " + (dir / name).string());
  return out;
}

void write_json(const fs::path& dir, const std::string& name, const nlohmann::json& j) {
  open_out(dir, name) << j.dump(2) << '\n';
}

void print_rows(const std::vector<SweepRow>& rows) {
  for (const auto& r : rows) {
    std::cout << r.sweep_param << "  " << r.building << '/' << r.system << '/' << r.forecast_case;
    if (r.error.empty())
      std::cout << "  savings=" << r.savings << " emissions_kg=" << r.emissions_kg << " energy_kwh=" << r.energy_kwh
                << " slack_hours=" << r.slack_hours << '\n';
    else
      std::cout << "  error: " << r.error << '\n';
  }
}

void emit_sweep(const Options& o, const std::string& kind, const std::vector<SweepRow>& rows) {
  auto out = open_out(o.out_dir, kind + ".csv");
  write_sweep_csv(out, rows);
  write_json(o.out_dir, kind + ".json", sweep_json(kind, rows));
  print_rows(rows);
}

int cmd_derive_params(const Options& o) {
  auto sc = load_scenario(o.scenario);
  auto stacks = load_materials(csv::read_file(sc.path(sc.materials_csv)), sc.materials_csv);
  auto codes = CodeTable::load(csv::read_file(sc.path(sc.codes_csv)), sc.codes_csv);
  ScenarioData d;
  d.stacks = stacks;
  d.codes = codes;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& name : sc.buildings) {
    auto b = scenario_building(sc, d, name, sc.code_year, sc.concrete_mm);
    const auto& p = b.params;
    std::cout << "building " << name << " code " << sc.code_year << '\n'
              << "  R_ea " << p.r_ea << " K/kW\n"
              << "  R_ie " << p.r_ie << " K/kW\n"
              << "  R_fi " << p.r_fi << " K/kW\n"
              << "  C_e  " << p.c_e << " kWh/K\n"
              << "  C_f  " << p.c_f << " kWh/K\n"
              << "  C_i  " << p.c_i << " kWh/K\n"
              << "  Q_loss " << b.sizing.q_loss << " kW\n"
              << "  P_max  " << b.sizing.p_max << " kW\n";
    j.push_back({{"building", name},
                 {"code_year", sc.code_year},
                 {"r_ea_K_per_kW", p.r_ea},
                 {"r_ie_K_per_kW", p.r_ie},
                 {"r_fi_K_per_kW", p.r_fi},
                 {"c_e_kWh_per_K", p.c_e},
                 {"c_f_kWh_per_K", p.c_f},
                 {"c_i_kWh_per_K", p.c_i},
                 {"q_loss_kW", b.sizing.q_loss},
                 {"p_max_kW", b.sizing.p_max},
                 {"window_u", b.code.window.u},
                 {"window_g", b.code.window.g}});
  }
  write_json(o.out_dir, "params.json", j);
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  auto sc = load_scenario(o.scenario);
  auto data = load_scenario_data(sc);
  auto period = scenario_period(sc, data, sc.horizon_steps);
  std::vector<Cell> cells;
  for (const auto& name : sc.buildings) {
    auto b = scenario_building(sc, data, name, sc.code_year, sc.concrete_mm);
    for (auto sys : sc.systems) cells.push_back({"simulate", b, sys, heat_pump_for(sc, b), sc.horizon_steps});
  }
  std::vector<CellResult> results(cells.size());
  parallel_for(cells.size(), o.workers, [&](std::size_t i) { results[i] = run_cell(cells[i], sc, data, period); });

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!results[i].error.empty()) throw Error(Errc::structural, "experiment-runner", results[i].error);
    for (std::size_t k = 0; k < results[i].runs.size(); ++k) {
      auto name = "trajectory_" + cells[i].building.name + "_" + to_string(cells[i].system) + "_" +
                  to_string(results[i].cases[k]) + ".csv";
      auto out = open_out(o.out_dir, name);
      write_trajectory_csv(out, results[i].runs[k]);
    }
    auto r = rows_for(cells[i], results[i]);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  auto out = open_out(o.out_dir, "simulate.csv");
  write_sweep_csv(out, rows);
  write_json(o.out_dir, "simulate.json", sweep_json("simulate", rows));
  print_rows(rows);
  return kExitOk;
}

int cmd_sweep_horizon(const Options& o) {
  auto sc = load_scenario(o.scenario);
  auto data = load_scenario_data(sc);
  auto horizons = o.horizons.empty() ? sc.horizons : o.horizons;
  emit_sweep(o, "sweep_horizon", sweep_horizon(sc, data, horizons, o.workers));
  return kExitOk;
}

int cmd_sweep_heatpump(const Options& o) {
  auto sc = load_scenario(o.scenario);
  auto data = load_scenario_data(sc);
  auto sizes = o.p_max_list.empty() ? sc.p_max_list_kw : o.p_max_list;
  emit_sweep(o, "sweep_heatpump", sweep_heatpump(sc, data, sizes, o.workers));
  return kExitOk;
}

int cmd_sweep_codes(const Options& o) {
  auto sc = load_scenario(o.scenario);
  auto data = load_scenario_data(sc);
  auto years = o.code_years.empty() ? sc.code_years : o.code_years;
  auto concrete = o.concrete_list.empty() ? sc.concrete_list_mm : o.concrete_list;
  if (concrete.empty() && sc.concrete_mm) concrete = {*sc.concrete_mm};
  emit_sweep(o, "sweep_codes", sweep_codes(sc, data, years, concrete, o.workers));
  return kExitOk;
}

int cmd_profile(const Options& o) {
  auto sc = load_scenario(o.scenario);
  auto data = load_scenario_data(sc);
  auto period = scenario_period(sc, data, sc.horizon_steps);
  std::vector<Cell> cells;
  for (const auto& name : sc.buildings) {
    auto b = scenario_building(sc, data, name, sc.code_year, sc.concrete_mm);
    for (auto sys : sc.systems) cells.push_back({"profile", b, sys, heat_pump_for(sc, b), sc.horizon_steps});
  }
  std::vector<CellResult> results(cells.size());
  parallel_for(cells.size(), o.workers, [&](std::size_t i) { results[i] = run_cell(cells[i], sc, data, period); });
  std::vector<ProfileEntry> entries;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!results[i].error.empty()) throw Error(Errc::structural, "experiment-runner", results[i].error);
    for (std::size_t k = 0; k < results[i].runs.size(); ++k)
      entries.push_back({cells[i].building.name, to_string(cells[i].system), to_string(results[i].cases[k]),
                         hourly_load_profile({results[i].runs[k]}, sc.tz_offset_h)});
  }
  auto out = open_out(o.out_dir, "profile.csv");
  write_profile_csv(out, entries);
  write_profile_csv(std::cout, entries);
  return kExitOk;
}

int cmd_smooth_forecast(const Options& o) {
  auto points = load_forecasts(csv::read_file(o.forecast_csv), o.forecast_csv);
  auto raw = stitched_series(points);
  auto smooth = smooth_series(points, o.smoothing);
  auto out = open_out(o.out_dir, "smoothed.csv");
  out << "time,stitched,smoothed\n";
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    auto r = raw.at(smooth.time_at(i));
    out << format_iso8601(smooth.time_at(i)) << ',' << (r ? csv::format(*r) : std::string()) << ','
        << csv::format(smooth.values[i]) << '\n';
  }
  std::cout << "hours " << smooth.size() << "\nmax_jump_stitched " << max_jump(raw) << "\nmax_jump_smoothed "
            << max_jump(smooth) << '\n';
  return kExitOk;
}

void write_dataset(const fs::path& dir, const std::string& prefix, const synthetic::Dataset& d) {
  auto lam = open_out(dir, prefix + "_lambda.csv");
  write_timeseries(lam, d.penalty);
  auto temp = open_out(dir, prefix + "_temperature.csv");
  write_timeseries(temp, d.t_ambient);
  auto sol = open_out(dir, prefix + "_solar.csv");
  write_timeseries(sol, d.irradiance);
  if (!d.penalty_forecasts.empty()) {
    auto fc = open_out(dir, prefix + "_lambda_forecast.csv");
    write_forecasts(fc, d.penalty_forecasts);
  }
}

int cmd_generate_fixtures(const Options& o) {
  const auto year = *parse_iso8601("2021-01-01T00:00:00Z");

  // Year of diurnal emissions and Danish-like weather, plus 54 h of margin
  // so every horizon has data at the end.
  synthetic::DiurnalConfig diurnal;
  diurnal.start = year;
  diurnal.hours = 8760 + 54;
  write_dataset(o.out_dir, "diurnal", synthetic::diurnal(diurnal, o.seed));

  // Two winter weeks with constant emission intensity and ambient
  // temperature, so the COP is constant too.
  synthetic::DiurnalConfig flat = diurnal;
  flat.start = *parse_iso8601("2021-01-11T00:00:00Z");
  flat.hours = 14 * 24 + 54;
  flat.lambda_amplitude = flat.lambda_winter_bump = flat.morning_peak = flat.lambda_noise = 0.0;
  flat.forecast_error = 0.0;
  flat.temp_mean = 0.0;
  flat.temp_annual_amplitude = flat.temp_daily_amplitude = flat.temp_noise = 0.0;
  auto constant = synthetic::diurnal(flat, o.seed + 1);
  for (auto& v : constant.penalty.values) v = 300.0;
  constant.penalty_forecasts.clear();
  write_dataset(o.out_dir, "constant", constant);

  // Two weeks of a cold snap around the design outdoor temperature.
  synthetic::DiurnalConfig cold = diurnal;
  cold.start = *parse_iso8601("2021-01-11T00:00:00Z");
  cold.hours = 14 * 24 + 54;
  cold.temp_mean = -3.5;
  cold.temp_daily_amplitude = 3.0;
  auto snap = synthetic::diurnal(cold, o.seed + 2);
  snap.penalty_forecasts.clear();
  write_dataset(o.out_dir, "cold", snap);

  // Solar forecasts for 21 June, four issues per day with 6 h horizons.
  auto day = *parse_iso8601("2021-06-21T00:00:00Z");
  auto solar = synthetic::solar_forecast_day(day, {2, 8, 14, 20}, 6, diurnal.latitude_deg, 800.0, o.seed + 3);
  auto out = open_out(o.out_dir, "solar_forecast_0621.csv");
  write_forecasts(out, solar);
  std::cout << "fixtures written to " << o.out_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emission-aware MPC for heat pumps in buildings"};
  app.require_subcommand(1);
  Options o;
  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "Directory for output tables")->envname("HPFLEX_OUT_DIR");
  app.add_option("--workers", o.workers, "Concurrent sweep cells")->envname("HPFLEX_WORKERS")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for generated data")->envname("HPFLEX_SEED");

  auto scenario_cmd = [&](const std::string& name, const std::string& help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    return c;
  };
  auto* simulate = scenario_cmd("simulate", "One closed-loop run per case");
  auto* sweep_h = scenario_cmd("sweep-horizon", "Savings against the control horizon");
  sweep_h->add_option("--horizons", o.horizons, "Horizons in hours")->delimiter(',');
  auto* sweep_p = scenario_cmd("sweep-heatpump", "Savings against heat-pump size");
  sweep_p->add_option("--p-max", o.p_max_list, "Electrical sizes in kW")->delimiter(',');
  auto* sweep_c = scenario_cmd("sweep-codes", "Savings against building code and floor concrete");
  sweep_c->add_option("--code-years", o.code_years, "Code labels")->delimiter(',');
  sweep_c->add_option("--concrete-mm", o.concrete_list, "Floor concrete thicknesses")->delimiter(',');
  auto* profile = scenario_cmd("profile", "Mean load and penalty by hour of day");
  auto* derive = scenario_cmd("derive-params", "Envelope parameters and heat-pump sizing");
  auto* smooth = app.add_subcommand("smooth-forecast", "Real-time estimate from overlapping forecasts");
  smooth->add_option("forecasts", o.forecast_csv, "valid_time,horizon_h,value CSV")->required()->check(CLI::ExistingFile);
  smooth->add_option("--a", o.smoothing.a, "Horizon decay");
  smooth->add_option("--b", o.smoothing.b, "Kernel bandwidth in hours");
  smooth->add_option("--df", o.smoothing.df, "Spline basis size");
  smooth->add_flag("--clamp-nonnegative", o.smoothing.clamp_nonnegative, "Clip fitted values at zero");
  auto* generate = app.add_subcommand("generate-fixtures", "Write the synthetic datasets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  o.out_dir = out_dir;

  try {
    if (*simulate) return cmd_simulate(o);
    if (*sweep_h) return cmd_sweep_horizon(o);
    if (*sweep_p) return cmd_sweep_heatpump(o);
    if (*sweep_c) return cmd_sweep_codes(o);
    if (*profile) return cmd_profile(o);
    if (*derive) return cmd_derive_params(o);
    if (*smooth) return cmd_smooth_forecast(o);
    if (*generate) return cmd_generate_fixtures(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
