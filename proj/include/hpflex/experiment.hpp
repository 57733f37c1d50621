#pragma once

// Emission accounting, savings and the scenario sweeps.

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpflex/envelope.hpp"
#include "hpflex/error.hpp"
#include "hpflex/forecast.hpp"
#include "hpflex/heat_pump.hpp"
#include "hpflex/io.hpp"
#include "hpflex/mpc.hpp"
#include "hpflex/thermal.hpp"

namespace hpflex {

// ---------------------------------------------------------------------------
// Metrics

/// Records counted by the metrics: after burn-in and before the last N steps.
inline std::pair<std::size_t, std::size_t> metric_window(const RunResult& r, int N) {
  const long n = long(r.records.size());
  if (n <= N) throw Error(Errc::window, "experiment-runner", "run of " + std::to_string(n) +
                                                                 " steps is not longer than the horizon " +
                                                                 std::to_string(N));
  return {std::size_t(std::min<long>(r.burn_in, n - N)), std::size_t(n - N)};
}

/// Λ = Σ power·λ over the metric window, kg CO₂-eq (power kW → MW).
inline double total_emissions(const RunResult& r, int N) {
  auto [b, e] = metric_window(r, N);
  double sum = 0.0;
  for (std::size_t i = b; i < e; ++i) sum += r.records[i].power / 1000.0 * r.records[i].penalty;
  return sum;
}

inline double total_energy(const RunResult& r, int N) {
  auto [b, e] = metric_window(r, N);
  double sum = 0.0;
  for (std::size_t i = b; i < e; ++i) sum += r.records[i].power;
  return sum;
}

/// Hours in the metric window whose end-of-hour interior temperature is
/// below T_min. Overheating is not counted: the plant cannot cool.
inline int slack_hours(const RunResult& r, int N, double tol = 1e-6) {
  auto [b, e] = metric_window(r, N);
  int count = 0;
  for (std::size_t i = b; i < e; ++i) count += r.records[i].state.t_i < r.records[i].t_min - tol;
  return count;
}

inline double savings(double trivial, double candidate) {
  if (trivial == 0.0) throw Error(Errc::undefined_baseline, "experiment-runner", "baseline emissions are zero");
  return (trivial - candidate) / trivial;
}

struct LoadProfile {
  std::array<double, 24> power{};    // mean kW by local hour
  std::array<double, 24> penalty{};  // mean λ by local hour
};

/// Mean power and penalty per local hour of day over the records after
/// burn-in of every run.
inline LoadProfile hourly_load_profile(const std::vector<RunResult>& results, int utc_offset_h) {
  LoadProfile p;
  std::array<int, 24> count{};
  std::size_t total = 0;
  for (const auto& r : results) {
    for (std::size_t i = std::size_t(std::max(r.burn_in, 0)); i < r.records.size(); ++i) {
      const auto h = std::size_t(local_hour(r.records[i].time, utc_offset_h));
      p.power[h] += r.records[i].power;
      p.penalty[h] += r.records[i].penalty;
      ++count[h];
      ++total;
    }
  }
  for (std::size_t h = 0; h < 24; ++h) {
    if (count[h] == 0)
      throw Error(Errc::window, "experiment-runner", "load profile needs at least one full day of records");
    p.power[h] /= count[h];
    p.penalty[h] /= count[h];
  }
  return p;
}

// ---------------------------------------------------------------------------
// Building assembly

struct BuildingSetup {
  std::string name;
  BuildingGeometry geometry;
  EnvelopeStacks stacks;
  ResolvedCode code;
  EnvelopeParams params;
  Sizing sizing;
  ComfortSchedule schedule;
};

/// Envelope for a building at a code level: wall and roof insulation are
/// sized to the code's U-values and the floor concrete optionally replaced.
inline BuildingSetup make_building(const std::string& name, const BuildingGeometry& geo,
                                   const EnvelopeStacks& base, const ResolvedCode& code,
                                   std::optional<double> concrete_m, const ComfortSchedule& schedule,
                                   double t_hot = 40.0, double eta = 0.5) {
  BuildingSetup b;
  b.name = name;
  b.geometry = geo;
  b.code = code;
  b.schedule = schedule;
  b.stacks.wall = insulation_for_code(base.wall, code.u_wall);
  b.stacks.roof = insulation_for_code(base.roof, code.u_roof);
  b.stacks.floor = concrete_m ? with_mass_thickness(base.floor, *concrete_m) : base.floor;
  b.params = derive_params(geo, b.stacks, code.window.u, code.u_door);
  b.sizing = size_from_heat_loss(geo, code, kDesignIndoorC - kDesignOutdoorC, t_hot, eta);
  return b;
}

/// Loaded inputs shared by every run of a scenario.
struct ScenarioData {
  HourlySeries penalty;
  HourlySeries t_ambient;
  HourlySeries irradiance;  // W/m²
  std::vector<ForecastPoint> penalty_forecasts;
  EnvelopeStacks stacks;
  CodeTable codes;
};

inline ScenarioData load_scenario_data(const Scenario& sc) {
  ScenarioData d;
  d.stacks = load_materials(csv::read_file(sc.path(sc.materials_csv)), sc.materials_csv);
  d.codes = CodeTable::load(csv::read_file(sc.path(sc.codes_csv)), sc.codes_csv);
  auto need = [&](const std::string& key, const std::string& value) {
    if (value.empty()) throw Error(Errc::config, "cli-io", "scenario is missing '" + key + "'");
    return sc.path(value);
  };
  d.penalty = require_complete(load_timeseries(need("lambda_csv", sc.lambda_csv)), "lambda_csv");
  d.t_ambient = require_complete(load_timeseries(need("temperature_csv", sc.temperature_csv)), "temperature_csv");
  d.irradiance = require_complete(load_timeseries(need("solar_csv", sc.solar_csv)), "solar_csv");
  if (!sc.lambda_forecast_csv.empty())
    d.penalty_forecasts = load_forecasts(csv::read_file(sc.path(sc.lambda_forecast_csv)), sc.lambda_forecast_csv);
  return d;
}

inline ComfortSchedule schedule_for(const Scenario& sc, const std::string& building) {
  int ns = building == "office" ? 18 : 23, ne = building == "office" ? 7 : 5;
  if (sc.night_start_h) {
    ns = *sc.night_start_h;
    ne = *sc.night_end_h;
  }
  return ComfortSchedule::setback(sc.t_day_c, sc.t_night_c, ns, ne, sc.t_max_c);
}

inline BuildingGeometry geometry_for(const Scenario& sc, const std::string& building) {
  if (building == "family") return family_house_geometry();
  if (building == "office") return office_geometry();
  return geometry_from_footprint(sc.length_m, sc.width_m, sc.height_m, sc.window_to_wall, sc.door_to_wall);
}

inline BuildingSetup scenario_building(const Scenario& sc, const ScenarioData& data, const std::string& building,
                                       const std::string& code_year, std::optional<double> concrete_mm) {
  if (!data.codes.find(code_year)) throw Error(Errc::config, "cli-io", "unknown code year '" + code_year + "'");
  std::optional<double> concrete_m;
  if (concrete_mm) concrete_m = *concrete_mm / 1000.0;
  return make_building(building, geometry_for(sc, building), data.stacks, data.codes.resolve(code_year), concrete_m,
                       schedule_for(sc, building), sc.t_hot_c, sc.eta);
}

/// One closed-loop configuration of a scenario.
struct Cell {
  std::string sweep_param;
  BuildingSetup building;
  HeatingSystem system = HeatingSystem::floor;
  HeatPumpSpec hp;
  int horizon = 24;
  std::string setup_error;  // the building could not be assembled
};

struct CellResult {
  std::vector<RunResult> runs;  // one per case, Trivial included
  std::vector<ForecastCase> cases;
  std::string error;
};

struct Period {
  Timestamp start{};
  int steps = 0;
};

/// Run period: the scenario's start/hours, clipped so every horizon still has
/// data.
inline Period scenario_period(const Scenario& sc, const ScenarioData& d, int max_horizon) {
  Period p;
  p.start = sc.start.value_or(d.penalty.start);
  auto covered = [&](const HourlySeries& s) {
    auto i = s.index_of(p.start);
    if (!i) throw Error(Errc::coverage, "cli-io", "data does not cover the start " + format_iso8601(p.start));
    return long(s.size() - *i);
  };
  long avail = std::min({covered(d.penalty), covered(d.t_ambient), covered(d.irradiance)}) - max_horizon + 1;
  p.steps = int(std::max(0L, sc.hours ? std::min<long>(*sc.hours, avail) : avail));
  if (sc.hours && *sc.hours > avail)
    throw Error(Errc::coverage, "cli-io",
                "data covers only " + std::to_string(avail) + " of the requested " + std::to_string(*sc.hours) +
                    " hours (plus horizon)");
  return p;
}

inline RunData run_data_for(const ScenarioData& d, const BuildingSetup& b) {
  RunData r;
  r.penalty = d.penalty;
  r.t_ambient = d.t_ambient;
  r.solar_gain = d.irradiance;
  for (auto& v : r.solar_gain.values) v = solar_gain_kw(b.code.window.g, b.geometry.window_area, v);
  return r;
}

inline double default_slack_penalty(const Scenario& sc, const ScenarioData& d, double p_max) {
  if (sc.slack_penalty) return *sc.slack_penalty;
  double max_lambda = 0.0;
  for (double v : d.penalty.values) max_lambda = std::max(max_lambda, std::abs(v));
  return 1e3 * std::max(max_lambda, 1.0) * p_max;
}

inline CellResult run_cell(const Cell& cell, const Scenario& sc, const ScenarioData& d, const Period& period) {
  CellResult out;
  if (!cell.setup_error.empty()) {
    out.error = cell.setup_error;
    return out;
  }
  try {
    auto model = discretize(build_continuous(cell.building.params, cell.system, sc.psi_s), 1.0);
    RunData data = run_data_for(d, cell.building);
    PenaltySource penalties(d.penalty, d.penalty_forecasts);
    ClosedLoopConfig cfg;
    cfg.start = period.start;
    cfg.steps = period.steps;
    cfg.burn_in = sc.burn_in_h;
    cfg.utc_offset_h = sc.tz_offset_h;
    cfg.slack_penalty = default_slack_penalty(sc, d, cell.hp.p_max);
    auto cases = sc.effective_cases();
    if (std::find(cases.begin(), cases.end(), ForecastCase::trivial) == cases.end())
      cases.push_back(ForecastCase::trivial);
    for (auto c : cases) {
      out.cases.push_back(c);
      out.runs.push_back(closed_loop(model, {c, cell.horizon}, penalties, data, cell.building.schedule, cell.hp, cfg));
    }
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

/// Runs `task(i)` for i in [0, n) on up to `workers` threads.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task) {
  const std::size_t threads = std::min<std::size_t>(n, std::size_t(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Sweep tables

struct SweepRow {
  std::string sweep_param;
  std::string forecast_case;
  std::string system;
  std::string building;
  double savings = 0.0;
  double emissions_kg = 0.0;
  double energy_kwh = 0.0;
  int slack_hours = 0;
  std::string error;
};

inline std::vector<SweepRow> rows_for(const Cell& cell, const CellResult& res) {
  std::vector<SweepRow> rows;
  if (!res.error.empty()) {
    SweepRow r{cell.sweep_param, "failed", to_string(cell.system), cell.building.name};
    r.error = res.error;
    rows.push_back(r);
    return rows;
  }
  const RunResult* trivial = nullptr;
  for (std::size_t i = 0; i < res.cases.size(); ++i)
    if (res.cases[i] == ForecastCase::trivial) trivial = &res.runs[i];
  for (std::size_t i = 0; i < res.cases.size(); ++i) {
    const auto& run = res.runs[i];
    const int N = cell.horizon;
    SweepRow r{cell.sweep_param, to_string(res.cases[i]), to_string(cell.system), cell.building.name};
    try {
      r.emissions_kg = total_emissions(run, N);
      r.energy_kwh = total_energy(run, N);
      r.slack_hours = slack_hours(run, N);
      r.savings = savings(total_emissions(*trivial, N), r.emissions_kg);
    } catch (const Error& e) {
      r.error = e.what();
    }
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<SweepRow> run_cells(const std::vector<Cell>& cells, const Scenario& sc, const ScenarioData& d,
                                       const Period& period, int workers) {
  std::vector<CellResult> results(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t i) { results[i] = run_cell(cells[i], sc, d, period); });
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto r = rows_for(cells[i], results[i]);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

inline HeatPumpSpec heat_pump_for(const Scenario& sc, const BuildingSetup& b) {
  return {sc.p_max_kw.value_or(b.sizing.p_max), sc.t_hot_c, sc.eta};
}

inline std::vector<SweepRow> sweep_horizon(const Scenario& sc, const ScenarioData& d, const std::vector<int>& horizons,
                                           int workers = 1) {
  if (horizons.empty()) return {};
  for (int h : horizons)
    if (h < 1 || h > 48) throw Error(Errc::config, "experiment-runner", "horizons must lie in [1,48]");
  auto period = scenario_period(sc, d, *std::max_element(horizons.begin(), horizons.end()));
  std::vector<Cell> cells;
  for (const auto& b : sc.buildings) {
    auto setup = scenario_building(sc, d, b, sc.code_year, sc.concrete_mm);
    for (auto sys : sc.systems)
      for (int h : horizons) cells.push_back({"horizon=" + std::to_string(h), setup, sys, heat_pump_for(sc, setup), h});
  }
  return run_cells(cells, sc, d, period, workers);
}

inline std::vector<SweepRow> sweep_heatpump(const Scenario& sc, const ScenarioData& d,
                                            const std::vector<double>& p_max_list, int workers = 1) {
  if (p_max_list.empty()) return {};
  auto period = scenario_period(sc, d, sc.horizon_steps);
  std::vector<Cell> cells;
  for (const auto& b : sc.buildings) {
    auto setup = scenario_building(sc, d, b, sc.code_year, sc.concrete_mm);
    for (auto sys : sc.systems)
      for (double p : p_max_list) {
        if (!(p > 0.0)) throw Error(Errc::config, "experiment-runner", "heat-pump sizes must be positive");
        cells.push_back({"p_max_kw=" + csv::format(p), setup, sys, {p, sc.t_hot_c, sc.eta}, sc.horizon_steps});
      }
  }
  return run_cells(cells, sc, d, period, workers);
}

inline std::vector<SweepRow> sweep_codes(const Scenario& sc, const ScenarioData& d,
                                         const std::vector<std::string>& code_years,
                                         const std::vector<double>& concrete_mm, int workers = 1) {
  if (code_years.empty() || concrete_mm.empty()) return {};
  for (const auto& y : code_years)
    if (!d.codes.find(y)) throw Error(Errc::config, "experiment-runner", "unknown code year '" + y + "'");
  auto period = scenario_period(sc, d, sc.horizon_steps);
  std::vector<Cell> cells;
  for (const auto& b : sc.buildings)
    for (auto sys : sc.systems)
      for (const auto& y : code_years)
        for (double c : concrete_mm) {
          Cell cell;
          cell.sweep_param = "code=" + y + "|concrete_mm=" + csv::format(c);
          cell.system = sys;
          cell.horizon = sc.horizon_steps;
          try {
            cell.building = scenario_building(sc, d, b, y, c);
            cell.hp = heat_pump_for(sc, cell.building);
          } catch (const Error& e) {
            if (e.code() != Errc::infeasible_target && e.code() != Errc::stack) throw;
            cell.building.name = b;
            cell.setup_error = e.what();
          }
          cells.push_back(std::move(cell));
        }
  return run_cells(cells, sc, d, period, workers);
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "sweep_param,case,system,building,savings,emissions_kg,energy_kwh,slack_hours\n";
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      out << r.sweep_param << ",failed," << r.system << ',' << r.building << ",,,,\n";
      continue;
    }
    out << r.sweep_param << ',' << r.forecast_case << ',' << r.system << ',' << r.building << ','
        << csv::format(r.savings) << ',' << csv::format(r.emissions_kg) << ',' << csv::format(r.energy_kwh) << ','
        << r.slack_hours << '\n';
  }
}

inline nlohmann::json sweep_json(const std::string& kind, const std::vector<SweepRow>& rows) {
  nlohmann::json j;
  j["sweep"] = kind;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row{{"sweep_param", r.sweep_param}, {"case", r.forecast_case}, {"system", r.system},
                       {"building", r.building}};
    if (r.error.empty()) {
      row["savings"] = r.savings;
      row["emissions_kg"] = r.emissions_kg;
      row["energy_kwh"] = r.energy_kwh;
      row["slack_hours"] = r.slack_hours;
    } else {
      row["error"] = r.error;
    }
    j["rows"].push_back(row);
  }
  return j;
}

inline void write_trajectory_csv(std::ostream& out, const RunResult& r) {
  out << "time,t_i,t_f,t_e,heat_kw,power_kw,slack_c,lambda,t_min,t_max\n";
  for (const auto& s : r.records)
    out << format_iso8601(s.time) << ',' << csv::format(s.state.t_i) << ',' << csv::format(s.state.t_f) << ','
        << csv::format(s.state.t_e) << ',' << csv::format(s.heat) << ',' << csv::format(s.power) << ','
        << csv::format(s.slack) << ',' << csv::format(s.penalty) << ',' << csv::format(s.t_min) << ','
        << csv::format(s.t_max) << '\n';
}

struct ProfileEntry {
  std::string building;
  std::string system;
  std::string forecast_case;
  LoadProfile profile;
};

inline void write_profile_csv(std::ostream& out, const std::vector<ProfileEntry>& entries) {
  out << "hour,building,system,case,mean_power_kw,mean_lambda\n";
  for (const auto& e : entries)
    for (std::size_t h = 0; h < 24; ++h)
      out << h << ',' << e.building << ',' << e.system << ',' << e.forecast_case << ','
          << csv::format(e.profile.power[h]) << ',' << csv::format(e.profile.penalty[h]) << '\n';
}

}  // namespace hpflex
