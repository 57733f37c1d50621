#pragma once

// Data ingestion and scenario configuration.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hpflex/csv.hpp"
#include "hpflex/error.hpp"
#include "hpflex/forecast.hpp"
#include "hpflex/series.hpp"
#include "hpflex/thermal.hpp"
#include "hpflex/time.hpp"

namespace hpflex {

struct LoadedSeries {
  HourlySeries series;  // NaN at missing hours
  std::vector<Timestamp> gaps;
};

/// Reads a `time,value` CSV of strictly increasing hourly UTC timestamps.
inline LoadedSeries load_timeseries(std::istream& in, const std::string& source) {
  auto t = csv::parse(in, source);
  if (t.header.size() != 2) throw Error(Errc::parse, "cli-io", source + ": expected two columns (time,value)");
  LoadedSeries out;
  std::optional<Timestamp> prev;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto where = source + ":" + std::to_string(t.line_numbers[r]);
    auto ts = parse_iso8601(t.rows[r][0]);
    if (!ts) throw Error(Errc::parse, "cli-io", where + ": bad timestamp '" + t.rows[r][0] + "'");
    if ((*ts - std::chrono::floor<std::chrono::hours>(*ts)).count() != 0)
      throw Error(Errc::parse, "cli-io", where + ": timestamp is not on the hour");
    double v = csv::to_double(t.rows[r][1], where);
    if (!prev) {
      out.series.start = *ts;
    } else {
      if (*ts == *prev) throw Error(Errc::parse, "cli-io", where + ": duplicate timestamp " + t.rows[r][0]);
      if (*ts < *prev) throw Error(Errc::parse, "cli-io", where + ": timestamps must increase");
      for (auto g = *prev + kHour; g < *ts; g += kHour) {
        out.gaps.push_back(g);
        out.series.values.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    out.series.values.push_back(v);
    prev = *ts;
  }
  return out;
}

inline LoadedSeries load_timeseries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse, "cli-io", "cannot open " + path);
  return load_timeseries(in, path);
}

inline void write_timeseries(std::ostream& out, const HourlySeries& s) {
  out << "time,value\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!std::isnan(s.values[i])) out << format_iso8601(s.time_at(i)) << ',' << csv::format(s.values[i]) << '\n';
}

/// Requires a gap-free series, naming the missing hours otherwise.
inline const HourlySeries& require_complete(const LoadedSeries& s, const std::string& what) {
  if (!s.gaps.empty()) {
    std::string list;
    for (std::size_t i = 0; i < s.gaps.size() && i < 10; ++i) list += (i ? ", " : "") + format_iso8601(s.gaps[i]);
    throw Error(Errc::gap, "cli-io", what + " has " + std::to_string(s.gaps.size()) + " missing hour(s): " + list);
  }
  return s.series;
}

// ---------------------------------------------------------------------------
// Scenario files: `key = value` lines, `#` comments, comma-separated lists.
// Units are part of the key names. Unknown keys are rejected.

struct Scenario {
  std::filesystem::path base_dir;

  std::vector<std::string> buildings{"family"};  // family | office | custom
  std::vector<HeatingSystem> systems{HeatingSystem::floor};
  std::string code_year = "2018";
  std::optional<double> concrete_mm;  // floor storage-mass thickness

  // custom geometry
  double length_m = 12.5, width_m = 12.5, height_m = 2.5;
  double window_to_wall = 0.11, door_to_wall = 0.04;

  std::optional<double> p_max_kw;  // sized from the design heat loss when absent
  double t_hot_c = 40.0;
  double eta = 0.5;

  int horizon_steps = 24;
  std::optional<double> slack_penalty;
  std::vector<ForecastCase> cases;  // default: Ideal, Real (with forecasts), Trivial

  double t_day_c = 20.0, t_night_c = 18.0, t_max_c = 24.0;
  std::optional<int> night_start_h, night_end_h;
  double psi_s = 0.1;
  int tz_offset_h = 1;
  int burn_in_h = 48;
  std::optional<Timestamp> start;
  std::optional<int> hours;

  std::string lambda_csv, lambda_forecast_csv, temperature_csv, solar_csv;
  std::string materials_csv = "materials.csv", codes_csv = "building_codes.csv";

  std::vector<int> horizons;
  std::vector<double> p_max_list_kw;
  std::vector<std::string> code_years;
  std::vector<double> concrete_list_mm;

  std::string path(const std::string& p) const {
    std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base_dir / fp).lexically_normal().string();
  }

  std::vector<ForecastCase> effective_cases() const {
    if (!cases.empty()) return cases;
    std::vector<ForecastCase> c{ForecastCase::ideal};
    if (!lambda_forecast_csv.empty()) c.push_back(ForecastCase::real);
    c.push_back(ForecastCase::trivial);
    return c;
  }
};

namespace detail {

inline std::vector<std::string> list_of(const std::string& v) {
  std::vector<std::string> out;
  for (auto& s : csv::split(v))
    if (!s.empty()) out.push_back(s);
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& in, const std::string& source,
                               const std::filesystem::path& base_dir = {}) {
  Scenario sc;
  sc.base_dir = base_dir;
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto text = csv::trim(line);
    if (text.empty()) continue;
    auto eq = text.find('=');
    auto where = source + ":" + std::to_string(line_no);
    auto fail = [&](const std::string& what) { throw Error(Errc::config, "cli-io", where + ": " + what); };
    if (eq == std::string::npos) fail("expected 'key = value'");
    auto key = csv::trim(text.substr(0, eq));
    auto value = csv::trim(text.substr(eq + 1));
    if (!seen.insert(key).second) fail("duplicate key '" + key + "'");

    auto num = [&]() {
      try {
        return csv::to_double(value, where);
      } catch (const Error&) {
        fail(key + ": expected a number, got '" + value + "'");
      }
      return 0.0;
    };
    auto integer = [&]() {
      double v = num();
      if (v != std::floor(v)) fail(key + ": expected an integer");
      return int(v);
    };
    auto numbers = [&]() {
      std::vector<double> out;
      for (auto& s : detail::list_of(value)) {
        try {
          out.push_back(csv::to_double(s, where));
        } catch (const Error&) {
          fail(key + ": bad list entry '" + s + "'");
        }
      }
      return out;
    };
    auto optional_num = [&]() -> std::optional<double> {
      if (value == "auto") return std::nullopt;
      return num();
    };

    if (key == "building") {
      sc.buildings = detail::list_of(value);
      for (auto& b : sc.buildings)
        if (b != "family" && b != "office" && b != "custom") fail("building must be family, office or custom");
    } else if (key == "heating") {
      sc.systems.clear();
      for (auto& s : detail::list_of(value)) {
        if (s == "floor")
          sc.systems.push_back(HeatingSystem::floor);
        else if (s == "radiator")
          sc.systems.push_back(HeatingSystem::radiator);
        else
          fail("heating must be floor or radiator");
      }
    } else if (key == "code_year") {
      sc.code_year = value;
    } else if (key == "concrete_mm") {
      sc.concrete_mm = optional_num();
    } else if (key == "length_m") {
      sc.length_m = num();
    } else if (key == "width_m") {
      sc.width_m = num();
    } else if (key == "height_m") {
      sc.height_m = num();
    } else if (key == "window_to_wall") {
      sc.window_to_wall = num();
    } else if (key == "door_to_wall") {
      sc.door_to_wall = num();
    } else if (key == "p_max_kw") {
      sc.p_max_kw = optional_num();
    } else if (key == "t_hot_c") {
      sc.t_hot_c = num();
    } else if (key == "eta") {
      sc.eta = num();
    } else if (key == "horizon_steps") {
      sc.horizon_steps = integer();
    } else if (key == "slack_penalty") {
      sc.slack_penalty = optional_num();
    } else if (key == "cases") {
      for (auto& c : detail::list_of(value)) {
        if (c == "ideal")
          sc.cases.push_back(ForecastCase::ideal);
        else if (c == "real")
          sc.cases.push_back(ForecastCase::real);
        else if (c == "trivial")
          sc.cases.push_back(ForecastCase::trivial);
        else
          fail("cases must be ideal, real or trivial");
      }
    } else if (key == "t_day_c") {
      sc.t_day_c = num();
    } else if (key == "t_night_c") {
      sc.t_night_c = num();
    } else if (key == "t_max_c") {
      sc.t_max_c = num();
    } else if (key == "night_start_h") {
      sc.night_start_h = integer();
    } else if (key == "night_end_h") {
      sc.night_end_h = integer();
    } else if (key == "psi_s") {
      sc.psi_s = num();
    } else if (key == "tz_offset_h") {
      sc.tz_offset_h = integer();
    } else if (key == "burn_in_h") {
      sc.burn_in_h = integer();
    } else if (key == "start") {
      sc.start = parse_iso8601(value);
      if (!sc.start) fail("start: expected an ISO-8601 UTC timestamp");
    } else if (key == "hours") {
      sc.hours = integer();
    } else if (key == "lambda_csv") {
      sc.lambda_csv = value;
    } else if (key == "lambda_forecast_csv") {
      sc.lambda_forecast_csv = value;
    } else if (key == "temperature_csv") {
      sc.temperature_csv = value;
    } else if (key == "solar_csv") {
      sc.solar_csv = value;
    } else if (key == "materials_csv") {
      sc.materials_csv = value;
    } else if (key == "codes_csv") {
      sc.codes_csv = value;
    } else if (key == "horizons") {
      for (double h : numbers()) {
        if (h != std::floor(h) || h < 1 || h > 48) fail("horizons must be integers in [1,48]");
        sc.horizons.push_back(int(h));
      }
    } else if (key == "p_max_list_kw") {
      sc.p_max_list_kw = numbers();
    } else if (key == "code_years") {
      sc.code_years = detail::list_of(value);
    } else if (key == "concrete_list_mm") {
      sc.concrete_list_mm = numbers();
    } else {
      fail("unknown key '" + key + "'");
    }
  }

  auto fail = [&](const std::string& what) { throw Error(Errc::config, "cli-io", source + ": " + what); };
  if (sc.horizon_steps < 1) fail("horizon_steps must be >= 1");
  if (sc.eta <= 0.0 || sc.eta > 1.0) fail("eta must lie in (0,1]");
  if (sc.psi_s < 0.0 || sc.psi_s > 1.0) fail("psi_s must lie in [0,1]");
  if (sc.burn_in_h < 0) fail("burn_in_h must be >= 0");
  if (sc.hours && *sc.hours < 0) fail("hours must be >= 0");
  if (sc.p_max_kw && !(*sc.p_max_kw > 0.0)) fail("p_max_kw must be positive");
  if (sc.concrete_mm && !(*sc.concrete_mm > 0.0)) fail("concrete_mm must be positive");
  for (double t : sc.concrete_list_mm)
    if (!(t > 0.0)) fail("concrete_list_mm entries must be positive");
  for (double p : sc.p_max_list_kw)
    if (!(p > 0.0)) fail("p_max_list_kw entries must be positive");
  if (sc.night_start_h.has_value() != sc.night_end_h.has_value())
    fail("night_start_h and night_end_h go together");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cli-io", "cannot open scenario " + path);
  return parse_scenario(in, path, std::filesystem::path(path).parent_path());
}

}  // namespace hpflex
