#pragma once

// Synthetic hourly datasets standing in for measured emission, weather and
// forecast data. Everything is drawn from a seeded std::mt19937_64.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hpflex/forecast.hpp"
#include "hpflex/series.hpp"
#include "hpflex/time.hpp"

namespace hpflex::synthetic {

struct Dataset {
  HourlySeries penalty;      // g CO₂-eq/kWh
  HourlySeries t_ambient;    // °C
  HourlySeries irradiance;   // W/m² on the glazing
  std::vector<ForecastPoint> penalty_forecasts;
};

struct DiurnalConfig {
  Timestamp start{};
  int hours = 8760;
  int utc_offset_h = 1;
  // emission intensity
  double lambda_mean = 300.0;
  double lambda_amplitude = 90.0;      // daily swing at the annual mean
  double lambda_winter_bump = 60.0;    // extra daily swing in mid-winter
  double lambda_peak_hour = 17.0;      // local
  double morning_peak = 120.0;         // early-morning import peak on top of the sinusoid
  double morning_peak_hour = 4.0;      // local
  double morning_peak_width_h = 1.2;
  double lambda_noise = 25.0;          // AR(1) innovation scale
  double lambda_noise_phi = 0.7;
  double lambda_floor = 20.0;
  // ambient temperature
  double temp_mean = 8.0;
  double temp_annual_amplitude = 8.5;  // coldest mid-January
  double temp_daily_amplitude = 2.5;   // warmest 15:00 local
  double temp_noise = 0.6;
  double temp_noise_phi = 0.95;
  // solar
  double latitude_deg = 55.7;
  double solar_peak = 450.0;           // W/m² on the glazing at clear sky, sun overhead
  // forecasts
  int forecast_every_h = 6;
  int forecast_max_horizon = 54;
  double forecast_error = 12.0;        // per-step innovation of the forecast error
};

inline double round_to(double x, double step) { return std::round(x / step) / (1.0 / step); }

inline double day_of_year(Timestamp t) {
  using namespace std::chrono;
  auto d = floor<days>(t);
  year_month_day ymd{d};
  auto jan1 = sys_days{ymd.year() / January / 1};
  return double((d - jan1).count()) + double(duration_cast<seconds>(t - d).count()) / 86400.0;
}

/// Clear-sky irradiance shape from the solar elevation (no equation of time).
inline double clear_sky(Timestamp t, double latitude_deg, double peak) {
  const double pi = std::numbers::pi;
  const double doy = day_of_year(t);
  const double decl = 23.44 * pi / 180.0 * std::sin(2.0 * pi * (284.0 + doy) / 365.0);
  const double solar_hour = std::fmod(doy, 1.0) * 24.0;  // UTC, ~12 UTC solar noon in Denmark
  const double hour_angle = (solar_hour - 12.0 + 0.8) * 15.0 * pi / 180.0;
  const double lat = latitude_deg * pi / 180.0;
  const double sin_elev = std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
  return sin_elev > 0.0 ? peak * std::pow(sin_elev, 1.2) : 0.0;
}

inline Dataset diurnal(const DiurnalConfig& cfg, std::uint64_t seed) {
  const double pi = std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Dataset d;
  d.penalty.start = d.t_ambient.start = d.irradiance.start = cfg.start;
  double lam_noise = 0.0, temp_noise = 0.0, cloud = 1.0;
  for (int k = 0; k < cfg.hours; ++k) {
    const Timestamp t = cfg.start + kHour * k;
    const double doy = day_of_year(t);
    const double hour = double(local_hour(t, cfg.utc_offset_h));
    const double winter = 0.5 * (1.0 + std::cos(2.0 * pi * (doy - 15.0) / 365.0));  // 1 mid-January

    lam_noise = cfg.lambda_noise_phi * lam_noise + cfg.lambda_noise * normal(rng);
    const double swing = cfg.lambda_amplitude + cfg.lambda_winter_bump * winter;
    double dm = std::abs(hour - cfg.morning_peak_hour);
    dm = std::min(dm, 24.0 - dm);
    const double morning = cfg.morning_peak * (0.5 + 0.5 * winter) *
                           std::exp(-0.5 * dm * dm / (cfg.morning_peak_width_h * cfg.morning_peak_width_h));
    const double lam = cfg.lambda_mean + 40.0 * winter +
                       swing * std::cos(2.0 * pi * (hour - cfg.lambda_peak_hour) / 24.0) + morning + lam_noise;
    d.penalty.values.push_back(round_to(std::max(lam, cfg.lambda_floor), 0.01));

    temp_noise = cfg.temp_noise_phi * temp_noise + cfg.temp_noise * normal(rng);
    const double temp = cfg.temp_mean - cfg.temp_annual_amplitude * std::cos(2.0 * pi * (doy - 15.0) / 365.0) +
                        cfg.temp_daily_amplitude * std::cos(2.0 * pi * (hour - 15.0) / 24.0) + temp_noise;
    d.t_ambient.values.push_back(round_to(temp, 0.01));

    if (local_hour(t, 0) == 0) cloud = 0.25 + 0.75 * uniform(rng);
    d.irradiance.values.push_back(round_to(cloud * clear_sky(t, cfg.latitude_deg, cfg.solar_peak), 0.1));
  }

  // Penalty forecasts: issued every few hours, error an AR(1) walk over the
  // horizon. The first issue precedes the start so hour 0 is covered.
  for (int issue = -cfg.forecast_every_h; issue < cfg.hours; issue += cfg.forecast_every_h) {
    double err = 0.0;
    for (int h = 1; h <= cfg.forecast_max_horizon; ++h) {
      err = 0.9 * err + cfg.forecast_error * normal(rng);
      const int target = issue + h;
      if (target >= cfg.hours) break;
      if (target < 0) continue;
      d.penalty_forecasts.push_back({cfg.start + kHour * target, h,
                                     round_to(std::max(d.penalty.values[std::size_t(target)] + err, cfg.lambda_floor), 0.01)});
    }
  }
  return d;
}

/// Stitched day-ahead solar forecasts for one day: issued at `issue_hours`
/// (UTC) with horizons 1..`max_horizon`; each issue carries its own bias so
/// the naive stitched series jumps at issue boundaries.
inline std::vector<ForecastPoint> solar_forecast_day(Timestamp day_start, const std::vector<int>& issue_hours,
                                                     int max_horizon, double latitude_deg, double peak,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ForecastPoint> out;
  for (int issue : issue_hours) {
    const double bias = 0.25 * normal(rng);
    for (int h = 1; h <= max_horizon; ++h) {
      const Timestamp t = day_start + kHour * (issue + h);
      const double clear = clear_sky(t, latitude_deg, peak);
      const double value = clear * (1.0 + bias * (1.0 + 0.15 * h)) + 15.0 * normal(rng) * (clear > 0.0);
      out.push_back({t, h, round_to(std::max(value, 0.0), 0.1)});
    }
  }
  return out;
}

}  // namespace hpflex::synthetic
