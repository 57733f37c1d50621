#pragma once

// Emission-aware MPC for the heat pump. The horizon problem is condensed onto
// the per-step delivered heat q_s and comfort slack v_s and solved as an LP.

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hpflex/error.hpp"
#include "hpflex/forecast.hpp"
#include "hpflex/heat_pump.hpp"
#include "hpflex/lp.hpp"
#include "hpflex/series.hpp"
#include "hpflex/thermal.hpp"

namespace hpflex {

/// Comfort band by local hour of day.
struct ComfortSchedule {
  std::array<double, 24> t_min{};
  std::array<double, 24> t_max{};

  /// Night set-back between `night_start` (inclusive) and `night_end`
  /// (exclusive), wrapping over midnight.
  static ComfortSchedule setback(double day_c, double night_c, int night_start, int night_end, double max_c = 24.0) {
    ComfortSchedule s;
    for (int h = 0; h < 24; ++h) {
      bool night = night_start <= night_end ? (h >= night_start && h < night_end)
                                            : (h >= night_start || h < night_end);
      s.t_min[std::size_t(h)] = night ? night_c : day_c;
      s.t_max[std::size_t(h)] = max_c;
    }
    s.validate();
    return s;
  }
  static ComfortSchedule family_house() { return setback(20.0, 18.0, 23, 5); }
  static ComfortSchedule office() { return setback(20.0, 18.0, 18, 7); }
  static ComfortSchedule constant(double min_c, double max_c = 24.0) { return setback(min_c, min_c, 0, 0, max_c); }

  void validate() const {
    for (std::size_t h = 0; h < 24; ++h)
      if (!(t_min[h] < t_max[h]))
        throw Error(Errc::config, "mpc-controller", "T_min must stay below T_max at hour " + std::to_string(h));
  }
};

struct MpcConfig {
  int horizon = 24;
  double slack_penalty = 1e5;  // per °C of violation per step
  ForecastCase forecast_case = ForecastCase::ideal;
};

/// Everything the horizon problem at one sampling time depends on. Step s
/// (0-based) covers the hour after t + s; its successor state is checked
/// against the comfort band of the hour it lands in.
struct PlanRequest {
  const DiscreteModel* model = nullptr;
  BuildingState state;
  std::span<const double> penalty;
  std::span<const Disturbance> disturbances;
  const ComfortSchedule* schedule = nullptr;
  int hour_of_day = 0;  // local hour at t
  HeatPumpSpec hp;
  MpcConfig cfg;
};

struct Plan {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> heat;   // kW delivered
  std::vector<double> power;  // kW electrical
  std::vector<double> slack;  // °C
  std::vector<double> interior;  // predicted T_i of the successor states
  double objective = 0.0;
};

namespace detail {

/// T_i along the horizon as free response plus a lower-triangular gain on q.
struct Condensed {
  std::vector<double> free;        // size N
  Eigen::MatrixXd gain;            // N×N, gain(s, j) = effect of q_j on T_i(s+1)
};

inline Condensed condense(const DiscreteModel& m, const BuildingState& x0, std::span<const Disturbance> d, int N) {
  Condensed c;
  c.free.resize(std::size_t(N));
  c.gain = Eigen::MatrixXd::Zero(N, N);
  Vector3 x = x0.vec();
  std::vector<double> markov(static_cast<std::size_t>(N));
  Vector3 ab = m.B;
  for (int s = 0; s < N; ++s) {
    x = m.A * x + m.E * d[std::size_t(s)].vec();
    c.free[std::size_t(s)] = x(0);
    markov[std::size_t(s)] = ab(0);  // e1ᵀ A^s B
    ab = m.A * ab;
  }
  for (int s = 0; s < N; ++s)
    for (int j = 0; j <= s; ++j) c.gain(s, j) = markov[std::size_t(s - j)];
  return c;
}

}  // namespace detail

/// Builds the horizon LP. Variables are [q_0..q_{N-1}, v_1..v_N].
inline LinearProgram assemble(const PlanRequest& req) {
  const int N = req.cfg.horizon;
  if (N < 1) throw Error(Errc::structural, "mpc-controller", "horizon must be >= 1");
  if (!req.model || !req.schedule) throw Error(Errc::structural, "mpc-controller", "model and schedule required");
  if (int(req.penalty.size()) != N || int(req.disturbances.size()) != N)
    throw Error(Errc::structural, "mpc-controller",
                "penalty and disturbance forecasts must both have " + std::to_string(N) + " entries");
  auto cond = detail::condense(*req.model, req.state, req.disturbances, N);

  LinearProgram lp = LinearProgram::with_vars(2 * N);
  lp.A_ub = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  lp.b_ub.resize(2 * N);
  for (int s = 0; s < N; ++s) {
    const double c = cop(req.hp, req.disturbances[std::size_t(s)].t_ambient);
    lp.c(s) = req.penalty[std::size_t(s)] / c;
    lp.upper(s) = c * req.hp.p_max;
    lp.c(N + s) = req.cfg.slack_penalty;

    const auto h = std::size_t((req.hour_of_day + s + 1) % 24);
    const double t_min = req.schedule->t_min[h], t_max = req.schedule->t_max[h];
    // T_min <= T_i + v   ->  -G q - v <= free - T_min
    lp.A_ub.row(2 * s).head(N) = -cond.gain.row(s);
    lp.A_ub(2 * s, N + s) = -1.0;
    lp.b_ub(2 * s) = cond.free[std::size_t(s)] - t_min;
    // T_max >= T_i - v   ->   G q - v <= T_max - free
    lp.A_ub.row(2 * s + 1).head(N) = cond.gain.row(s);
    lp.A_ub(2 * s + 1, N + s) = -1.0;
    lp.b_ub(2 * s + 1) = t_max - cond.free[std::size_t(s)];
  }
  return lp;
}

inline Plan plan(const PlanRequest& req) {
  LinearProgram lp = assemble(req);
  LpSolution sol = solve(lp);
  Plan p;
  p.status = sol.status;
  if (sol.status != LpStatus::optimal)
    throw Error(Errc::structural, "mpc-controller", std::string("horizon LP is ") + to_string(sol.status));
  const int N = req.cfg.horizon;
  auto cond = detail::condense(*req.model, req.state, req.disturbances, N);
  p.objective = sol.objective;
  for (int s = 0; s < N; ++s) {
    double q = std::max(sol.x(s), 0.0);
    p.heat.push_back(q);
    p.power.push_back(q / cop(req.hp, req.disturbances[std::size_t(s)].t_ambient));
    p.slack.push_back(std::max(sol.x(N + s), 0.0));
  }
  Eigen::VectorXd q = sol.x.head(N);
  Eigen::VectorXd ti = cond.gain * q;
  for (int s = 0; s < N; ++s) p.interior.push_back(cond.free[std::size_t(s)] + ti(s));
  return p;
}

/// Penalty-ignorant baseline: one-step plan with unit penalty, i.e. the least
/// heat that keeps T_i at or above T_min next hour, capped by the heat pump.
inline Plan trivial_controller(const DiscreteModel& model, const BuildingState& x, const Disturbance& d,
                               const ComfortSchedule& schedule, int hour_of_day, const HeatPumpSpec& hp,
                               double slack_penalty) {
  const double one = 1.0;
  PlanRequest req;
  req.model = &model;
  req.state = x;
  req.penalty = std::span<const double>(&one, 1);
  req.disturbances = std::span<const Disturbance>(&d, 1);
  req.schedule = &schedule;
  req.hour_of_day = hour_of_day;
  req.hp = hp;
  req.cfg = {1, slack_penalty, ForecastCase::trivial};
  return plan(req);
}

// ---------------------------------------------------------------------------
// Closed loop

/// Realized hourly inputs on a common time axis.
struct RunData {
  HourlySeries penalty;      // realized λ
  HourlySeries t_ambient;    // °C
  HourlySeries solar_gain;   // kW through the glazing
};

struct StepRecord {
  Timestamp time{};
  BuildingState state;  // at the end of the hour
  double heat = 0.0;    // kW
  double power = 0.0;   // kW
  double slack = 0.0;   // °C, planned slack on the successor state
  double penalty = 0.0; // realized λ
  double t_min = 0.0;   // comfort band of the successor state
  double t_max = 0.0;
};

struct RunResult {
  std::string label;
  std::vector<StepRecord> records;
  int horizon = 1;
  int burn_in = 0;
};

struct ClosedLoopConfig {
  Timestamp start{};
  int steps = 0;
  int burn_in = 48;
  int utc_offset_h = 1;
  double slack_penalty = 1e5;
  /// Shrinks the horizon so it never reaches past start + steps.
  bool shrink_at_end = false;
};

struct ControllerSpec {
  ForecastCase forecast_case = ForecastCase::ideal;
  int horizon = 24;
};

inline Disturbance disturbance_at(const RunData& data, Timestamp t) {
  auto ta = data.t_ambient.at(t);
  auto sg = data.solar_gain.at(t);
  if (!ta) throw Error(Errc::coverage, "mpc-controller", "no ambient temperature at " + format_iso8601(t));
  if (!sg) throw Error(Errc::coverage, "mpc-controller", "no solar gain at " + format_iso8601(t));
  return {*ta, *sg};
}

/// Receding-horizon simulation: plan over the horizon, apply the first heat
/// decision, advance the building with the realized disturbance.
inline RunResult closed_loop(const DiscreteModel& model, const ControllerSpec& ctrl, const PenaltySource& penalties,
                             const RunData& data, const ComfortSchedule& schedule, const HeatPumpSpec& hp,
                             const ClosedLoopConfig& cfg) {
  RunResult res;
  res.label = to_string(ctrl.forecast_case);
  const bool trivial = ctrl.forecast_case == ForecastCase::trivial;
  res.horizon = trivial ? 1 : ctrl.horizon;
  res.burn_in = cfg.burn_in;
  if (cfg.steps <= 0) return res;
  if (res.horizon < 1) throw Error(Errc::structural, "mpc-controller", "horizon must be >= 1");

  BuildingState x = BuildingState::uniform(schedule.t_min[std::size_t(local_hour(cfg.start, cfg.utc_offset_h))]);
  std::vector<Disturbance> d;
  res.records.reserve(std::size_t(cfg.steps));
  for (int k = 0; k < cfg.steps; ++k) {
    const Timestamp t = cfg.start + kHour * k;
    int N = res.horizon;
    if (cfg.shrink_at_end) N = std::min(N, cfg.steps - k);
    d.clear();
    for (int s = 0; s < N; ++s) d.push_back(disturbance_at(data, t + kHour * s));
    auto lambda = penalties.penalty_for_case(ctrl.forecast_case, t, N);

    PlanRequest req;
    req.model = &model;
    req.state = x;
    req.penalty = lambda;
    req.disturbances = d;
    req.schedule = &schedule;
    req.hour_of_day = local_hour(t, cfg.utc_offset_h);
    req.hp = hp;
    req.cfg = {N, cfg.slack_penalty, ctrl.forecast_case};
    Plan p = plan(req);

    auto realized = penalties.realized().at(t);
    if (!realized) throw Error(Errc::coverage, "mpc-controller", "no realized penalty at " + format_iso8601(t));
    x = step(model, x, p.heat[0], d[0]);
    const auto h_next = std::size_t((req.hour_of_day + 1) % 24);
    res.records.push_back({t, x, p.heat[0], p.power[0], p.slack[0], *realized, schedule.t_min[h_next],
                           schedule.t_max[h_next]});
  }
  return res;
}

}  // namespace hpflex
