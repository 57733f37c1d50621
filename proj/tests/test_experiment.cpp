#include <gtest/gtest.h>

#include <sstream>

#include "hpflex/experiment.hpp"
#include "support.hpp"

using namespace hpflex;

namespace {

Timestamp t0() { return *parse_iso8601("2021-01-04T00:00:00Z"); }

RunResult synthetic_run(int n, int burn_in) {
  RunResult r;
  r.burn_in = burn_in;
  for (int i = 0; i < n; ++i) {
    StepRecord s;
    s.time = t0() + kHour * i;
    s.power = 0.5 + 0.1 * (i % 3);
    s.penalty = 100.0 + i;
    s.state.t_i = 20.0;
    s.t_min = 20.0;
    s.t_max = 24.0;
    r.records.push_back(s);
  }
  return r;
}

Scenario constant_scenario() {
  auto sc = load_scenario(test::data_path("scenarios/constant_lambda.scenario"));
  return sc;
}

}  // namespace

TEST(Metrics, EmissionsOverTheWindow) {
  auto r = synthetic_run(10, 2);
  double want = 0.0;
  for (int i = 2; i < 7; ++i) want += r.records[std::size_t(i)].power / 1000.0 * r.records[std::size_t(i)].penalty;
  EXPECT_NEAR(total_emissions(r, 3), want, 1e-15);
  double energy = 0.0;
  for (int i = 2; i < 7; ++i) energy += r.records[std::size_t(i)].power;
  EXPECT_NEAR(total_energy(r, 3), energy, 1e-15);
}

TEST(Metrics, WindowMustExceedHorizon) {
  auto r = synthetic_run(5, 0);
  try {
    total_emissions(r, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::window);
  }
  auto [b, e] = metric_window(synthetic_run(5, 10), 2);
  EXPECT_EQ(b, e);
}

TEST(Metrics, SlackHoursCountDeficitsOnly) {
  auto r = synthetic_run(10, 0);
  r.records[1].state.t_i = 19.5;
  r.records[2].state.t_i = 25.0;
  r.records[3].state.t_i = 20.0 - 1e-9;
  r.records[9].state.t_i = 10.0;  // outside the window
  EXPECT_EQ(slack_hours(r, 1), 1);
}

TEST(Metrics, Savings) {
  EXPECT_DOUBLE_EQ(savings(10.0, 8.0), 0.2);
  EXPECT_DOUBLE_EQ(savings(10.0, 12.0), -0.2);
  try {
    savings(0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::undefined_baseline);
  }
}

TEST(Profile, MeansPerLocalHour) {
  auto r = synthetic_run(72, 24);
  auto p = hourly_load_profile({r}, 1);
  // local hour h at UTC h-1; records 24..71 cover each hour twice
  for (int h = 0; h < 24; ++h) {
    int i1 = 24 + (h + 23) % 24, i2 = i1 + 24;
    double power = (r.records[std::size_t(i1)].power + r.records[std::size_t(i2)].power) / 2;
    EXPECT_NEAR(p.power[std::size_t(h)], power, 1e-12) << h;
    EXPECT_NEAR(p.penalty[std::size_t(h)], 100.0 + (i1 + i2) / 2.0, 1e-12) << h;
  }
  EXPECT_THROW(hourly_load_profile({synthetic_run(30, 12)}, 0), Error);
}

TEST(Sweep, EmptyListsGiveNoRows) {
  auto sc = constant_scenario();
  auto d = load_scenario_data(sc);
  EXPECT_TRUE(sweep_horizon(sc, d, {}).empty());
  EXPECT_TRUE(sweep_heatpump(sc, d, {}).empty());
  EXPECT_TRUE(sweep_codes(sc, d, {}, {100.0}).empty());
}

TEST(Sweep, HorizonOutOfRangeIsConfigError) {
  auto sc = constant_scenario();
  auto d = load_scenario_data(sc);
  try {
    sweep_horizon(sc, d, {0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
  }
}

TEST(Sweep, ResultsDoNotDependOnWorkerCount) {
  auto sc = constant_scenario();
  sc.hours = 96;
  auto d = load_scenario_data(sc);
  auto a = sweep_horizon(sc, d, {1, 6}, 1);
  auto b = sweep_horizon(sc, d, {1, 6}, 3);
  std::ostringstream sa, sb;
  write_sweep_csv(sa, a);
  write_sweep_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.size(), 2u * 2u * 2u);  // systems x horizons x cases
}

TEST(Sweep, ConstantPenaltyLeavesNothingToShift) {
  auto sc = constant_scenario();
  auto d = load_scenario_data(sc);
  for (const auto& r : sweep_horizon(sc, d, {24})) {
    ASSERT_TRUE(r.error.empty()) << r.error;
    EXPECT_NEAR(r.savings, 0.0, 0.005) << r.system << " " << r.forecast_case;
  }
}

TEST(Sweep, UnreachableCodeBecomesFailedRow) {
  auto sc = constant_scenario();
  sc.hours = 72;
  sc.systems = {HeatingSystem::floor};
  auto d = load_scenario_data(sc);
  auto codes = d.codes.codes();
  BuildingCode weak{"weak", 50.0, 0.2, 2.0, 2.0, std::nullopt, 0.7};
  codes.push_back(weak);
  d.codes = CodeTable(codes);
  auto rows = sweep_codes(sc, d, {"2018", "weak"}, {100.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].forecast_case, "failed");
  EXPECT_EQ(rows[2].sweep_param, "code=weak|concrete_mm=100");
  EXPECT_FALSE(rows[2].error.empty());
  std::ostringstream out;
  write_sweep_csv(out, rows);
  EXPECT_NE(out.str().find("code=weak|concrete_mm=100,failed,floor,family,,,,"), std::string::npos);
}

TEST(Sweep, UnknownCodeYearIsConfigError) {
  auto sc = constant_scenario();
  auto d = load_scenario_data(sc);
  EXPECT_THROW(sweep_codes(sc, d, {"1990"}, {100.0}), Error);
}

TEST(Sweep, CsvHeader) {
  std::ostringstream out;
  write_sweep_csv(out, {});
  EXPECT_EQ(out.str(), "sweep_param,case,system,building,savings,emissions_kg,energy_kwh,slack_hours\n");
}

TEST(Period, RequestedHoursBeyondDataIsCoverageError) {
  auto sc = constant_scenario();
  sc.hours = 10000;
  auto d = load_scenario_data(sc);
  try {
    scenario_period(sc, d, 24);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::coverage);
  }
}

TEST(Building, SlackPenaltyDefaultScalesWithPenaltyAndRating) {
  auto sc = constant_scenario();
  auto d = load_scenario_data(sc);
  EXPECT_DOUBLE_EQ(default_slack_penalty(sc, d, 2.0), 1e3 * 300.0 * 2.0);
  sc.slack_penalty = 5.0;
  EXPECT_EQ(default_slack_penalty(sc, d, 2.0), 5.0);
}

TEST(Building, ScheduleByBuildingType) {
  Scenario sc;
  EXPECT_EQ(schedule_for(sc, "office").t_min[18], 18.0);
  EXPECT_EQ(schedule_for(sc, "family").t_min[18], 20.0);
  sc.night_start_h = 1;
  sc.night_end_h = 2;
  EXPECT_EQ(schedule_for(sc, "family").t_min[1], 18.0);
  EXPECT_EQ(schedule_for(sc, "family").t_min[23], 20.0);
}

TEST(HeatPumpSweep, UndersizedPumpNeedsSlackOnColdFixture) {
  auto sc = load_scenario(test::data_path("scenarios/cold_snap.scenario"));
  auto d = load_scenario_data(sc);
  auto rows = sweep_heatpump(sc, d, {0.5, 1.01});
  ASSERT_EQ(rows.size(), 4u);
  const auto& small = rows[0];
  const auto& design = rows[2];
  ASSERT_EQ(small.forecast_case, "Ideal");
  ASSERT_EQ(design.forecast_case, "Ideal");
  EXPECT_GT(small.slack_hours, design.slack_hours);
  // Comfort holds for the MPC run at the design size.
  EXPECT_LT(design.slack_hours, 0.02 * 312);
}

TEST(HeatPumpSweep, LargePumpsPlateau) {
  auto sc = load_scenario(test::data_path("scenarios/cold_snap.scenario"));
  auto d = load_scenario_data(sc);
  auto rows = sweep_heatpump(sc, d, {16, 32, 64});
  std::vector<double> s;
  for (const auto& r : rows)
    if (r.forecast_case == "Ideal") s.push_back(r.savings);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_LT(std::abs(s[1] - s[0]), 0.002);
  EXPECT_LT(std::abs(s[2] - s[1]), 0.002);
}

TEST(HeatPumpSweep, SingleSizeMatchesPlainRun) {
  auto sc = load_scenario(test::data_path("scenarios/cold_snap.scenario"));
  auto d = load_scenario_data(sc);
  auto rows = sweep_heatpump(sc, d, {2.0});
  auto setup = scenario_building(sc, d, "family", sc.code_year, sc.concrete_mm);
  Cell cell{"plain", setup, HeatingSystem::floor, {2.0, sc.t_hot_c, sc.eta}, sc.horizon_steps};
  auto res = run_cell(cell, sc, d, scenario_period(sc, d, sc.horizon_steps));
  auto plain = rows_for(cell, res);
  ASSERT_EQ(rows.size(), plain.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].emissions_kg, plain[i].emissions_kg);
    EXPECT_EQ(rows[i].savings, plain[i].savings);
  }
}
