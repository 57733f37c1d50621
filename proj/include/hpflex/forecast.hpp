#pragma once

// Forecast handling: kernel smoothing of overlapping multi-horizon forecasts
// into one real-time estimate, and the penalty signal seen by each controller
// case.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hpflex/csv.hpp"
#include "hpflex/error.hpp"
#include "hpflex/series.hpp"
#include "hpflex/time.hpp"

namespace hpflex {

struct ForecastPoint {
  Timestamp valid_time{};
  int horizon = 1;  // h
  double value = 0.0;
};

struct SmoothingConfig {
  double a = 1.5;  // horizon decay
  double b = 7.0;  // kernel bandwidth, samples
  int df = 7;      // spline basis size
  bool clamp_nonnegative = false;
};

inline double epanechnikov(double u) {
  u = std::abs(u);
  return u < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

/// Short-horizon favouritism: 1 at h = 1, decaying with lead time.
inline double horizon_weight(double a, double h) {
  if (h < 1.0) throw Error(Errc::domain, "forecast-lab", "horizon must be >= 1");
  return std::exp(-a * (h - 1.0));
}

/// β minimising Σ w_i (y_i - x_iβ)². Solved by Householder QR on the
/// √w-scaled system; zero-weight rows are dropped first.
inline Eigen::VectorXd weighted_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                                              const Eigen::VectorXd& y) {
  if (X.rows() != w.size() || X.rows() != y.size())
    throw Error(Errc::structural, "forecast-lab", "X, w and y must have matching rows");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < 0.0) throw Error(Errc::domain, "forecast-lab", "weights must be nonnegative");
    if (w(i) > 0.0) keep.push_back(i);
  }
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd Xs(Eigen::Index(keep.size()), p);
  Eigen::VectorXd ys(Eigen::Index(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    double s = std::sqrt(w(keep[k]));
    Xs.row(Eigen::Index(k)) = s * X.row(keep[k]);
    ys(Eigen::Index(k)) = s * y(keep[k]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  qr.setThreshold(1e-10);
  if (Xs.rows() < p || qr.rank() < p) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Xs.rows() > 0 ? Xs : Eigen::MatrixXd::Zero(1, p));
    lu.setThreshold(1e-10);
    Eigen::VectorXd null_dir = Eigen::VectorXd::Unit(p, 0);
    if (lu.dimensionOfKernel() > 0) null_dir = lu.kernel().col(0).normalized();
    std::ostringstream msg;
    msg << "weighted design is rank deficient (rank " << qr.rank() << " of " << p << "); null direction [";
    for (Eigen::Index j = 0; j < p; ++j) msg << (j ? ", " : "") << null_dir(j);
    msg << "]";
    throw Error(Errc::singular_design, "forecast-lab", msg.str());
  }
  return qr.solve(ys);
}

/// Clamped B-spline basis with `df` functions on equally spaced knots over
/// [0, 24). Cubic when df >= 4.
inline Eigen::VectorXd bspline_basis(double hour, int df) {
  if (df < 3) throw Error(Errc::domain, "forecast-lab", "df must be >= 3");
  const int p = std::min(3, df - 1);
  const int segments = df - p;
  std::vector<double> knots;
  for (int i = 0; i < p; ++i) knots.push_back(0.0);
  for (int k = 0; k <= segments; ++k) knots.push_back(24.0 * k / segments);
  for (int i = 0; i < p; ++i) knots.push_back(24.0);

  double x = std::clamp(hour, 0.0, 24.0);
  // Degree-0 functions; the right end belongs to the last nonempty span.
  const int nk = int(knots.size());
  std::vector<double> N(nk - 1, 0.0);
  int span = p;
  while (span < nk - p - 2 && x >= knots[span + 1]) ++span;
  N[span] = 1.0;
  for (int d = 1; d <= p; ++d) {
    std::vector<double> next(nk - 1 - d, 0.0);
    for (int i = 0; i < nk - 1 - d; ++i) {
      double v = 0.0;
      double l = knots[i + d] - knots[i];
      if (l > 0.0) v += (x - knots[i]) / l * N[i];
      double r = knots[i + d + 1] - knots[i + 1];
      if (r > 0.0) v += (knots[i + d + 1] - x) / r * N[i + 1];
      next[i] = v;
    }
    N = std::move(next);
  }
  Eigen::VectorXd out(df);
  for (int i = 0; i < df; ++i) out(i) = N[i];
  return out;
}

/// Estimated real-time series from overlapping forecasts. Each output hour is
/// the fitted value of a local weighted regression on hour-of-day splines plus
/// day-of-month and month indicators, weighted by an Epanechnikov kernel in
/// time and by horizon.
inline HourlySeries smooth_series(const std::vector<ForecastPoint>& points, const SmoothingConfig& cfg) {
  if (!(cfg.a > 0.0) || !(cfg.b > 0.0) || cfg.df < 3)
    throw Error(Errc::config, "forecast-lab", "smoothing needs a > 0, b > 0, df >= 3");
  HourlySeries out;
  if (points.empty()) return out;
  auto [lo_it, hi_it] = std::minmax_element(points.begin(), points.end(),
                                            [](const auto& l, const auto& r) { return l.valid_time < r.valid_time; });
  out.start = lo_it->valid_time;
  const long n = long(std::chrono::duration_cast<std::chrono::hours>(hi_it->valid_time - out.start).count()) + 1;
  out.values.assign(std::size_t(n), std::numeric_limits<double>::quiet_NaN());

  std::vector<std::vector<const ForecastPoint*>> by_hour(static_cast<std::size_t>(n));
  for (const auto& pt : points) {
    if (pt.horizon < 1) throw Error(Errc::domain, "forecast-lab", "horizon must be >= 1");
    auto i = std::chrono::duration_cast<std::chrono::hours>(pt.valid_time - out.start).count();
    by_hour[std::size_t(i)].push_back(&pt);
  }

  const long reach = long(std::ceil(cfg.b));
  std::vector<Timestamp> gaps;
  for (long t = 0; t < n; ++t) {
    const Timestamp now = out.time_at(std::size_t(t));
    const unsigned day0 = day_of_month(now), month0 = month_of_year(now);
    struct Row {
      const ForecastPoint* pt;
      double w;
    };
    std::vector<Row> rows;
    std::vector<unsigned> days, months;
    for (long s = std::max(0L, t - reach); s <= std::min(n - 1, t + reach); ++s) {
      double k = epanechnikov(double(std::abs(s - t)) / cfg.b);
      if (k <= 0.0) continue;
      for (const auto* pt : by_hour[std::size_t(s)]) {
        rows.push_back({pt, k * horizon_weight(cfg.a, pt->horizon)});
        unsigned d = day_of_month(pt->valid_time), m = month_of_year(pt->valid_time);
        if (d != day0 && std::find(days.begin(), days.end(), d) == days.end()) days.push_back(d);
        if (m != month0 && std::find(months.begin(), months.end(), m) == months.end()) months.push_back(m);
      }
    }
    if (rows.empty() || by_hour[std::size_t(t)].empty()) {
      gaps.push_back(now);
      continue;
    }
    const Eigen::Index p = cfg.df + Eigen::Index(days.size() + months.size());
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(Eigen::Index(rows.size()), p);
    Eigen::VectorXd w(Eigen::Index(rows.size())), y(Eigen::Index(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto* pt = rows[r].pt;
      X.row(Eigen::Index(r)).head(cfg.df) = bspline_basis(local_hour(pt->valid_time), cfg.df).transpose();
      auto d = std::find(days.begin(), days.end(), day_of_month(pt->valid_time));
      if (d != days.end()) X(Eigen::Index(r), cfg.df + (d - days.begin())) = 1.0;
      auto m = std::find(months.begin(), months.end(), month_of_year(pt->valid_time));
      if (m != months.end()) X(Eigen::Index(r), cfg.df + Eigen::Index(days.size()) + (m - months.begin())) = 1.0;
      w(Eigen::Index(r)) = rows[r].w;
      y(Eigen::Index(r)) = pt->value;
    }
    // Keep a maximal independent subset of columns; the local window rarely
    // supports every spline, day and month column.
    Eigen::MatrixXd Xw = w.cwiseSqrt().asDiagonal() * X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
    qr.setThreshold(1e-10);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < qr.rank(); ++k) cols.push_back(qr.colsPermutation().indices()(k));
    std::sort(cols.begin(), cols.end());
    Eigen::MatrixXd Xsel(X.rows(), Eigen::Index(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) Xsel.col(Eigen::Index(k)) = X.col(cols[k]);
    Eigen::VectorXd beta = weighted_least_squares(Xsel, w, y);

    Eigen::VectorXd x_now = Eigen::VectorXd::Zero(p);
    x_now.head(cfg.df) = bspline_basis(local_hour(now), cfg.df);
    double fit = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) fit += x_now(cols[k]) * beta(Eigen::Index(k));
    if (cfg.clamp_nonnegative) fit = std::max(fit, 0.0);
    out.values[std::size_t(t)] = fit;
  }
  if (!gaps.empty()) {
    std::string list;
    for (std::size_t i = 0; i < gaps.size() && i < 20; ++i) list += (i ? ", " : "") + format_iso8601(gaps[i]);
    if (gaps.size() > 20) list += ", ...";
    throw Error(Errc::gap, "forecast-lab",
                "no forecast data for " + std::to_string(gaps.size()) + " hour(s): " + list);
  }
  return out;
}

/// Series of the values forecast at one fixed horizon.
inline HourlySeries horizon_series(const std::vector<ForecastPoint>& points, int horizon) {
  HourlySeries out;
  std::vector<const ForecastPoint*> sel;
  for (const auto& p : points)
    if (p.horizon == horizon) sel.push_back(&p);
  if (sel.empty()) return out;
  std::sort(sel.begin(), sel.end(), [](auto* l, auto* r) { return l->valid_time < r->valid_time; });
  out.start = sel.front()->valid_time;
  auto n = std::chrono::duration_cast<std::chrono::hours>(sel.back()->valid_time - out.start).count() + 1;
  out.values.assign(std::size_t(n), std::numeric_limits<double>::quiet_NaN());
  for (auto* p : sel) out.values[*out.index_of(p->valid_time)] = p->value;
  return out;
}

/// Naive real-time estimate: at each hour, the value with the shortest horizon.
inline HourlySeries stitched_series(const std::vector<ForecastPoint>& points) {
  HourlySeries out;
  if (points.empty()) return out;
  std::map<Timestamp, const ForecastPoint*> best;
  for (const auto& p : points) {
    auto [it, fresh] = best.emplace(p.valid_time, &p);
    if (!fresh && p.horizon < it->second->horizon) it->second = &p;
  }
  out.start = best.begin()->first;
  auto n = std::chrono::duration_cast<std::chrono::hours>(best.rbegin()->first - out.start).count() + 1;
  out.values.assign(std::size_t(n), std::numeric_limits<double>::quiet_NaN());
  for (const auto& [t, p] : best) out.values[*out.index_of(t)] = p->value;
  return out;
}

/// Largest absolute change between consecutive present hours.
inline double max_jump(const HourlySeries& s) {
  double m = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!std::isnan(s.values[i]) && !std::isnan(s.values[i - 1]))
      m = std::max(m, std::abs(s.values[i] - s.values[i - 1]));
  return m;
}

/// Reads `valid_time,horizon_h,value`.
inline std::vector<ForecastPoint> load_forecasts(const csv::Table& t, const std::string& source) {
  auto ct = t.column("valid_time"), ch = t.column("horizon_h"), cv = t.column("value");
  if (!ct || !ch || !cv) throw Error(Errc::parse, "forecast-lab", source + ": need valid_time,horizon_h,value");
  std::vector<ForecastPoint> out;
  out.reserve(t.rows.size());
  std::map<std::pair<Timestamp, int>, std::size_t> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto where = source + ":" + std::to_string(t.line_numbers[r]);
    auto ts = parse_iso8601(t.rows[r][*ct]);
    if (!ts) throw Error(Errc::parse, "forecast-lab", where + ": bad timestamp '" + t.rows[r][*ct] + "'");
    double h = csv::to_double(t.rows[r][*ch], where);
    if (h < 1.0 || h > 1000.0 || h != std::floor(h))
      throw Error(Errc::parse, "forecast-lab", where + ": horizon must be a positive integer");
    ForecastPoint p{*ts, int(h), csv::to_double(t.rows[r][*cv], where)};
    if (!seen.emplace(std::pair{p.valid_time, p.horizon}, t.line_numbers[r]).second)
      throw Error(Errc::parse, "forecast-lab", where + ": duplicate (valid_time, horizon)");
    out.push_back(p);
  }
  return out;
}

inline void write_forecasts(std::ostream& out, const std::vector<ForecastPoint>& points) {
  out << "valid_time,horizon_h,value\n";
  for (const auto& p : points)
    out << format_iso8601(p.valid_time) << ',' << p.horizon << ',' << csv::format(p.value) << '\n';
}

// ---------------------------------------------------------------------------
// Penalty signal per controller case

enum class ForecastCase { ideal, real, trivial };

inline const char* to_string(ForecastCase c) {
  switch (c) {
    case ForecastCase::ideal: return "Ideal";
    case ForecastCase::real: return "Real";
    case ForecastCase::trivial: return "Trivial";
  }
  return "?";
}

/// Realized penalty series plus, optionally, issued forecasts of it.
class PenaltySource {
 public:
  PenaltySource() = default;
  explicit PenaltySource(HourlySeries realized, std::vector<ForecastPoint> forecasts = {})
      : realized_(std::move(realized)) {
    for (const auto& p : forecasts) by_valid_[p.valid_time].emplace_back(p.horizon, p.value);
    for (auto& [t, v] : by_valid_) std::sort(v.begin(), v.end());
  }

  const HourlySeries& realized() const { return realized_; }
  bool has_forecasts() const { return !by_valid_.empty(); }

  /// Penalties for the N hours starting at `t` as known at time `t`.
  std::vector<double> penalty_for_case(ForecastCase c, Timestamp t, int N) const {
    std::vector<double> out(std::size_t(std::max(N, 0)), 1.0);
    if (c == ForecastCase::trivial) return out;
    for (int k = 0; k < N; ++k) {
      const Timestamp target = t + kHour * k;
      if (c == ForecastCase::ideal) {
        auto v = realized_.at(target);
        if (!v) throw Error(Errc::coverage, "forecast-lab", "no realized penalty at " + format_iso8601(target));
        out[std::size_t(k)] = *v;
      } else {
        // Shortest lead time among forecasts issued at or before t.
        auto it = by_valid_.find(target);
        bool found = false;
        if (it != by_valid_.end())
          for (const auto& [h, v] : it->second)
            if (h >= k) {
              out[std::size_t(k)] = v;
              found = true;
              break;
            }
        if (!found)
          throw Error(Errc::coverage, "forecast-lab",
                      "no forecast issued by " + format_iso8601(t) + " for " + format_iso8601(target));
      }
    }
    return out;
  }

 private:
  HourlySeries realized_;
  std::map<Timestamp, std::vector<std::pair<int, double>>> by_valid_;
};

}  // namespace hpflex
