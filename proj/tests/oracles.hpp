#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hpflex/lp.hpp"
#include "hpflex/mpc.hpp"
#include "hpflex/thermal.hpp"

namespace hpflex::oracle {

/// LP optimum by enumerating every basis of n active constraints drawn from
/// the rows and the finite bounds. Only for tiny bounded problems.
inline std::optional<double> vertex_enumeration(const LinearProgram& lp) {
  const int n = int(lp.num_vars()), m = int(lp.num_rows());
  std::vector<Eigen::RowVectorXd> G;
  std::vector<double> h;
  for (int i = 0; i < m; ++i) {
    G.push_back(lp.A_ub.row(i));
    h.push_back(lp.b_ub(i));
  }
  for (int j = 0; j < n; ++j) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
    e(j) = -1;
    G.push_back(e);
    h.push_back(-lp.lower(j));
    if (std::isfinite(lp.upper(j))) {
      e(j) = 1;
      G.push_back(e);
      h.push_back(lp.upper(j));
    }
  }
  const int k = int(G.size());
  std::optional<double> best;
  std::vector<int> pick(static_cast<std::size_t>(n));
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd r(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      for (int i = 0; i < n; ++i) {
        M.row(i) = G[std::size_t(pick[std::size_t(i)])];
        r(i) = h[std::size_t(pick[std::size_t(i)])];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
      if (lu.rank() < n) return;
      Eigen::VectorXd x = lu.solve(r);
      for (int i = 0; i < k; ++i)
        if (G[std::size_t(i)].dot(x) > h[std::size_t(i)] + 1e-7 * (1.0 + std::abs(h[std::size_t(i)]))) return;
      double obj = lp.c.dot(x);
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int i = start; i <= k - (n - depth); ++i) {
      pick[std::size_t(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

/// Forward Euler with `substeps` fixed steps over dt, inputs held constant.
inline Vector3 euler(const ContinuousModel& m, Vector3 x, double q, const Disturbance& d, double dt, int substeps) {
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) x += h * (m.A * x + m.B * q + m.E * d.vec());
  return x;
}

struct GridResult {
  double cost = std::numeric_limits<double>::infinity();
  double cell_bound = 0.0;  // largest cost change from moving one cell in every coordinate
};

/// Horizon cost on a regular heat grid with `levels` intervals per step,
/// simulating the discrete model directly. Two steps only.
inline GridResult grid_search_two_steps(const PlanRequest& req, int levels) {
  const auto& m = *req.model;
  const double p_v = req.cfg.slack_penalty;
  double c[2], qmax[2], lo[2], hi[2];
  for (int s = 0; s < 2; ++s) {
    c[s] = cop(req.hp, req.disturbances[std::size_t(s)].t_ambient);
    qmax[s] = c[s] * req.hp.p_max;
    const auto hr = std::size_t((req.hour_of_day + s + 1) % 24);
    lo[s] = req.schedule->t_min[hr];
    hi[s] = req.schedule->t_max[hr];
  }
  auto violation = [](double t, double l, double u) { return std::max({0.0, l - t, t - u}); };
  GridResult g;
  for (int i = 0; i <= levels; ++i)
    for (int j = 0; j <= levels; ++j) {
      const double q0 = qmax[0] * i / levels, q1 = qmax[1] * j / levels;
      auto x1 = step(m, req.state, q0, req.disturbances[0]);
      auto x2 = step(m, x1, q1, req.disturbances[1]);
      double cost = req.penalty[0] / c[0] * q0 + req.penalty[1] / c[1] * q1 +
                    p_v * violation(x1.t_i, lo[0], hi[0]) + p_v * violation(x2.t_i, lo[1], hi[1]);
      g.cost = std::min(g.cost, cost);
    }
  // T_i responds to heat through B(0) (first step) and (A B)(0), B(0) (second).
  const double g00 = std::abs(m.B(0)), g10 = std::abs((m.A * m.B)(0)), g11 = std::abs(m.B(0));
  const double d0 = qmax[0] / levels, d1 = qmax[1] / levels;
  g.cell_bound = req.penalty[0] / c[0] * d0 + req.penalty[1] / c[1] * d1 +
                 p_v * (g00 * d0 + g10 * d0 + g11 * d1);
  return g;
}

}  // namespace hpflex::oracle
