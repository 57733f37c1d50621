#pragma once

// Dense two-phase primal simplex for
//
//   minimize cᵀx  subject to  A_ub x <= b_ub,  lo <= x <= hi,
//
// with finite lower bounds and possibly infinite upper bounds. Pivoting uses
// Bland's smallest-index rule throughout, so the solver cannot cycle and its
// output depends only on the input.

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hpflex/csv.hpp"
#include "hpflex/error.hpp"

namespace hpflex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_ub;
  Eigen::VectorXd b_ub;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;  // +inf allowed

  Eigen::Index num_vars() const { return c.size(); }
  Eigen::Index num_rows() const { return A_ub.rows(); }

  /// Empty program over `n` variables bounded below by zero.
  static LinearProgram with_vars(Eigen::Index n) {
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(n);
    lp.A_ub.resize(0, n);
    lp.b_ub.resize(0);
    lp.lower = Eigen::VectorXd::Zero(n);
    lp.upper = Eigen::VectorXd::Constant(n, kInf);
    return lp;
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Nonnegative multipliers of the A_ub rows and of the finite upper bounds
  /// (zero where the bound is infinite). With these, c + A_ubᵀ·row_duals +
  /// upper_duals >= 0 componentwise and the duality gap closes.
  Eigen::VectorXd row_duals;
  Eigen::VectorXd upper_duals;
  int iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  int max_iterations = 1'000'000;
};

namespace detail {

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), width_(cols + 1), t_(std::size_t(rows) * width_, 0.0) {}

  double& at(int r, int c) { return t_[std::size_t(r) * width_ + c]; }
  double at(int r, int c) const { return t_[std::size_t(r) * width_ + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double rhs(int r) const { return at(r, cols_); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  /// Pivots on (r, e), updating every row and the given objective rows.
  void pivot(int r, int e, std::vector<std::vector<double>*> objectives) {
    double* pr = &t_[std::size_t(r) * width_];
    const double inv = 1.0 / pr[e];
    for (int j = 0; j < width_; ++j) pr[j] *= inv;
    pr[e] = 1.0;
    nz_.clear();
    for (int j = 0; j < width_; ++j)
      if (pr[j] != 0.0) nz_.push_back(j);
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double* pi = &t_[std::size_t(i) * width_];
      const double f = pi[e];
      if (f == 0.0) continue;
      for (int j : nz_) pi[j] -= f * pr[j];
      pi[e] = 0.0;
    }
    for (auto* obj : objectives) {
      auto& o = *obj;
      const double f = o[e];
      if (f == 0.0) continue;
      for (int j : nz_) o[j] -= f * pr[j];
      o[e] = 0.0;
    }
  }

 private:
  int rows_, cols_, width_;
  std::vector<double> t_;
  std::vector<int> nz_;
};

}  // namespace detail

inline void validate(const LinearProgram& lp) {
  const auto n = lp.num_vars();
  auto fail = [](const std::string& what) { throw Error(Errc::structural, "lp-solver", what); };
  if (lp.A_ub.cols() != n && lp.A_ub.rows() > 0) fail("A_ub column count differs from the cost vector");
  if (lp.b_ub.size() != lp.A_ub.rows()) fail("b_ub length differs from A_ub rows");
  if (lp.lower.size() != n || lp.upper.size() != n) fail("bound vectors must match the variable count");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower(j))) fail("lower bounds must be finite");
    if (lp.lower(j) > lp.upper(j)) fail("lower bound exceeds upper bound for variable " + std::to_string(j));
  }
}

inline LpSolution solve(const LinearProgram& lp, const SimplexOptions& opt = {}) {
  validate(lp);
  const int n = int(lp.num_vars());
  const int m_ub = int(lp.num_rows());

  std::vector<int> bounded;  // variables with a finite upper bound
  for (int j = 0; j < n; ++j)
    if (std::isfinite(lp.upper(j))) bounded.push_back(j);
  const int m = m_ub + int(bounded.size());

  // Shifted variables y = x - lo >= 0; row i reads a_i·y + s_i = rhs_i.
  std::vector<double> rhs(m);
  std::vector<int> sign(m, 1);
  for (int i = 0; i < m_ub; ++i) rhs[i] = lp.b_ub(i) - lp.A_ub.row(i).dot(lp.lower);
  for (std::size_t k = 0; k < bounded.size(); ++k)
    rhs[m_ub + k] = lp.upper(bounded[k]) - lp.lower(bounded[k]);
  int num_art = 0;
  for (int i = 0; i < m; ++i)
    if (rhs[i] < 0.0) {
      sign[i] = -1;
      ++num_art;
    }

  const int slack0 = n, art0 = n + m, cols = n + m + num_art;
  detail::Tableau T(m, cols);
  std::vector<int> basis(m);
  std::vector<double> phase1(cols + 1, 0.0), cost(cols + 1, 0.0);
  {
    int a = art0;
    for (int i = 0; i < m; ++i) {
      const double s = sign[i];
      if (i < m_ub) {
        for (int j = 0; j < n; ++j) T.at(i, j) = s * lp.A_ub(i, j);
      } else {
        T.at(i, bounded[i - m_ub]) = s;
      }
      T.at(i, slack0 + i) = s;
      T.rhs(i) = s * rhs[i];
      if (sign[i] < 0) {
        T.at(i, a) = 1.0;
        basis[i] = a++;
        for (int j = 0; j <= cols; ++j)
          if (j < art0 || j == cols) phase1[j] -= T.at(i, j);
      } else {
        basis[i] = slack0 + i;
      }
    }
  }
  double cmax = 1.0;
  for (int j = 0; j < n; ++j) {
    cost[j] = lp.c(j);
    cmax = std::max(cmax, std::abs(lp.c(j)));
  }
  // Bring the constant term lo·c into the objective row: obj rhs holds -z.
  cost[cols] = -lp.c.dot(lp.lower);

  LpSolution sol;
  const double opt_tol = opt.optimality_tol * cmax;

  auto ratio_row = [&](int e) {
    int best = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = T.at(i, e);
      if (a <= opt.pivot_tol) continue;
      const double r = std::max(T.rhs(i), 0.0) / a;
      const double eps = 1e-12 * (1.0 + best_ratio);
      if (best < 0 || r < best_ratio - eps) {
        best = i;
        best_ratio = r;
      } else if (r <= best_ratio + eps && basis[i] < basis[best]) {
        best = i;
        best_ratio = std::min(r, best_ratio);
      }
    }
    return best;
  };

  // Returns false when unbounded.
  auto run = [&](std::vector<double>& obj, int allowed_cols, double tol,
                 std::vector<std::vector<double>*> others) -> bool {
    while (true) {
      int e = -1;
      for (int j = 0; j < allowed_cols; ++j)
        if (obj[j] < -tol) {
          e = j;
          break;
        }
      if (e < 0) return true;
      int r = ratio_row(e);
      if (r < 0) return false;
      std::vector<std::vector<double>*> rows{&obj};
      rows.insert(rows.end(), others.begin(), others.end());
      T.pivot(r, e, rows);
      basis[r] = e;
      if (++sol.iterations > opt.max_iterations)
        throw Error(Errc::structural, "lp-solver", "iteration limit reached");
    }
  };

  if (num_art > 0) {
    run(phase1, art0, 1e-12, {&cost});
    double infeas = -phase1[cols];
    double scale = 1.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(rhs[i]));
    if (infeas > opt.feasibility_tol * scale) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    // Drive zero-valued artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (basis[i] < art0) continue;
      for (int j = 0; j < art0; ++j)
        if (std::abs(T.at(i, j)) > 1e-9) {
          T.pivot(i, j, {&cost, &phase1});
          basis[i] = j;
          break;
        }
    }
  }

  if (!run(cost, art0, opt_tol, {})) {
    sol.status = LpStatus::unbounded;
    return sol;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) y(basis[i]) = T.rhs(i);
  sol.status = LpStatus::optimal;
  sol.x = lp.lower + y;
  sol.objective = lp.c.dot(sol.x);
  sol.row_duals.resize(m_ub);
  for (int i = 0; i < m_ub; ++i) sol.row_duals(i) = cost[slack0 + i];
  sol.upper_duals = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < bounded.size(); ++k) sol.upper_duals(bounded[k]) = cost[slack0 + m_ub + int(k)];
  return sol;
}

// ---------------------------------------------------------------------------
// Line-oriented text dump for cross-checking with external solvers:
//
//   lp <vars> <rows>
//   min c_0 ... c_{n-1}
//   row a_0 ... a_{n-1} <= b            (one per A_ub row)
//   bound <lo> <hi>                      (one per variable; hi may be "inf")

inline void write_lp_dump(std::ostream& out, const LinearProgram& lp) {
  validate(lp);
  out << "lp " << lp.num_vars() << ' ' << lp.num_rows() << '\n';
  out << "min";
  for (Eigen::Index j = 0; j < lp.num_vars(); ++j) out << ' ' << csv::format(lp.c(j));
  out << '\n';
  for (Eigen::Index i = 0; i < lp.num_rows(); ++i) {
    out << "row";
    for (Eigen::Index j = 0; j < lp.num_vars(); ++j) out << ' ' << csv::format(lp.A_ub(i, j));
    out << " <= " << csv::format(lp.b_ub(i)) << '\n';
  }
  for (Eigen::Index j = 0; j < lp.num_vars(); ++j)
    out << "bound " << csv::format(lp.lower(j)) << ' '
        << (std::isfinite(lp.upper(j)) ? csv::format(lp.upper(j)) : std::string("inf")) << '\n';
}

inline LinearProgram read_lp_dump(std::istream& in) {
  auto fail = [](const std::string& what) { throw Error(Errc::parse, "lp-solver", "lp dump: " + what); };
  auto number = [&](const std::string& tok) {
    if (tok == "inf") return kInf;
    return csv::to_double(tok, "lp dump");
  };
  std::string word;
  Eigen::Index n = 0, m = 0;
  if (!(in >> word >> n >> m) || word != "lp" || n < 0 || m < 0) fail("bad header");
  LinearProgram lp = LinearProgram::with_vars(n);
  lp.A_ub.resize(m, n);
  lp.b_ub.resize(m);
  std::string tok;
  if (!(in >> word) || word != "min") fail("expected 'min'");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(in >> tok)) fail("truncated objective");
    lp.c(j) = number(tok);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(in >> word) || word != "row") fail("expected 'row'");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(in >> tok)) fail("truncated row");
      lp.A_ub(i, j) = number(tok);
    }
    if (!(in >> word) || word != "<=") fail("expected '<='");
    if (!(in >> tok)) fail("truncated row");
    lp.b_ub(i) = number(tok);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    std::string lo, hi;
    if (!(in >> word >> lo >> hi) || word != "bound") fail("expected 'bound'");
    lp.lower(j) = number(lo);
    lp.upper(j) = number(hi);
  }
  return lp;
}

}  // namespace hpflex
