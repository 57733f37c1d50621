#pragma once

// Three-node RC model of a single-zone building: interior air (T_i), floor
// (T_f) and inner envelope (T_e), with ambient temperature and transmitted
// solar gain as disturbances and delivered heat (kW) as the input.

#include <cmath>

#include <Eigen/Dense>

#include "hpflex/envelope.hpp"
#include "hpflex/error.hpp"

namespace hpflex {

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;
using Matrix32 = Eigen::Matrix<double, 3, 2>;

enum class HeatingSystem { radiator, floor };

inline const char* to_string(HeatingSystem s) { return s == HeatingSystem::radiator ? "radiator" : "floor"; }

/// Fraction of the delivered heat that goes to the interior node.
inline double interior_share(HeatingSystem s) { return s == HeatingSystem::radiator ? 1.0 : 0.0; }

/// Units: temperatures °C, time h, heat kW.
struct ContinuousModel {
  Matrix3 A = Matrix3::Zero();
  Vector3 B = Vector3::Zero();
  Matrix32 E = Matrix32::Zero();
  Eigen::RowVector3d C_out{1.0, 0.0, 0.0};
};

struct DiscreteModel {
  Matrix3 A = Matrix3::Identity();
  Vector3 B = Vector3::Zero();
  Matrix32 E = Matrix32::Zero();
  double dt = 1.0;  // h
};

/// State order is fixed: interior, floor, envelope.
struct BuildingState {
  double t_i = 0.0;
  double t_f = 0.0;
  double t_e = 0.0;

  Vector3 vec() const { return {t_i, t_f, t_e}; }
  static BuildingState from(const Vector3& v) { return {v(0), v(1), v(2)}; }
  static BuildingState uniform(double t) { return {t, t, t}; }
};

struct Disturbance {
  double t_ambient = 0.0;   // °C
  double solar_gain = 0.0;  // kW transmitted through the glazing

  Eigen::Vector2d vec() const { return {t_ambient, solar_gain}; }
};

/// Solar gain through the windows for a global irradiance in W/m².
inline double solar_gain_kw(double g, double window_area, double irradiance_w_m2) {
  return g * window_area * irradiance_w_m2 / 1000.0;
}

inline ContinuousModel build_continuous(const EnvelopeParams& p, HeatingSystem system, double psi_s) {
  if (!(p.r_ea > 0 && p.r_ie > 0 && p.r_fi > 0 && p.c_e > 0 && p.c_f > 0 && p.c_i > 0))
    throw Error(Errc::domain, "thermal-core", "RC parameters must be positive");
  if (psi_s < 0.0 || psi_s > 1.0) throw Error(Errc::domain, "thermal-core", "psi_s must lie in [0,1]");
  const double psi_h = interior_share(system);
  ContinuousModel m;
  // interior
  m.A(0, 0) = -(1.0 / p.r_fi + 1.0 / p.r_ie) / p.c_i;
  m.A(0, 1) = 1.0 / (p.r_fi * p.c_i);
  m.A(0, 2) = 1.0 / (p.r_ie * p.c_i);
  // floor
  m.A(1, 0) = 1.0 / (p.r_fi * p.c_f);
  m.A(1, 1) = -1.0 / (p.r_fi * p.c_f);
  // envelope
  m.A(2, 0) = 1.0 / (p.r_ie * p.c_e);
  m.A(2, 2) = -(1.0 / p.r_ie + 1.0 / p.r_ea) / p.c_e;

  m.B << psi_h / p.c_i, (1.0 - psi_h) / p.c_f, 0.0;

  m.E(2, 0) = 1.0 / (p.r_ea * p.c_e);
  m.E(0, 1) = psi_s / p.c_i;
  m.E(1, 1) = (1.0 - psi_s) / p.c_f;
  return m;
}

/// exp(M) by scaling and squaring around a Taylor series.
template <typename Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime> matrix_exponential(
    const Eigen::MatrixBase<Derived>& M) {
  using Mat = Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>;
  const Eigen::Index n = M.rows();
  double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = int(std::ceil(std::log2(norm / 0.5)));
  Mat scaled = M / std::ldexp(1.0, squarings);

  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k < 40; ++k) {
    term = term * scaled / double(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Zero-order-hold discretization via the exponential of the augmented matrix
/// [[A, B, E], [0, 0, 0]]·dt.
inline DiscreteModel discretize(const ContinuousModel& m, double dt) {
  if (!(dt > 0.0)) throw Error(Errc::domain, "thermal-core", "dt must be positive");
  Eigen::Matrix<double, 6, 6> aug = Eigen::Matrix<double, 6, 6>::Zero();
  aug.block<3, 3>(0, 0) = m.A;
  aug.block<3, 1>(0, 3) = m.B;
  aug.block<3, 2>(0, 4) = m.E;
  Eigen::Matrix<double, 6, 6> phi = matrix_exponential(aug * dt);
  DiscreteModel d;
  d.A = phi.block<3, 3>(0, 0);
  d.B = phi.block<3, 1>(0, 3);
  d.E = phi.block<3, 2>(0, 4);
  d.dt = dt;
  return d;
}

inline BuildingState step(const DiscreteModel& m, const BuildingState& x, double heat, const Disturbance& d) {
  return BuildingState::from(m.A * x.vec() + m.B * heat + m.E * d.vec());
}

/// Equilibrium for constant inputs.
inline BuildingState steady_state(const ContinuousModel& m, double heat, const Disturbance& d) {
  Eigen::FullPivLU<Matrix3> lu(m.A);
  if (!lu.isInvertible()) throw Error(Errc::singular, "thermal-core", "system matrix is singular");
  Vector3 rhs = -(m.B * heat + m.E * d.vec());
  return BuildingState::from(lu.solve(rhs));
}

}  // namespace hpflex
