#pragma once

#include <string>

#include "hpflex/csv.hpp"
#include "hpflex/envelope.hpp"
#include "hpflex/error.hpp"

namespace hpflex {

inline constexpr double kKelvinOffset = 273.15;
/// Design outdoor temperature for sizing and the matching indoor set point.
inline constexpr double kDesignOutdoorC = -12.0;
inline constexpr double kDesignIndoorC = 20.0;

struct HeatPumpSpec {
  double p_max = 1.0;   // kW electrical
  double t_hot = 40.0;  // supply temperature, °C
  double eta = 0.5;     // fraction of the Carnot COP achieved
};

inline double cop_carnot(double t_hot_c, double t_cold_c) {
  if (!(t_cold_c < t_hot_c))
    throw Error(Errc::domain, "heat-pump",
                "COP undefined for T_cold = " + csv::format(t_cold_c) + " >= T_hot = " + csv::format(t_hot_c));
  double hot = t_hot_c + kKelvinOffset;
  double cold = t_cold_c + kKelvinOffset;
  return hot / (hot - cold);
}

inline double cop(double t_hot_c, double t_cold_c, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw Error(Errc::domain, "heat-pump", "eta must lie in (0,1]");
  return eta * cop_carnot(t_hot_c, t_cold_c);
}

inline double cop(const HeatPumpSpec& hp, double t_ambient_c) { return cop(hp.t_hot, t_ambient_c, hp.eta); }

/// Maximum deliverable heat at the given ambient temperature, kW.
inline double max_heat(const HeatPumpSpec& hp, double t_ambient_c) { return cop(hp, t_ambient_c) * hp.p_max; }

struct Sizing {
  double q_loss = 0.0;  // kW heat
  double p_max = 0.0;   // kW electrical
};

/// Design-day transmission loss through walls, roof, windows and doors (the
/// floor has no ground loss) and the electrical rating that covers it.
inline Sizing size_from_heat_loss(const BuildingGeometry& geo, const ResolvedCode& code,
                                  double dT = kDesignIndoorC - kDesignOutdoorC, double t_hot = 40.0,
                                  double eta = 0.5) {
  double ua = code.u_wall * geo.wall_area + code.u_roof * geo.roof_area + code.window.u * geo.window_area +
              code.u_door * geo.door_area;
  Sizing s;
  s.q_loss = ua * dT / 1000.0;
  s.p_max = s.q_loss / cop(t_hot, kDesignOutdoorC, eta);
  return s;
}

}  // namespace hpflex
