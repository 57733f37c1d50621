#pragma once

// Building envelope: material layers, building-code tables and the lumped RC
// parameters of the single-zone model.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpflex/csv.hpp"
#include "hpflex/error.hpp"

namespace hpflex {

inline constexpr double kJoulePerKwh = 3.6e6;
/// Interior heat capacity per floor area (air and furniture), J/(K m²).
inline constexpr double kInteriorCapacityPerArea = 20e3;

namespace tag {
inline constexpr const char* insulation = "insulation";
inline constexpr const char* inner_mass = "inner_mass";
inline constexpr const char* storage_mass = "storage_mass";
}  // namespace tag

struct MaterialLayer {
  std::string name;
  std::string tag;
  double thickness = 0.0;      // m
  double density = 0.0;        // kg/m³
  double specific_heat = 0.0;  // J/(kg K)
  double conductivity = 0.0;   // W/(m K)
  std::optional<double> fixed_resistance;  // m² K/W, replaces ζ/k when present
};

/// Thermal resistance of one layer, m² K/W.
inline double layer_resistance(const MaterialLayer& layer) {
  if (layer.fixed_resistance) {
    if (*layer.fixed_resistance < 0.0)
      throw Error(Errc::invalid_material, "envelope", layer.name + ": negative fixed resistance");
    return *layer.fixed_resistance;
  }
  if (layer.thickness < 0.0 || layer.density < 0.0 || layer.specific_heat < 0.0)
    throw Error(Errc::invalid_material, "envelope", layer.name + ": negative material property");
  if (!(layer.conductivity > 0.0))
    throw Error(Errc::invalid_material, "envelope",
                layer.name + ": conductivity must be positive without a fixed resistance");
  return layer.thickness / layer.conductivity;
}

/// Areal heat capacity ζ·ρ·C, J/(m² K).
inline double layer_capacity(const MaterialLayer& layer) {
  return layer.thickness * layer.density * layer.specific_heat;
}

enum class Part { wall, roof, floor };

inline const char* to_string(Part p) {
  switch (p) {
    case Part::wall: return "wall";
    case Part::roof: return "roof";
    case Part::floor: return "floor";
  }
  return "?";
}

/// Layers ordered from the inside surface to the outside surface.
struct LayerStack {
  Part part = Part::wall;
  std::vector<MaterialLayer> layers;

  std::size_t index_of(const std::string& t) const {
    std::size_t found = layers.size();
    int count = 0;
    for (std::size_t i = 0; i < layers.size(); ++i)
      if (layers[i].tag == t) {
        found = i;
        ++count;
      }
    if (count != 1)
      throw Error(Errc::stack, "envelope",
                  std::string(to_string(part)) + " stack needs exactly one '" + t + "' layer, found " +
                      std::to_string(count));
    return found;
  }

  /// The layer splitting the resistances into inside/outside halves.
  std::size_t mass_index() const {
    return index_of(part == Part::floor ? tag::storage_mass : tag::inner_mass);
  }
  std::size_t insulation_index() const { return index_of(tag::insulation); }

  void validate() const {
    auto m = mass_index();
    auto ins = insulation_index();
    if (m > ins)
      throw Error(Errc::stack, "envelope",
                  std::string(to_string(part)) + " stack: mass layer must lie inside the insulation");
    for (const auto& l : layers) (void)layer_resistance(l);
  }

  /// U-value from the room to the middle of the mass layer, W/(m² K).
  double inside_u() const {
    auto m = mass_index();
    double r = layer_resistance(layers[m]) / 2.0;
    for (std::size_t i = 0; i < m; ++i) r += layer_resistance(layers[i]);
    return 1.0 / r;
  }

  /// U-value from the middle of the mass layer to the outside, W/(m² K).
  double outside_u() const {
    auto m = mass_index();
    double r = layer_resistance(layers[m]) / 2.0;
    for (std::size_t i = m + 1; i < layers.size(); ++i) r += layer_resistance(layers[i]);
    return 1.0 / r;
  }

  /// Heat capacity of everything inside the insulation, J/(m² K).
  double inside_capacity() const {
    auto ins = insulation_index();
    double c = 0.0;
    for (std::size_t i = 0; i < ins; ++i) c += layer_capacity(layers[i]);
    return c;
  }
};

struct EnvelopeStacks {
  LayerStack wall{Part::wall, {}};
  LayerStack roof{Part::roof, {}};
  LayerStack floor{Part::floor, {}};
};

/// Reads the materials table. Row order within a part is the inside-to-outside
/// layer order.
inline EnvelopeStacks load_materials(const csv::Table& t, const std::string& source = "materials") {
  const char* cols[] = {"name", "part", "tag", "zeta_m", "rho", "c_J_per_kgK", "k_W_per_mK", "r_fixed"};
  std::size_t idx[8];
  for (int i = 0; i < 8; ++i) {
    auto c = t.column(cols[i]);
    if (!c) throw Error(Errc::parse, "envelope", source + ": missing column " + cols[i]);
    idx[i] = *c;
  }
  EnvelopeStacks s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto where = source + ":" + std::to_string(t.line_numbers[r]);
    MaterialLayer l;
    l.name = row[idx[0]];
    l.tag = row[idx[2]];
    l.thickness = csv::to_optional(row[idx[3]], where).value_or(0.0);
    l.density = csv::to_optional(row[idx[4]], where).value_or(0.0);
    l.specific_heat = csv::to_optional(row[idx[5]], where).value_or(0.0);
    l.conductivity = csv::to_optional(row[idx[6]], where).value_or(0.0);
    l.fixed_resistance = csv::to_optional(row[idx[7]], where);
    const auto& part = row[idx[1]];
    if (part == "wall")
      s.wall.layers.push_back(l);
    else if (part == "roof")
      s.roof.layers.push_back(l);
    else if (part == "floor")
      s.floor.layers.push_back(l);
    else
      throw Error(Errc::parse, "envelope", where + ": unknown part '" + part + "'");
  }
  s.wall.validate();
  s.roof.validate();
  s.floor.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Windows and building codes

struct WindowProps {
  double u = 0.0;  // W/(m² K)
  double g = 0.0;
};

/// Net energy balance of a window, kWh/m² per year.
inline double window_eref(const WindowProps& w) { return 194.4 * w.g - 90.36 * w.u; }
/// Empirical U(g) relation for glazing.
inline double window_u_from_g(double g) { return 0.0205 * std::exp(6.6545 * g); }

/// Finds the glazing (U, g) pair that has the requested E_ref under the
/// empirical U(g) relation. Bisection on g over (0, 1).
inline WindowProps window_props_from_eref(double e_ref) {
  auto residual = [&](double g) { return window_eref({window_u_from_g(g), g}) - e_ref; };
  double lo = 0.0, hi = 1.0;
  double f_lo = residual(lo), f_hi = residual(hi);
  if (f_lo * f_hi > 0.0)
    throw Error(Errc::no_solution, "envelope",
                "no glazing factor in (0,1) reproduces E_ref = " + csv::format(e_ref));
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    double f = residual(mid);
    if (std::abs(f) < 1e-9 || hi - lo < 1e-15) break;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
    }
  }
  return {window_u_from_g(mid), mid};
}

struct BuildingCode {
  std::string label;
  double u_wall = 0.0;
  double u_roof = 0.0;
  std::optional<double> u_door;
  std::optional<double> u_window;
  std::optional<double> e_ref;
  std::optional<double> g;
};

/// A code with every value needed by the envelope filled in.
struct ResolvedCode {
  std::string label;
  double u_wall = 0.0;
  double u_roof = 0.0;
  double u_door = 0.0;
  WindowProps window;
};

class CodeTable {
 public:
  CodeTable() = default;
  explicit CodeTable(std::vector<BuildingCode> codes) : codes_(std::move(codes)) {
    for (const auto& c : codes_) check(c);
  }

  static CodeTable load(const csv::Table& t, const std::string& source = "codes") {
    const char* cols[] = {"year", "u_wall", "u_roof", "u_door", "u_window", "e_ref", "g"};
    std::size_t idx[7];
    for (int i = 0; i < 7; ++i) {
      auto c = t.column(cols[i]);
      if (!c) throw Error(Errc::parse, "envelope", source + ": missing column " + cols[i]);
      idx[i] = *c;
    }
    std::vector<BuildingCode> codes;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto& row = t.rows[r];
      auto where = source + ":" + std::to_string(t.line_numbers[r]);
      BuildingCode c;
      c.label = row[idx[0]];
      c.u_wall = csv::to_double(row[idx[1]], where);
      c.u_roof = csv::to_double(row[idx[2]], where);
      c.u_door = csv::to_optional(row[idx[3]], where);
      c.u_window = csv::to_optional(row[idx[4]], where);
      c.e_ref = csv::to_optional(row[idx[5]], where);
      c.g = csv::to_optional(row[idx[6]], where);
      codes.push_back(std::move(c));
    }
    return CodeTable(std::move(codes));
  }

  const std::vector<BuildingCode>& codes() const { return codes_; }

  const BuildingCode* find(const std::string& label) const {
    for (const auto& c : codes_)
      if (c.label == label) return &c;
    return nullptr;
  }

  /// Door and window values absent from a row (the insulation-only
  /// recommendation rows) are taken from the closest preceding row that has
  /// them.
  ResolvedCode resolve(const std::string& label) const {
    auto it = std::find_if(codes_.begin(), codes_.end(), [&](const auto& c) { return c.label == label; });
    if (it == codes_.end()) throw Error(Errc::config, "envelope", "unknown building code '" + label + "'");
    ResolvedCode out{it->label, it->u_wall, it->u_roof, 0.0, {}};
    bool have_door = false, have_window = false;
    for (auto r = std::make_reverse_iterator(it + 1); r != codes_.rend(); ++r) {
      if (!have_door && r->u_door) {
        out.u_door = *r->u_door;
        have_door = true;
      }
      if (!have_window && (r->u_window || r->e_ref)) {
        out.window = window_of(*r);
        have_window = true;
      }
      if (have_door && have_window) break;
    }
    if (!have_door || !have_window)
      throw Error(Errc::config, "envelope", "building code '" + label + "' has no door/window values");
    return out;
  }

 private:
  static WindowProps window_of(const BuildingCode& c) {
    if (c.u_window) {
      double g = c.g ? *c.g : std::clamp(std::log(*c.u_window / 0.0205) / 6.6545, 0.0, 1.0);
      return {*c.u_window, g};
    }
    return window_props_from_eref(*c.e_ref);
  }

  static void check(const BuildingCode& c) {
    auto bad = [&](const std::string& what) {
      throw Error(Errc::config, "envelope", "building code '" + c.label + "': " + what);
    };
    if (!(c.u_wall > 0.0) || !(c.u_roof > 0.0)) bad("U values must be positive");
    if (c.u_door && !(*c.u_door > 0.0)) bad("door U must be positive");
    if (c.u_window && !(*c.u_window > 0.0)) bad("window U must be positive");
    if (c.g && !(*c.g > 0.0 && *c.g <= 1.0)) bad("g must lie in (0,1]");
  }

  std::vector<BuildingCode> codes_;
};

// ---------------------------------------------------------------------------
// Geometry and lumped parameters

struct BuildingGeometry {
  double floor_area = 0.0;   // m²
  double wall_area = 0.0;    // opaque wall, m²
  double roof_area = 0.0;    // m²
  double window_area = 0.0;  // m²
  double door_area = 0.0;    // m²
  double height = 0.0;       // m
};

/// Single-storey, flat-roofed rectangular building.
inline BuildingGeometry geometry_from_footprint(double length, double width, double height,
                                                double window_to_wall, double door_to_wall) {
  if (!(length > 0.0 && width > 0.0 && height > 0.0))
    throw Error(Errc::invalid_geometry, "envelope", "dimensions must be positive");
  if (window_to_wall < 0.0 || door_to_wall < 0.0 || window_to_wall + door_to_wall >= 1.0)
    throw Error(Errc::invalid_geometry, "envelope", "window and door ratios must be >= 0 and sum below 1");
  BuildingGeometry g;
  g.floor_area = length * width;
  g.roof_area = g.floor_area;
  g.height = height;
  double gross = 2.0 * (length + width) * height;
  g.window_area = window_to_wall * gross;
  g.door_area = door_to_wall * gross;
  g.wall_area = gross - g.window_area - g.door_area;
  return g;
}

inline BuildingGeometry family_house_geometry() { return geometry_from_footprint(12.5, 12.5, 2.5, 0.11, 0.04); }
inline BuildingGeometry office_geometry() { return geometry_from_footprint(50.0, 25.0, 2.5, 0.11, 0.04); }

/// Lumped RC parameters. Resistances in K/kW, capacities in kWh/K.
struct EnvelopeParams {
  double r_ea = 0.0;
  double r_ie = 0.0;
  double r_fi = 0.0;
  double c_e = 0.0;
  double c_f = 0.0;
  double c_i = 0.0;
};

inline EnvelopeParams derive_params(const BuildingGeometry& geo, const EnvelopeStacks& stacks,
                                    double window_u, double door_u) {
  stacks.wall.validate();
  stacks.roof.validate();
  stacks.floor.validate();
  if (!(geo.floor_area > 0.0 && geo.wall_area > 0.0 && geo.roof_area > 0.0) || geo.window_area < 0.0 ||
      geo.door_area < 0.0)
    throw Error(Errc::invalid_geometry, "envelope", "areas must be positive");

  // W/K
  double ua_outside = window_u * geo.window_area + door_u * geo.door_area +
                      stacks.wall.outside_u() * geo.wall_area + stacks.roof.outside_u() * geo.roof_area;
  double ua_inside = stacks.wall.inside_u() * geo.wall_area + stacks.roof.inside_u() * geo.roof_area;
  double ua_floor = stacks.floor.inside_u() * geo.floor_area;

  EnvelopeParams p;
  p.r_ea = 1000.0 / ua_outside;
  p.r_ie = 1000.0 / ua_inside;
  p.r_fi = 1000.0 / ua_floor;
  p.c_e = (stacks.wall.inside_capacity() * geo.wall_area + stacks.roof.inside_capacity() * geo.roof_area) /
          kJoulePerKwh;
  p.c_f = stacks.floor.inside_capacity() * geo.floor_area / kJoulePerKwh;
  p.c_i = kInteriorCapacityPerArea * geo.floor_area / kJoulePerKwh;
  return p;
}

/// Sets the insulation thickness so the assembly U-value (mass midpoint to
/// outside) equals `target_u`.
inline LayerStack insulation_for_code(const LayerStack& stack, double target_u) {
  stack.validate();
  if (!(target_u > 0.0)) throw Error(Errc::infeasible_target, "envelope", "target U must be positive");
  auto ins = stack.insulation_index();
  auto m = stack.mass_index();
  const auto& layer = stack.layers[ins];
  if (layer.fixed_resistance || !(layer.conductivity > 0.0))
    throw Error(Errc::stack, "envelope", "insulation layer needs a conductivity to be resized");
  double others = layer_resistance(stack.layers[m]) / 2.0;
  for (std::size_t i = m + 1; i < stack.layers.size(); ++i)
    if (i != ins) others += layer_resistance(stack.layers[i]);
  double needed = 1.0 / target_u - others;
  if (!(needed > 0.0))
    throw Error(Errc::infeasible_target, "envelope",
                std::string(to_string(stack.part)) + ": U = " + csv::format(target_u) +
                    " exceeds the assembly U without insulation (" + csv::format(1.0 / others) + ")");
  LayerStack out = stack;
  out.layers[ins].thickness = needed * layer.conductivity;
  return out;
}

/// Replaces the thickness of the floor's storage-mass layer.
inline LayerStack with_mass_thickness(const LayerStack& stack, double thickness) {
  if (!(thickness > 0.0)) throw Error(Errc::stack, "envelope", "mass thickness must be positive");
  LayerStack out = stack;
  out.layers[out.mass_index()].thickness = thickness;
  return out;
}

}  // namespace hpflex
