#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hpflex/time.hpp"

namespace hpflex {

/// Hourly samples starting at `start`. Missing hours hold NaN.
struct HourlySeries {
  Timestamp start{};
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  Timestamp time_at(std::size_t i) const { return start + kHour * long(i); }
  Timestamp end() const { return time_at(values.size()); }

  std::optional<std::size_t> index_of(Timestamp t) const {
    auto d = std::chrono::duration_cast<std::chrono::seconds>(t - start).count();
    if (d < 0 || d % 3600 != 0) return std::nullopt;
    auto i = std::size_t(d / 3600);
    if (i >= values.size()) return std::nullopt;
    return i;
  }

  std::optional<double> at(Timestamp t) const {
    auto i = index_of(t);
    if (!i || std::isnan(values[*i])) return std::nullopt;
    return values[*i];
  }

  std::vector<Timestamp> missing() const {
    std::vector<Timestamp> out;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (std::isnan(values[i])) out.push_back(time_at(i));
    return out;
  }
};

}  // namespace hpflex
