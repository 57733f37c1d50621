#pragma once

#include <string>

#include "hpflex/envelope.hpp"

namespace hpflex::test {

inline std::string data_path(const std::string& rel) { return std::string(HPFLEX_DATA_DIR) + "/" + rel; }

inline EnvelopeStacks default_stacks() { return load_materials(csv::read_file(data_path("materials.csv"))); }

inline CodeTable default_codes() { return CodeTable::load(csv::read_file(data_path("building_codes.csv"))); }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace hpflex::test
