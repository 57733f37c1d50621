#pragma once

#include <stdexcept>
#include <string>

namespace hpflex {

enum class Errc {
  invalid_material,
  invalid_geometry,
  stack,
  infeasible_target,
  no_solution,
  domain,
  singular,
  singular_design,
  gap,
  coverage,
  structural,
  window,
  undefined_baseline,
  parse,
  config,
};

/// Every failure raised by the library carries a code and the module that
/// raised it, so the CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), code_(code), module_(std::move(module)) {}

  Errc code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  Errc code_;
  std::string module_;
};

}  // namespace hpflex
