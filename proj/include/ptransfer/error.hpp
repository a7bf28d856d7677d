#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptransfer {

enum class Errc {
  invalid_argument,
  domain,
  ambiguous_side,
  critical_layer,
  convergence,
  degenerate_mode,
  singular_jump,
  vacuum_layer,
  no_root,
  integration,
  ill_conditioned,
  consistency,
  degenerate_coefficient,
  degenerate_geometry,
  integrability,
  format,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can tell usage problems from
/// numerical ones.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// True for errors caused by bad input rather than a failed computation.
  bool is_usage() const noexcept {
    return code_ == Errc::invalid_argument || code_ == Errc::format ||
           code_ == Errc::consistency;
  }

private:
  Errc code_;
};

inline std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::domain: return "domain error";
    case Errc::ambiguous_side: return "ambiguous side";
    case Errc::critical_layer: return "critical layer";
    case Errc::convergence: return "convergence failure";
    case Errc::degenerate_mode: return "degenerate mode";
    case Errc::singular_jump: return "singular jump";
    case Errc::vacuum_layer: return "vacuum layer";
    case Errc::no_root: return "no root";
    case Errc::integration: return "integration failure";
    case Errc::ill_conditioned: return "ill-conditioned";
    case Errc::consistency: return "consistency error";
    case Errc::degenerate_coefficient: return "degenerate coefficient";
    case Errc::degenerate_geometry: return "degenerate geometry";
    case Errc::integrability: return "integrability error";
    case Errc::format: return "format error";
  }
  return "error";
}

}  // namespace ptransfer
