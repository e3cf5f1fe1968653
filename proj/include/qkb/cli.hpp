#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "qkb/report.hpp"
#include "qkb/spectra.hpp"
#include "qkb/thermal.hpp"

namespace qkb::cli {

inline constexpr const char* kVersion = "1.0.0";

/// One side of the problem: always carries a spectrum; thermal parties also
/// keep their level data and inverse temperature.
struct Party {
  Spectrum spectrum;
  std::optional<ThermalModel> thermal;
};

struct Instance {
  Party system;
  Party controller;
  ObservableSpectrum observable;
};

/// "sigma_z", "Pi0" or "Pi1". Throws InvalidInstance otherwise.
ObservableSpectrum observable_preset(std::string_view name);

/// Parses the instance schema:
///   {"system": PARTY, "controller": PARTY, "observable": OBS}
/// PARTY is {"spectrum": [...]}, {"thermal": {...}} or {"density_matrix": [[...]]}.
/// OBS is {"distinct": [...], "multiplicities": [...]}, {"eigenvalues": [...]},
/// {"matrix": [[...]]}, {"preset": NAME} or a bare preset name.
Instance parse_instance(const Json& j);
Instance load_instance(const std::string& path);

/// Entry point of the `qkb` executable. Returns 0 on success, 2 on invalid
/// input, 1 on internal failure (including failed oracle checks).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qkb::cli
