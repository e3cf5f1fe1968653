#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qkb/bounds.hpp"
#include "qkb/spectra.hpp"

namespace qkb {

/// Hamiltonian eigenvalues with degeneracies. Energies are in units for
/// which the Boltzmann weight is exp(-beta * E).
struct LevelSet {
  std::vector<double> energies;
  std::vector<std::uint64_t> multiplicities;

  /// Throws InvalidLevels on length mismatch, zero multiplicity or
  /// non-finite energy.
  void validate() const;
  std::uint64_t dim() const;
};

/// Gibbs state exp(-beta H) / Z. beta = 0 is infinite temperature and
/// beta = +inf is the zero-temperature limit.
struct ThermalModel {
  LevelSet levels;
  double beta = 0.0;
};

inline constexpr double kZeroTemperature = std::numeric_limits<double>::infinity();

/// Per-level populations with degeneracies, ascending. Shifts energies by the
/// ground level before exponentiating; at beta = inf all weight sits on the
/// ground level, split evenly across its degeneracy.
GroupedSpectrum thermal_populations(const ThermalModel& m);

/// Expanded thermal spectrum.
Spectrum thermal_spectrum(const ThermalModel& m);

/// M spin-1/2 particles: energies k for k = -M/2, -M/2 + 1, ..., M/2 with
/// binomial degeneracies C(M, k + M/2).
LevelSet spin_bath_levels(unsigned M);

/// Single spin, energies -1/2 and +1/2.
LevelSet two_level_levels();

/// Two identical spins: energies -1, 0 (twice), +1.
LevelSet two_spin_levels();

/// Observable presets.
ObservableSpectrum sigma_z();
ObservableSpectrum projector_pi0();  // projector on the one-excitation subspace
ObservableSpectrum projector_pi1();  // projector on the doubly excited state

/// Frequency form of the surpass condition for Gibbs states:
/// (Omega_max - Omega_min) / T_c > min_i (omega_{mu_i} - omega_{mu_i+1}) / T_s,
/// where omega is the plant spectrum in nonincreasing order. Temperatures may
/// be +inf. Throws NonPositiveTemperature when either is <= 0.
bool thermal_surpass(const LevelSet& sys, double t_s, const LevelSet& ctrl, double t_c,
                     const ObservableSpectrum& obs);

/// Controller bandwidth hbar (Omega_max - Omega_min) / (k_B T_c).
double thermal_bandwidth(const LevelSet& ctrl, double t_c);

struct CurvePoint {
  double lambda_c = 0.0;
  double j_max = 0.0;
  double j_min = 0.0;
  double ckb_max = 0.0;
  double gap_to_ckb = 0.0;
};

/// Bounds of a Gibbs plant coupled to a Gibbs controller at one point.
CurvePoint thermal_point(const ThermalModel& sys, const ThermalModel& ctrl,
                         const ObservableSpectrum& obs);

/// Two-level plant (lambda_s) with theta = sigma_z, coupled to an M-spin bath.
std::vector<CurvePoint> figure3_curve(double lambda_s, unsigned M, std::span<const double> grid);

enum class Projector { Pi0, Pi1 };

/// Two-spin plant (lambda_s) coupled to an M-spin bath.
std::vector<CurvePoint> figure4_curve(double lambda_s, unsigned M, Projector which,
                                      std::span<const double> grid);

/// n points from a to b inclusive.
std::vector<double> uniform_grid(double a, double b, std::size_t n);

}  // namespace qkb
