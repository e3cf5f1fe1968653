#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qkb/spectra.hpp"

namespace qkb {

/// Upper and lower extremes of the control yield.
struct YieldRange {
  double max = 0.0;
  double min = 0.0;
};

/// Classical kinematic bounds: extremes of Tr(U rho_s U^dag theta) over U(N_s).
YieldRange ckb(const Spectrum& sys, const ObservableSpectrum& obs);

/// Kinematic bounds of the composite landscape (identity and reversed pairings).
YieldRange kinematic_bounds(const CompositeSpectra& c);

/// Multiplicity-aware versions over grouped spectra. `sys` is paired with the
/// observable blocks n_i; the composite version pairs sys (x) ctrl with
/// blocks n_i * N_c. Cost scales with the number of groups, not the dimension.
YieldRange ckb(const GroupedSpectrum& sys, const ObservableSpectrum& obs);
YieldRange kinematic_bounds(const GroupedSpectrum& sys, const GroupedSpectrum& ctrl,
                            const ObservableSpectrum& obs);

/// Critical value sum_k P[perm[k]] * Theta[k] (0-based perm over big_p).
/// Throws InvalidPermutation unless perm is a bijection of {0..N-1}.
double critical_value(const CompositeSpectra& c, std::span<const std::size_t> perm);

/// Permutation that lays out big_p as p_1 q_1..p_1 q_Nc; ...; p_Ns q_1..p_Ns q_Nc.
/// Its critical value equals the upper classical bound.
std::vector<std::size_t> sigma0_permutation(const Spectrum& sys, const Spectrum& ctrl,
                                            const CompositeSpectra& c);

/// Controller bandwidth, plant band gaps and band indices. Infinite entries
/// are std::numeric_limits<double>::infinity().
struct BandStructure {
  double bandwidth = 0.0;
  std::vector<double> gaps;      // N_s - 1 entries, g_k = ln(p_{k+1}/p_k)
  std::vector<std::size_t> mu;   // r entries, mu_r = N_s
  std::vector<std::size_t> nu;   // r - 1 entries, nu_i = N_s - mu_i
};

BandStructure band_structure(const Spectrum& sys, const Spectrum& ctrl,
                             const ObservableSpectrum& obs);

/// Witness indices are the 1-based band index i of the first overlapping pair.
struct SurpassResult {
  bool upper = false;
  bool lower = false;
  std::optional<std::size_t> witness_upper;
  std::optional<std::size_t> witness_lower;
};

/// Overlap (eigenvalue-product) form: p_{mu_i} q_max > p_{mu_i+1} q_min for some i.
/// This is the authoritative predicate.
SurpassResult surpass_ckb(const Spectrum& sys, const Spectrum& ctrl,
                          const ObservableSpectrum& obs);

/// Bandwidth form: B_c > min g_{mu_i} over indices whose lower population
/// p_{mu_i} is nonzero. An index with p_{mu_i} = 0 can never overlap.
SurpassResult surpass_ckb_bandwidth(const Spectrum& sys, const Spectrum& ctrl,
                                    const ObservableSpectrum& obs);

struct ReachResult {
  bool upper = false;
  bool lower = false;
};

/// rank(rho_s) rank(rho_c) <= n_r N_c (upper) and <= n_1 N_c (lower).
ReachResult reach_qkb(const Spectrum& sys, const Spectrum& ctrl,
                      const ObservableSpectrum& obs);

struct QubitReach {
  bool reachable = false;
  // False when a rank is not a power of two; the inequality is then between
  // non-integer Hartley entropies but remains equivalent to the rank form.
  bool ranks_power_of_two = true;
};

/// m_r + m_c >= S_0(rho_s) + S_0(rho_c). Throws DimensionMismatch unless
/// sys.dim() == 2^m_s and ctrl.dim() == 2^m_c.
QubitReach qubit_reach_condition(unsigned m_s, unsigned m_c, unsigned m_r,
                                 const Spectrum& sys, const Spectrum& ctrl);

/// Smallest dimension of a pure controller for which the upper QKB is reachable.
std::size_t min_pure_controller_dim(const Spectrum& sys, const ObservableSpectrum& obs);

struct BoundsReport {
  double ckb_max = 0.0;
  double ckb_min = 0.0;
  double kin_max = 0.0;
  double kin_min = 0.0;
  double qkb_max = 0.0;
  double qkb_min = 0.0;
  bool surpass_upper = false;
  bool surpass_lower = false;
  bool reach_upper = false;
  bool reach_lower = false;
  std::optional<std::size_t> witness_upper;
  std::optional<std::size_t> witness_lower;
};

BoundsReport compute_bounds(const Spectrum& sys, const Spectrum& ctrl,
                            const ObservableSpectrum& obs);

}  // namespace qkb
