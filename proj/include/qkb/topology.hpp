#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qkb/spectra.hpp"

namespace qkb {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest composite dimension accepted by the exact enumeration.
inline constexpr std::size_t kMaxEnumerationDim = 10;

enum class TopologySource { Table, BruteForce };

std::string_view to_string(TopologySource s);

/// Number of critical submanifolds and codimension of the maximum submanifold.
struct TopologyReport {
  std::optional<Rational> n_critical;  // empty where the table has no formula
  BigInt d_max = 0;
  StateClass sys_class = StateClass::Pure;
  StateClass ctrl_class = StateClass::Pure;
  TopologySource source = TopologySource::Table;
  // False when the closed form is evaluated outside the range where it counts
  // block assignments correctly (a block too small to take every plant level).
  bool formula_domain_ok = true;
  // Pure/MM row: the count of ways to spread N_c equal populations over r
  // blocks, which is what the enumeration reproduces.
  std::optional<BigInt> n_critical_multiset;
  std::string note;
};

/// Closed-form landscape characteristics for a pair of state classes.
/// Throws UnsupportedClass for MixedDegenerate.
TopologyReport topology_from_table(StateClass sys_class, StateClass ctrl_class,
                                   std::size_t n_s, std::size_t n_c,
                                   const ObservableSpectrum& obs);

/// Classifies the spectra, uses the table when it has a formula and falls
/// back to exact enumeration (N <= 10) otherwise.
TopologyReport topology(const Spectrum& sys, const Spectrum& ctrl, const ObservableSpectrum& obs);

/// Exact value of a binary double.
Rational exact_rational(double x);

struct CriticalCount {
  std::size_t distinct_values = 0;  // distinct critical yields
  std::size_t assignments = 0;      // distinct placements of P into Theta blocks
};

/// Enumerates every placement of the P multiset into the degeneracy blocks of
/// Theta (sizes n_i N_c) in exact arithmetic. Throws TooLarge when N > 10.
CriticalCount count_critical_values_exact(std::span<const Rational> sys,
                                          std::span<const Rational> ctrl,
                                          std::span<const Rational> theta_distinct,
                                          std::span<const std::size_t> multiplicities);

/// Sorted distinct critical values, exact.
std::vector<Rational> critical_values_exact(std::span<const Rational> sys,
                                            std::span<const Rational> ctrl,
                                            std::span<const Rational> theta_distinct,
                                            std::span<const std::size_t> multiplicities);

/// Spectrum entries are taken as exact binary fractions.
std::size_t count_critical_values_bruteforce(const Spectrum& sys, const Spectrum& ctrl,
                                             const ObservableSpectrum& obs);

/// Distinct critical values rounded to double, ascending.
std::vector<double> critical_values(const Spectrum& sys, const Spectrum& ctrl,
                                    const ObservableSpectrum& obs);

/// n! / prod k_i!
BigInt multinomial(std::span<const std::size_t> parts);

}  // namespace qkb
