#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qkb/error.hpp"

namespace qkb {

/// Absolute threshold below which an eigenvalue counts as zero and below
/// which two eigenvalues count as equal.
inline constexpr double kZeroTol = 1e-12;

/// Probability spectrum of a density matrix, stored in nondecreasing order.
class Spectrum {
 public:
  /// Validates and sorts `raw`. Entries in [-1e-12, 0) are clamped to zero;
  /// the result is rescaled so the sum is 1 to within 1e-12.
  /// Throws NegativeEigenvalue, NotNormalized.
  static Spectrum from_values(std::vector<double> raw);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }

  /// Number of values above the zero threshold.
  std::size_t rank() const noexcept;
  std::size_t nullity() const noexcept { return dim() - rank(); }

 private:
  explicit Spectrum(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

inline Spectrum make_spectrum(std::vector<double> raw) {
  return Spectrum::from_values(std::move(raw));
}

/// Distinct eigenvalues of the target observable with their multiplicities.
class ObservableSpectrum {
 public:
  /// Throws InvalidObservable unless `distinct` is strictly increasing and
  /// every multiplicity is at least one.
  ObservableSpectrum(std::vector<double> distinct,
                     std::vector<std::size_t> multiplicities);

  /// Groups a raw eigenvalue list, merging values closer than `tol`.
  static ObservableSpectrum from_eigenvalues(std::vector<double> eigenvalues,
                                             double tol = 1e-10);

  std::span<const double> distinct() const noexcept { return distinct_; }
  std::span<const std::size_t> multiplicities() const noexcept {
    return multiplicities_;
  }
  std::size_t levels() const noexcept { return distinct_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  double lowest() const noexcept { return distinct_.front(); }
  double highest() const noexcept { return distinct_.back(); }

  /// Eigenvalues repeated by multiplicity, nondecreasing.
  std::vector<double> expanded() const;

  /// Cumulative multiplicities n_1 + ... + n_i for i = 1..r.
  std::vector<std::size_t> cumulative() const;

 private:
  std::vector<double> distinct_;
  std::vector<std::size_t> multiplicities_;
  std::size_t dim_ = 0;
};

enum class StateClass { Pure, MixedNondegenerate, MaximallyMixed, MixedDegenerate };

std::string_view to_string(StateClass c);

StateClass classify(const Spectrum& s);

/// Spectra of P = rho_s (x) rho_c and Theta = theta (x) I_c.
struct CompositeSpectra {
  Spectrum big_p;
  std::vector<double> big_theta;
  std::size_t sys_dim = 0;
  std::size_t ctrl_dim = 0;

  std::size_t dim() const noexcept { return big_theta.size(); }
};

/// Throws DimensionMismatch when obs.dim() != sys.dim().
CompositeSpectra composite(const Spectrum& sys, const Spectrum& ctrl,
                           const ObservableSpectrum& obs);

/// log2 of the rank (quantum Hartley entropy).
double hartley_entropy(const Spectrum& s);

/// Spectrum stored as distinct-ish values with integer multiplicities, sorted
/// ascending by value. Used where the expanded list would be exponentially
/// long (spin baths). Values are per-state probabilities.
struct GroupedSpectrum {
  std::vector<double> values;
  std::vector<std::uint64_t> counts;

  std::uint64_t dim() const noexcept;
  double total() const noexcept;
  Spectrum expand() const;
};

GroupedSpectrum group(const Spectrum& s);

/// Product spectrum of two grouped spectra, sorted ascending.
GroupedSpectrum tensor(const GroupedSpectrum& a, const GroupedSpectrum& b);

}  // namespace qkb
