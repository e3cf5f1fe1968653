#include "qkb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qkb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_dim(const Spectrum& sys, const ObservableSpectrum& obs) {
  if (sys.dim() != obs.dim()) {
    std::ostringstream os;
    os << "system dimension " << sys.dim() << " != observable dimension " << obs.dim();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

// Pairs an ascending population list (value, count) with ascending
// observable blocks (value, size). With `reversed` the populations are
// consumed from the largest down.
double paired_sum(std::span<const double> values, std::span<const std::uint64_t> counts,
                  std::span<const double> block_values,
                  std::span<const std::uint64_t> block_sizes, bool reversed) {
  const std::size_t n = values.size();
  std::size_t g = 0;
  std::uint64_t left_in_group = n ? counts[reversed ? n - 1 : 0] : 0;
  double sum = 0.0;
  for (std::size_t b = 0; b < block_values.size(); ++b) {
    std::uint64_t need = block_sizes[b];
    double block_weight = 0.0;
    while (need > 0 && g < n) {
      const std::size_t idx = reversed ? n - 1 - g : g;
      const std::uint64_t take = std::min(need, left_in_group);
      block_weight += values[idx] * static_cast<double>(take);
      need -= take;
      left_in_group -= take;
      if (left_in_group == 0 && ++g < n) left_in_group = counts[reversed ? n - 1 - g : g];
    }
    sum += block_weight * block_values[b];
  }
  return sum;
}

std::vector<std::uint64_t> block_sizes(const ObservableSpectrum& obs, std::uint64_t scale) {
  std::vector<std::uint64_t> sizes;
  for (std::size_t m : obs.multiplicities()) sizes.push_back(m * scale);
  return sizes;
}

YieldRange constant_landscape(const ObservableSpectrum& obs) {
  return {obs.lowest(), obs.lowest()};
}

}  // namespace

YieldRange ckb(const Spectrum& sys, const ObservableSpectrum& obs) {
  require_same_dim(sys, obs);
  if (obs.levels() == 1) return constant_landscape(obs);
  const auto theta = obs.expanded();
  const auto p = sys.values();
  const std::size_t n = p.size();
  YieldRange out;
  for (std::size_t k = 0; k < n; ++k) {
    out.max += p[k] * theta[k];
    out.min += p[n - 1 - k] * theta[k];
  }
  return out;
}

YieldRange kinematic_bounds(const CompositeSpectra& c) {
  const auto p = c.big_p.values();
  const auto& theta = c.big_theta;
  const std::size_t n = p.size();
  if (theta.front() == theta.back()) return {theta.front(), theta.front()};
  YieldRange out;
  for (std::size_t k = 0; k < n; ++k) {
    out.max += p[k] * theta[k];
    out.min += p[n - 1 - k] * theta[k];
  }
  return out;
}

YieldRange ckb(const GroupedSpectrum& sys, const ObservableSpectrum& obs) {
  if (sys.dim() != obs.dim()) {
    std::ostringstream os;
    os << "system dimension " << sys.dim() << " != observable dimension " << obs.dim();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (obs.levels() == 1) return constant_landscape(obs);
  const auto sizes = block_sizes(obs, 1);
  return {paired_sum(sys.values, sys.counts, obs.distinct(), sizes, false),
          paired_sum(sys.values, sys.counts, obs.distinct(), sizes, true)};
}

YieldRange kinematic_bounds(const GroupedSpectrum& sys, const GroupedSpectrum& ctrl,
                            const ObservableSpectrum& obs) {
  if (sys.dim() != obs.dim()) {
    std::ostringstream os;
    os << "system dimension " << sys.dim() << " != observable dimension " << obs.dim();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (obs.levels() == 1) return constant_landscape(obs);
  const GroupedSpectrum big_p = tensor(sys, ctrl);
  const auto sizes = block_sizes(obs, ctrl.dim());
  return {paired_sum(big_p.values, big_p.counts, obs.distinct(), sizes, false),
          paired_sum(big_p.values, big_p.counts, obs.distinct(), sizes, true)};
}

double critical_value(const CompositeSpectra& c, std::span<const std::size_t> perm) {
  const std::size_t n = c.dim();
  if (perm.size() != n) {
    std::ostringstream os;
    os << "permutation has " << perm.size() << " entries, expected " << n;
    throw Error(ErrorKind::InvalidPermutation, os.str());
  }
  std::vector<bool> seen(n, false);
  for (std::size_t idx : perm) {
    if (idx >= n || seen[idx])
      throw Error(ErrorKind::InvalidPermutation, "permutation is not a bijection");
    seen[idx] = true;
  }
  const auto p = c.big_p.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += p[perm[k]] * c.big_theta[k];
  return sum;
}

std::vector<std::size_t> sigma0_permutation(const Spectrum& sys, const Spectrum& ctrl,
                                            const CompositeSpectra& c) {
  if (c.sys_dim != sys.dim() || c.ctrl_dim != ctrl.dim())
    throw Error(ErrorKind::DimensionMismatch, "composite does not match the given spectra");
  std::vector<double> slots;
  slots.reserve(c.dim());
  for (double p : sys.values())
    for (double q : ctrl.values()) slots.push_back(p * q);
  // order[m] is the slot holding the m-th smallest product, which is big_p[m].
  std::vector<std::size_t> order(slots.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return slots[a] < slots[b]; });
  std::vector<std::size_t> perm(slots.size());
  for (std::size_t m = 0; m < order.size(); ++m) perm[order[m]] = m;
  return perm;
}

BandStructure band_structure(const Spectrum& sys, const Spectrum& ctrl,
                             const ObservableSpectrum& obs) {
  require_same_dim(sys, obs);
  BandStructure out;
  out.bandwidth = ctrl.min() <= kZeroTol ? kInf : std::log(ctrl.max() / ctrl.min());
  const auto p = sys.values();
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const bool lo_zero = p[k] <= kZeroTol;
    const bool hi_zero = p[k + 1] <= kZeroTol;
    if (lo_zero && hi_zero)
      out.gaps.push_back(0.0);
    else if (lo_zero)
      out.gaps.push_back(kInf);
    else
      out.gaps.push_back(std::log(p[k + 1] / p[k]));
  }
  out.mu = obs.cumulative();
  for (std::size_t i = 0; i + 1 < out.mu.size(); ++i) out.nu.push_back(sys.dim() - out.mu[i]);
  return out;
}

SurpassResult surpass_ckb(const Spectrum& sys, const Spectrum& ctrl,
                          const ObservableSpectrum& obs) {
  require_same_dim(sys, obs);
  SurpassResult out;
  const auto p = sys.values();
  const auto mu = obs.cumulative();
  const double q_max = ctrl.max();
  const double q_min = ctrl.min();
  // Indices are 1-based in the overlap condition: p_m is p[m - 1].
  auto overlaps = [&](std::size_t m) { return p[m - 1] * q_max > p[m] * q_min + kZeroTol; };
  for (std::size_t i = 1; i < obs.levels(); ++i) {
    const std::size_t mu_i = mu[i - 1];
    const std::size_t nu_i = sys.dim() - mu_i;
    if (!out.upper && overlaps(mu_i)) {
      out.upper = true;
      out.witness_upper = i;
    }
    if (!out.lower && overlaps(nu_i)) {
      out.lower = true;
      out.witness_lower = i;
    }
  }
  return out;
}

SurpassResult surpass_ckb_bandwidth(const Spectrum& sys, const Spectrum& ctrl,
                                    const ObservableSpectrum& obs) {
  const BandStructure bands = band_structure(sys, ctrl, obs);
  const auto p = sys.values();
  SurpassResult out;
  auto exceeds = [&](std::size_t m) {
    if (p[m - 1] <= kZeroTol) return false;
    return bands.bandwidth > bands.gaps[m - 1];
  };
  for (std::size_t i = 1; i < obs.levels(); ++i) {
    if (!out.upper && exceeds(bands.mu[i - 1])) {
      out.upper = true;
      out.witness_upper = i;
    }
    if (!out.lower && exceeds(bands.nu[i - 1])) {
      out.lower = true;
      out.witness_lower = i;
    }
  }
  return out;
}

ReachResult reach_qkb(const Spectrum& sys, const Spectrum& ctrl,
                      const ObservableSpectrum& obs) {
  require_same_dim(sys, obs);
  const std::size_t occupied = sys.rank() * ctrl.rank();
  const auto mult = obs.multiplicities();
  return {occupied <= mult.back() * ctrl.dim(), occupied <= mult.front() * ctrl.dim()};
}

namespace {
bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }
}  // namespace

QubitReach qubit_reach_condition(unsigned m_s, unsigned m_c, unsigned m_r,
                                 const Spectrum& sys, const Spectrum& ctrl) {
  if (m_s >= 63 || m_c >= 63 || sys.dim() != (std::size_t{1} << m_s) ||
      ctrl.dim() != (std::size_t{1} << m_c)) {
    std::ostringstream os;
    os << "expected dimensions 2^" << m_s << " and 2^" << m_c << ", got " << sys.dim()
       << " and " << ctrl.dim();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (m_r > m_s)
    throw Error(ErrorKind::DimensionMismatch, "m_r cannot exceed m_s");
  QubitReach out;
  out.ranks_power_of_two = is_power_of_two(sys.rank()) && is_power_of_two(ctrl.rank());
  const double entropy = hartley_entropy(sys) + hartley_entropy(ctrl);
  // Equality only occurs at integer entropies, which log2 returns exactly.
  out.reachable = static_cast<double>(m_r + m_c) >= entropy;
  return out;
}

std::size_t min_pure_controller_dim(const Spectrum& sys, const ObservableSpectrum& obs) {
  require_same_dim(sys, obs);
  const std::size_t n_r = obs.multiplicities().back();
  return std::max<std::size_t>(1, (sys.rank() + n_r - 1) / n_r);
}

BoundsReport compute_bounds(const Spectrum& sys, const Spectrum& ctrl,
                            const ObservableSpectrum& obs) {
  BoundsReport r;
  r.qkb_max = obs.highest();
  r.qkb_min = obs.lowest();
  const CompositeSpectra c = composite(sys, ctrl, obs);
  const YieldRange classical = ckb(sys, obs);
  const YieldRange kinematic = kinematic_bounds(c);
  // Rounding can push a sum a few ulps past its neighbour in the chain
  // qkb_min <= kin_min <= ckb_min <= ckb_max <= kin_max <= qkb_max.
  r.kin_max = std::min(kinematic.max, r.qkb_max);
  r.kin_min = std::max(kinematic.min, r.qkb_min);
  r.ckb_max = std::min(classical.max, r.kin_max);
  r.ckb_min = std::max(classical.min, r.kin_min);

  const SurpassResult s = surpass_ckb(sys, ctrl, obs);
  r.surpass_upper = s.upper;
  r.surpass_lower = s.lower;
  r.witness_upper = s.witness_upper;
  r.witness_lower = s.witness_lower;
  const ReachResult reach = reach_qkb(sys, ctrl, obs);
  r.reach_upper = reach.upper;
  r.reach_lower = reach.lower;
  return r;
}

}  // namespace qkb
