#include "qkb/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qkb {

void LevelSet::validate() const {
  if (energies.empty()) throw Error(ErrorKind::InvalidLevels, "level set is empty");
  if (energies.size() != multiplicities.size())
    throw Error(ErrorKind::InvalidLevels, "energies and multiplicities differ in length");
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!std::isfinite(energies[i])) throw Error(ErrorKind::InvalidLevels, "non-finite energy");
    if (multiplicities[i] == 0) throw Error(ErrorKind::InvalidLevels, "zero multiplicity");
  }
}

std::uint64_t LevelSet::dim() const {
  return std::accumulate(multiplicities.begin(), multiplicities.end(), std::uint64_t{0});
}

GroupedSpectrum thermal_populations(const ThermalModel& m) {
  m.levels.validate();
  if (std::isnan(m.beta) || m.beta < 0.0)
    throw Error(ErrorKind::NonPositiveTemperature, "beta must be >= 0 (temperature > 0)");

  const auto& e = m.levels.energies;
  const auto& g = m.levels.multiplicities;
  const double ground = *std::min_element(e.begin(), e.end());

  std::vector<double> weight(e.size());
  if (std::isinf(m.beta)) {
    for (std::size_t i = 0; i < e.size(); ++i) weight[i] = e[i] == ground ? 1.0 : 0.0;
  } else {
    for (std::size_t i = 0; i < e.size(); ++i) weight[i] = std::exp(-m.beta * (e[i] - ground));
  }
  double z = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) z += weight[i] * static_cast<double>(g[i]);

  std::vector<std::pair<double, std::uint64_t>> items;
  for (std::size_t i = 0; i < e.size(); ++i) items.emplace_back(weight[i] / z, g[i]);
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  GroupedSpectrum out;
  for (const auto& [v, c] : items) {
    if (!out.values.empty() && out.values.back() == v) {
      out.counts.back() += c;
    } else {
      out.values.push_back(v);
      out.counts.push_back(c);
    }
  }
  return out;
}

Spectrum thermal_spectrum(const ThermalModel& m) { return thermal_populations(m).expand(); }

LevelSet spin_bath_levels(unsigned M) {
  if (M == 0) throw Error(ErrorKind::InvalidArgument, "spin bath needs at least one spin");
  if (M > 62) throw Error(ErrorKind::TooLarge, "spin bath dimension 2^M overflows 64 bits");
  LevelSet out;
  std::uint64_t binom = 1;
  for (unsigned j = 0; j <= M; ++j) {
    out.energies.push_back(static_cast<double>(j) - 0.5 * M);
    out.multiplicities.push_back(binom);
    binom = binom * (M - j) / (j + 1);
  }
  return out;
}

LevelSet two_level_levels() { return {{-0.5, 0.5}, {1, 1}}; }

LevelSet two_spin_levels() { return {{-1.0, 0.0, 1.0}, {1, 2, 1}}; }

ObservableSpectrum sigma_z() { return ObservableSpectrum({-1.0, 1.0}, {1, 1}); }
ObservableSpectrum projector_pi0() { return ObservableSpectrum({0.0, 1.0}, {2, 2}); }
ObservableSpectrum projector_pi1() { return ObservableSpectrum({0.0, 1.0}, {3, 1}); }

namespace {

void require_positive(double t, const char* who) {
  if (std::isnan(t) || t <= 0.0) {
    std::ostringstream os;
    os << who << " temperature " << t << " is not positive";
    throw Error(ErrorKind::NonPositiveTemperature, os.str());
  }
}

}  // namespace

double thermal_bandwidth(const LevelSet& ctrl, double t_c) {
  ctrl.validate();
  require_positive(t_c, "controller");
  const auto [lo, hi] = std::minmax_element(ctrl.energies.begin(), ctrl.energies.end());
  return (*hi - *lo) / t_c;
}

bool thermal_surpass(const LevelSet& sys, double t_s, const LevelSet& ctrl, double t_c,
                     const ObservableSpectrum& obs) {
  sys.validate();
  require_positive(t_s, "system");
  if (sys.dim() != obs.dim()) throw Error(ErrorKind::DimensionMismatch, "observable dimension != system dimension");
  const double bandwidth = thermal_bandwidth(ctrl, t_c);

  // Plant frequencies in nonincreasing order pair with nondecreasing populations.
  std::vector<double> omega;
  for (std::size_t i = 0; i < sys.energies.size(); ++i)
    omega.insert(omega.end(), sys.multiplicities[i], sys.energies[i]);
  std::sort(omega.begin(), omega.end(), std::greater<>());

  const auto mu = obs.cumulative();
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < mu.size(); ++i)
    min_gap = std::min(min_gap, (omega[mu[i] - 1] - omega[mu[i]]) / t_s);
  return bandwidth > min_gap;
}

CurvePoint thermal_point(const ThermalModel& sys, const ThermalModel& ctrl,
                         const ObservableSpectrum& obs) {
  const GroupedSpectrum p = thermal_populations(sys);
  const GroupedSpectrum q = thermal_populations(ctrl);
  const YieldRange classical = ckb(p, obs);
  const YieldRange kinematic = kinematic_bounds(p, q, obs);
  CurvePoint pt;
  pt.lambda_c = ctrl.beta;
  pt.j_max = kinematic.max;
  pt.j_min = kinematic.min;
  pt.ckb_max = classical.max;
  pt.gap_to_ckb = kinematic.max - classical.max;
  return pt;
}

namespace {

std::vector<CurvePoint> sweep(const ThermalModel& sys, unsigned M, const ObservableSpectrum& obs,
                              std::span<const double> grid) {
  ThermalModel ctrl{spin_bath_levels(M), 0.0};
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double lambda_c : grid) {
    if (std::isnan(lambda_c) || lambda_c < 0.0)
      throw Error(ErrorKind::InvalidArgument, "lambda_c grid values must be >= 0");
    ctrl.beta = lambda_c;
    out.push_back(thermal_point(sys, ctrl, obs));
  }
  return out;
}

void require_lambda_s(double lambda_s) {
  if (!(lambda_s > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda_s must be > 0");
}

}  // namespace

std::vector<CurvePoint> figure3_curve(double lambda_s, unsigned M, std::span<const double> grid) {
  require_lambda_s(lambda_s);
  return sweep(ThermalModel{two_level_levels(), lambda_s}, M, sigma_z(), grid);
}

std::vector<CurvePoint> figure4_curve(double lambda_s, unsigned M, Projector which,
                                      std::span<const double> grid) {
  require_lambda_s(lambda_s);
  const ObservableSpectrum obs = which == Projector::Pi0 ? projector_pi0() : projector_pi1();
  return sweep(ThermalModel{two_spin_levels(), lambda_s}, M, obs, grid);
}

std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "grid needs at least one point");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  const double step = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + step * static_cast<double>(i);
  out.back() = b;
  return out;
}

}  // namespace qkb
