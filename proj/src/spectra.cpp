#include "qkb/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qkb {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidObservable: return "InvalidObservable";
    case ErrorKind::InvalidPermutation: return "InvalidPermutation";
    case ErrorKind::UnsupportedClass: return "UnsupportedClass";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorKind::InvalidLevels: return "InvalidLevels";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidInstance: return "InvalidInstance";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

Spectrum Spectrum::from_values(std::vector<double> raw) {
  if (raw.empty()) throw Error(ErrorKind::InvalidArgument, "spectrum is empty");
  for (double& v : raw) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite eigenvalue");
    if (v < -kZeroTol) {
      std::ostringstream os;
      os << "eigenvalue " << v << " is below -1e-12";
      throw Error(ErrorKind::NegativeEigenvalue, os.str());
    }
    if (v < 0.0) v = 0.0;
  }
  const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(12);
    os << "eigenvalues sum to " << sum << ", expected 1";
    throw Error(ErrorKind::NotNormalized, os.str());
  }
  if (std::abs(sum - 1.0) > kZeroTol) {
    for (double& v : raw) v /= sum;
  }
  std::sort(raw.begin(), raw.end());
  return Spectrum(std::move(raw));
}

std::size_t Spectrum::rank() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return v > kZeroTol; }));
}

ObservableSpectrum::ObservableSpectrum(std::vector<double> distinct,
                                       std::vector<std::size_t> multiplicities)
    : distinct_(std::move(distinct)), multiplicities_(std::move(multiplicities)) {
  if (distinct_.empty())
    throw Error(ErrorKind::InvalidObservable, "observable has no eigenvalues");
  if (distinct_.size() != multiplicities_.size())
    throw Error(ErrorKind::InvalidObservable,
                "distinct eigenvalues and multiplicities differ in length");
  for (std::size_t i = 0; i < distinct_.size(); ++i) {
    if (!std::isfinite(distinct_[i]))
      throw Error(ErrorKind::InvalidObservable, "non-finite eigenvalue");
    if (i > 0 && !(distinct_[i] > distinct_[i - 1]))
      throw Error(ErrorKind::InvalidObservable, "distinct eigenvalues must be strictly increasing");
    if (multiplicities_[i] == 0)
      throw Error(ErrorKind::InvalidObservable, "multiplicities must be at least 1");
    dim_ += multiplicities_[i];
  }
}

ObservableSpectrum ObservableSpectrum::from_eigenvalues(std::vector<double> eigenvalues,
                                                        double tol) {
  if (eigenvalues.empty())
    throw Error(ErrorKind::InvalidObservable, "observable has no eigenvalues");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  std::vector<double> distinct;
  std::vector<std::size_t> mult;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= eigenvalues.size(); ++i) {
    if (i == eigenvalues.size() || eigenvalues[i] - eigenvalues[i - 1] > tol) {
      double mean = 0.0;
      for (std::size_t k = start; k < i; ++k) mean += eigenvalues[k];
      distinct.push_back(mean / static_cast<double>(i - start));
      mult.push_back(i - start);
      start = i;
    }
  }
  return ObservableSpectrum(std::move(distinct), std::move(mult));
}

std::vector<double> ObservableSpectrum::expanded() const {
  std::vector<double> out;
  out.reserve(dim_);
  for (std::size_t i = 0; i < distinct_.size(); ++i)
    out.insert(out.end(), multiplicities_[i], distinct_[i]);
  return out;
}

std::vector<std::size_t> ObservableSpectrum::cumulative() const {
  std::vector<std::size_t> mu(multiplicities_.size());
  std::partial_sum(multiplicities_.begin(), multiplicities_.end(), mu.begin());
  return mu;
}

std::string_view to_string(StateClass c) {
  switch (c) {
    case StateClass::Pure: return "Pure";
    case StateClass::MixedNondegenerate: return "Mixed";
    case StateClass::MaximallyMixed: return "MaximallyMixed";
    case StateClass::MixedDegenerate: return "MixedDegenerate";
  }
  return "Unknown";
}

StateClass classify(const Spectrum& s) {
  const auto v = s.values();
  if (v.back() >= 1.0 - kZeroTol) return StateClass::Pure;
  const double flat = 1.0 / static_cast<double>(v.size());
  if (std::all_of(v.begin(), v.end(), [flat](double x) { return std::abs(x - flat) <= kZeroTol; }))
    return StateClass::MaximallyMixed;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] <= kZeroTol) return StateClass::MixedDegenerate;
  return StateClass::MixedNondegenerate;
}

CompositeSpectra composite(const Spectrum& sys, const Spectrum& ctrl,
                           const ObservableSpectrum& obs) {
  if (obs.dim() != sys.dim()) {
    std::ostringstream os;
    os << "observable dimension " << obs.dim() << " != system dimension " << sys.dim();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  std::vector<double> products;
  products.reserve(sys.dim() * ctrl.dim());
  for (double p : sys.values())
    for (double q : ctrl.values()) products.push_back(p * q);

  std::vector<double> theta;
  theta.reserve(products.size());
  const auto distinct = obs.distinct();
  const auto mult = obs.multiplicities();
  for (std::size_t i = 0; i < distinct.size(); ++i)
    theta.insert(theta.end(), mult[i] * ctrl.dim(), distinct[i]);

  return CompositeSpectra{Spectrum::from_values(std::move(products)), std::move(theta),
                          sys.dim(), ctrl.dim()};
}

double hartley_entropy(const Spectrum& s) {
  return std::log2(static_cast<double>(s.rank()));
}

std::uint64_t GroupedSpectrum::dim() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double GroupedSpectrum::total() const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    sum += values[i] * static_cast<double>(counts[i]);
  return sum;
}

Spectrum GroupedSpectrum::expand() const {
  std::vector<double> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < values.size(); ++i) out.insert(out.end(), counts[i], values[i]);
  return Spectrum::from_values(std::move(out));
}

GroupedSpectrum group(const Spectrum& s) {
  GroupedSpectrum g;
  for (double v : s.values()) {
    if (!g.values.empty() && g.values.back() == v) {
      ++g.counts.back();
    } else {
      g.values.push_back(v);
      g.counts.push_back(1);
    }
  }
  return g;
}

GroupedSpectrum tensor(const GroupedSpectrum& a, const GroupedSpectrum& b) {
  std::vector<std::pair<double, std::uint64_t>> items;
  items.reserve(a.values.size() * b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    for (std::size_t j = 0; j < b.values.size(); ++j)
      items.emplace_back(a.values[i] * b.values[j], a.counts[i] * b.counts[j]);
  std::sort(items.begin(), items.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  GroupedSpectrum out;
  out.values.reserve(items.size());
  out.counts.reserve(items.size());
  for (const auto& [v, c] : items) {
    out.values.push_back(v);
    out.counts.push_back(c);
  }
  return out;
}

}  // namespace qkb
