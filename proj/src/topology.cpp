#include "qkb/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace qkb {

std::string_view to_string(TopologySource s) {
  return s == TopologySource::Table ? "table" : "bruteforce";
}

namespace {

BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

BigInt pow_int(std::size_t base, std::size_t exp) {
  BigInt out = 1;
  for (std::size_t k = 0; k < exp; ++k) out *= base;
  return out;
}

bool supported(StateClass c) { return c != StateClass::MixedDegenerate; }

}  // namespace

BigInt multinomial(std::span<const std::size_t> parts) {
  const std::size_t n = std::accumulate(parts.begin(), parts.end(), std::size_t{0});
  BigInt out = factorial(n);
  for (std::size_t k : parts) out /= factorial(k);
  return out;
}

TopologyReport topology_from_table(StateClass sys_class, StateClass ctrl_class,
                                   std::size_t n_s, std::size_t n_c,
                                   const ObservableSpectrum& obs) {
  if (!supported(sys_class) || !supported(ctrl_class)) {
    throw Error(ErrorKind::UnsupportedClass,
                "closed forms assume pure, non-degenerate mixed, or maximally mixed states");
  }
  if (obs.dim() != n_s) throw Error(ErrorKind::DimensionMismatch, "observable dimension != N_s");

  using SC = StateClass;
  const auto mult = obs.multiplicities();
  const std::size_t r = obs.levels();
  const std::size_t n = n_s * n_c;
  const std::size_t n_1 = mult.front();
  BigInt sum_sq = 0;
  for (std::size_t m : mult) sum_sq += BigInt(m) * m;
  const BigInt n_s_big = n_s;
  const BigInt n_c_big = n_c;
  const BigInt pure_codim = 2 * (n_s_big - n_1);
  const BigInt mixed_codim = (n_s_big * n_s_big - sum_sq) * n_c_big * n_c_big;
  const std::size_t smallest_block = *std::min_element(mult.begin(), mult.end()) * n_c;

  TopologyReport rep;
  rep.sys_class = sys_class;
  rep.ctrl_class = ctrl_class;
  rep.source = TopologySource::Table;

  if (ctrl_class == SC::Pure) {
    if (sys_class == SC::Pure) {
      rep.n_critical = Rational(r);
      rep.d_max = pure_codim * n_c_big;
    } else if (sys_class == SC::MixedNondegenerate) {
      rep.n_critical = Rational(pow_int(r, n_s));
      rep.d_max = pure_codim * n;
      rep.formula_domain_ok = smallest_block >= n_s;
    } else {
      rep.n_critical = Rational(factorial(n_s + r - 1) / (factorial(n_s) * factorial(r - 1)));
      rep.d_max = pure_codim * n;
      rep.formula_domain_ok = smallest_block >= n_s;
    }
    if (!rep.formula_domain_ok)
      rep.note = "a degeneracy block n_i*N_c is smaller than N_s; the closed form overcounts";
  } else if (ctrl_class == SC::MixedNondegenerate) {
    if (sys_class == SC::Pure) {
      rep.n_critical = Rational(pow_int(r, n_c));
      rep.d_max = pure_codim * n_c_big * n_c_big;
    } else if (sys_class == SC::MixedNondegenerate) {
      std::vector<std::size_t> blocks;
      for (std::size_t m : mult) blocks.push_back(m * n_c);
      rep.n_critical = Rational(multinomial(blocks));
      rep.d_max = mixed_codim;
    } else {
      rep.d_max = mixed_codim;
      rep.note = "no closed form for the number of critical submanifolds";
    }
  } else {
    if (sys_class == SC::Pure) {
      // Printed with N_s! in the denominator; the multiset count uses N_c!.
      rep.n_critical = Rational(factorial(n_c + r - 1), factorial(n_s) * factorial(r - 1));
      rep.n_critical_multiset = factorial(n_c + r - 1) / (factorial(n_c) * factorial(r - 1));
      rep.d_max = pure_codim * n_c_big * n_c_big;
      rep.note = "printed closed form divides by N_s!; n_critical_multiset divides by N_c!";
    } else {
      rep.d_max = mixed_codim;
      rep.note = "no closed form for the number of critical submanifolds";
    }
  }
  return rep;
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "non-finite value");
  if (x == 0.0) return Rational(0);
  int e = 0;
  const double m = std::frexp(x, &e);
  const auto mantissa = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  BigInt num = mantissa;
  if (e >= 0) return Rational(BigInt(num << e));
  return Rational(num, BigInt(1) << (-e));
}

namespace {

struct Problem {
  std::vector<BigInt> row_weight;          // P value * common denominator
  std::vector<std::uint64_t> row_count;    // multiplicity of each P value
  std::vector<BigInt> block_value;         // theta value * common denominator
  std::vector<std::uint64_t> block_size;   // n_i * N_c
  Rational scale;                          // yield = integer / scale
  std::size_t dim = 0;
};

BigInt lcm_of_denominators(std::span<const Rational> xs) {
  BigInt l = 1;
  for (const auto& x : xs) {
    const BigInt d = boost::multiprecision::denominator(x);
    l = l / boost::multiprecision::gcd(l, d) * d;
  }
  return l;
}

Problem build_problem(std::span<const Rational> sys, std::span<const Rational> ctrl,
                      std::span<const Rational> theta, std::span<const std::size_t> mult) {
  if (theta.size() != mult.size())
    throw Error(ErrorKind::InvalidObservable, "distinct eigenvalues and multiplicities differ in length");
  const std::size_t n_s = std::accumulate(mult.begin(), mult.end(), std::size_t{0});
  if (n_s != sys.size())
    throw Error(ErrorKind::DimensionMismatch, "observable dimension != system dimension");
  const std::size_t n = sys.size() * ctrl.size();
  if (n > kMaxEnumerationDim) {
    std::ostringstream os;
    os << "composite dimension " << n << " exceeds " << kMaxEnumerationDim;
    throw Error(ErrorKind::TooLarge, os.str());
  }

  std::map<Rational, std::uint64_t> groups;
  for (const auto& p : sys)
    for (const auto& q : ctrl) ++groups[p * q];

  std::vector<Rational> values;
  Problem prob;
  prob.dim = n;
  for (const auto& [v, c] : groups) {
    if (v == 0) continue;  // zeros fill leftover capacity without changing the yield
    values.push_back(v);
    prob.row_count.push_back(c);
  }
  const BigInt p_den = lcm_of_denominators(values);
  for (const auto& v : values)
    prob.row_weight.push_back(boost::multiprecision::numerator(v) *
                              (p_den / boost::multiprecision::denominator(v)));

  const BigInt t_den = lcm_of_denominators(theta);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    prob.block_value.push_back(boost::multiprecision::numerator(theta[i]) *
                               (t_den / boost::multiprecision::denominator(theta[i])));
    prob.block_size.push_back(mult[i] * ctrl.size());
  }
  prob.scale = Rational(p_den * t_den);
  return prob;
}

template <class Acc>
class Enumerator {
 public:
  Enumerator(const Problem& prob) : count_(prob.row_count), cap_(prob.block_size) {
    weight_.resize(prob.row_weight.size());
    for (std::size_t row = 0; row < prob.row_weight.size(); ++row)
      for (const auto& t : prob.block_value)
        weight_[row].push_back(static_cast<Acc>(prob.row_weight[row] * t));
  }

  std::vector<Acc> run() {
    next_row(0, Acc(0));
    return std::move(out_);
  }

 private:
  void next_row(std::size_t row, const Acc& acc) {
    if (row == weight_.size()) {
      out_.push_back(acc);
      return;
    }
    place(row, 0, count_[row], acc);
  }

  void place(std::size_t row, std::size_t block, std::uint64_t left, const Acc& acc) {
    if (left == 0) {
      next_row(row + 1, acc);
      return;
    }
    if (block + 1 == cap_.size()) {
      if (left > cap_[block]) return;
      cap_[block] -= left;
      next_row(row + 1, acc + weight_[row][block] * static_cast<Acc>(left));
      cap_[block] += left;
      return;
    }
    const std::uint64_t hi = std::min(left, cap_[block]);
    for (std::uint64_t x = 0; x <= hi; ++x) {
      cap_[block] -= x;
      place(row, block + 1, left - x, acc + weight_[row][block] * static_cast<Acc>(x));
      cap_[block] += x;
    }
  }

  std::vector<std::vector<Acc>> weight_;
  std::vector<std::uint64_t> count_;
  std::vector<std::uint64_t> cap_;
  std::vector<Acc> out_;
};

template <class Acc>
std::vector<Acc> enumerate_sorted(const Problem& prob) {
  std::vector<Acc> sums = Enumerator<Acc>(prob).run();
  std::sort(sums.begin(), sums.end());
  return sums;
}

// Every partial sum is bounded by dim * max|weight|.
bool fits_int64(const Problem& prob) {
  BigInt max_w = 0;
  for (const auto& w : prob.row_weight)
    for (const auto& t : prob.block_value) max_w = std::max(max_w, BigInt(abs(w * t)));
  return max_w * prob.dim < BigInt(std::numeric_limits<std::int64_t>::max() / 2);
}

template <class Acc>
CriticalCount count_with(const Problem& prob) {
  auto sums = enumerate_sorted<Acc>(prob);
  CriticalCount c;
  c.assignments = sums.size();
  c.distinct_values = static_cast<std::size_t>(std::unique(sums.begin(), sums.end()) - sums.begin());
  return c;
}

template <class Acc>
std::vector<Rational> values_with(const Problem& prob) {
  auto sums = enumerate_sorted<Acc>(prob);
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  std::vector<Rational> out;
  out.reserve(sums.size());
  for (const auto& s : sums) out.push_back(Rational(BigInt(s)) / prob.scale);
  return out;
}

std::vector<Rational> to_rationals(std::span<const double> xs) {
  std::vector<Rational> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(exact_rational(x));
  return out;
}

}  // namespace

CriticalCount count_critical_values_exact(std::span<const Rational> sys,
                                          std::span<const Rational> ctrl,
                                          std::span<const Rational> theta_distinct,
                                          std::span<const std::size_t> multiplicities) {
  const Problem prob = build_problem(sys, ctrl, theta_distinct, multiplicities);
  return fits_int64(prob) ? count_with<std::int64_t>(prob) : count_with<BigInt>(prob);
}

std::vector<Rational> critical_values_exact(std::span<const Rational> sys,
                                            std::span<const Rational> ctrl,
                                            std::span<const Rational> theta_distinct,
                                            std::span<const std::size_t> multiplicities) {
  const Problem prob = build_problem(sys, ctrl, theta_distinct, multiplicities);
  return fits_int64(prob) ? values_with<std::int64_t>(prob) : values_with<BigInt>(prob);
}

std::size_t count_critical_values_bruteforce(const Spectrum& sys, const Spectrum& ctrl,
                                             const ObservableSpectrum& obs) {
  const auto p = to_rationals(sys.values());
  const auto q = to_rationals(ctrl.values());
  const auto t = to_rationals(obs.distinct());
  return count_critical_values_exact(p, q, t, obs.multiplicities()).distinct_values;
}

std::vector<double> critical_values(const Spectrum& sys, const Spectrum& ctrl,
                                    const ObservableSpectrum& obs) {
  const auto p = to_rationals(sys.values());
  const auto q = to_rationals(ctrl.values());
  const auto t = to_rationals(obs.distinct());
  std::vector<double> out;
  for (const auto& v : critical_values_exact(p, q, t, obs.multiplicities()))
    out.push_back(v.convert_to<double>());
  return out;
}

TopologyReport topology(const Spectrum& sys, const Spectrum& ctrl, const ObservableSpectrum& obs) {
  const StateClass sc = classify(sys);
  const StateClass cc = classify(ctrl);
  TopologyReport rep;
  if (supported(sc) && supported(cc)) {
    rep = topology_from_table(sc, cc, sys.dim(), ctrl.dim(), obs);
    if (rep.n_critical) return rep;
  } else {
    rep.sys_class = sc;
    rep.ctrl_class = cc;
    rep.note = "degenerate mixed spectrum: no closed form applies";
  }
  if (sys.dim() * ctrl.dim() <= kMaxEnumerationDim) {
    rep.n_critical = Rational(count_critical_values_bruteforce(sys, ctrl, obs));
    rep.source = TopologySource::BruteForce;
  }
  return rep;
}

}  // namespace qkb
