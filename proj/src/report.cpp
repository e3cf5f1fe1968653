#include "qkb/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace qkb {

std::string format12(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::strtod(format12(x).c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;  // drop negative zero
}

Json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round12(x);
}

double number_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::InvalidInstance, "expected a number, got \"" + s + "\"");
  }
  if (!j.is_number()) throw Error(ErrorKind::InvalidInstance, "expected a number");
  return j.get<double>();
}

namespace {

Json optional_index(const std::optional<std::size_t>& i) {
  return i ? Json(*i) : Json(nullptr);
}

std::optional<std::size_t> optional_index_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::size_t>();
}

std::string big_string(const BigInt& b) {
  std::ostringstream os;
  os << b;
  return os.str();
}

Json big_json(const BigInt& b) {
  if (b >= 0 && b <= std::numeric_limits<std::int64_t>::max()) return b.convert_to<std::int64_t>();
  return big_string(b);
}

}  // namespace

Json rational_json(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1) return big_json(boost::multiprecision::numerator(r));
  return big_string(boost::multiprecision::numerator(r)) + "/" +
         big_string(boost::multiprecision::denominator(r));
}

Json to_json(const BoundsReport& r) {
  Json j;
  j["ckb_max"] = number_json(r.ckb_max);
  j["ckb_min"] = number_json(r.ckb_min);
  j["kin_max"] = number_json(r.kin_max);
  j["kin_min"] = number_json(r.kin_min);
  j["qkb_max"] = number_json(r.qkb_max);
  j["qkb_min"] = number_json(r.qkb_min);
  j["surpass_upper"] = r.surpass_upper;
  j["surpass_lower"] = r.surpass_lower;
  j["reach_upper"] = r.reach_upper;
  j["reach_lower"] = r.reach_lower;
  j["witness_upper"] = optional_index(r.witness_upper);
  j["witness_lower"] = optional_index(r.witness_lower);
  return j;
}

BoundsReport bounds_report_from_json(const Json& j) {
  BoundsReport r;
  r.ckb_max = number_from_json(j.at("ckb_max"));
  r.ckb_min = number_from_json(j.at("ckb_min"));
  r.kin_max = number_from_json(j.at("kin_max"));
  r.kin_min = number_from_json(j.at("kin_min"));
  r.qkb_max = number_from_json(j.at("qkb_max"));
  r.qkb_min = number_from_json(j.at("qkb_min"));
  r.surpass_upper = j.at("surpass_upper").get<bool>();
  r.surpass_lower = j.at("surpass_lower").get<bool>();
  r.reach_upper = j.at("reach_upper").get<bool>();
  r.reach_lower = j.at("reach_lower").get<bool>();
  r.witness_upper = optional_index_from(j.at("witness_upper"));
  r.witness_lower = optional_index_from(j.at("witness_lower"));
  return r;
}

Json to_json(const BandStructure& b) {
  Json j;
  j["bandwidth"] = number_json(b.bandwidth);
  Json gaps = Json::array();
  for (double g : b.gaps) gaps.push_back(number_json(g));
  j["gaps"] = gaps;
  j["mu"] = b.mu;
  j["nu"] = b.nu;
  return j;
}

Json to_json(const TopologyReport& t) {
  Json j;
  j["n_critical"] = t.n_critical ? rational_json(*t.n_critical) : Json("unavailable");
  j["d_max"] = big_json(t.d_max);
  j["case_label"] = {std::string(to_string(t.sys_class)), std::string(to_string(t.ctrl_class))};
  j["source"] = std::string(to_string(t.source));
  j["formula_domain_ok"] = t.formula_domain_ok;
  if (t.n_critical_multiset) j["n_critical_multiset"] = big_json(*t.n_critical_multiset);
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Json to_json(const Certificate& c) {
  Json j;
  j["kin_max"] = number_json(c.kin_max);
  j["kin_min"] = number_json(c.kin_min);
  j["attained_max"] = number_json(c.attained_max);
  j["attained_min"] = number_json(c.attained_min);
  j["random_start_max"] = number_json(c.random_start_max);
  j["random_start_min"] = number_json(c.random_start_min);
  j["highest_seen"] = number_json(c.highest_seen);
  j["lowest_seen"] = number_json(c.lowest_seen);
  j["violation"] = c.violation;
  j["certificate"] = c.certificate;
  j["runs"] = c.runs;
  j["converged_runs"] = c.converged_runs;
  return j;
}

Json to_json(const CurvePoint& p) {
  Json j;
  j["lambda_c"] = number_json(p.lambda_c);
  j["j_max"] = number_json(p.j_max);
  j["j_min"] = number_json(p.j_min);
  j["ckb_max"] = number_json(p.ckb_max);
  j["gap_to_ckb"] = number_json(p.gap_to_ckb);
  return j;
}

Json to_json(std::span<const CurvePoint> points) {
  Json arr = Json::array();
  for (const auto& p : points) arr.push_back(to_json(p));
  return arr;
}

std::string curve_csv(std::span<const CurvePoint> points) {
  std::string out = "lambda_c,j_max,j_min,ckb_max,gap_to_ckb\n";
  for (const auto& p : points) {
    out += format12(p.lambda_c) + ',' + format12(p.j_max) + ',' + format12(p.j_min) + ',' +
           format12(p.ckb_max) + ',' + format12(p.gap_to_ckb) + '\n';
  }
  return out;
}

std::string trace_csv(const AscentTrace& t) {
  std::string out = "iter,yield,grad_norm\n";
  for (std::size_t k = 0; k < t.yields.size(); ++k)
    out += std::to_string(k) + ',' + format12(t.yields[k]) + ',' + format12(t.grad_norms[k]) + '\n';
  return out;
}

}  // namespace qkb
