#pragma once

#include <span>
#include <string>

#include "json.hpp"

#include "qkb/bounds.hpp"
#include "qkb/thermal.hpp"
#include "qkb/topology.hpp"
#include "qkb/verifier.hpp"

namespace qkb {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits.
double round12(double x);

/// Rounded number, or the strings "inf" / "-inf".
Json number_json(double x);

/// Inverse of number_json.
double number_from_json(const Json& j);

/// "%.12g"
std::string format12(double x);

Json to_json(const BoundsReport& r);
BoundsReport bounds_report_from_json(const Json& j);

Json to_json(const BandStructure& b);
Json to_json(const TopologyReport& t);
Json to_json(const Certificate& c);
Json to_json(const CurvePoint& p);
Json to_json(std::span<const CurvePoint> points);

/// Header lambda_c,j_max,j_min,ckb_max,gap_to_ckb and one row per point.
std::string curve_csv(std::span<const CurvePoint> points);

/// Header iter,yield,grad_norm.
std::string trace_csv(const AscentTrace& t);

/// Integer if the denominator is one, else "num/den".
Json rational_json(const Rational& r);

}  // namespace qkb
