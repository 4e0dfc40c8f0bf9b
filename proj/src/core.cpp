#include "mrcsir/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mrcsir {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 2.0) || !std::isfinite(alpha)) {
    std::ostringstream os;
    os << "path-loss exponent must be > 2, got " << alpha;
    throw Error(Errc::AlphaOutOfRange, os.str());
  }
}

}  // namespace

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::NonPositive: return "NonPositive";
    case Errc::ZeroAntennas: return "ZeroAntennas";
    case Errc::AlphaMismatch: return "AlphaMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case Errc::MaxSubdivisionsExceeded: return "MaxSubdivisionsExceeded";
    case Errc::OutOfUnitInterval: return "OutOfUnitInterval";
    case Errc::BracketFailure: return "BracketFailure";
    case Errc::NotConverged: return "NotConverged";
    case Errc::DegenerateDesign: return "DegenerateDesign";
    case Errc::DivisionByNearZero: return "DivisionByNearZero";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

Probability::Probability(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << "probability " << v << " outside [0, 1]";
    throw Error(Errc::OutOfUnitInterval, os.str());
  }
  value_ = v;
}

Probability Probability::checked(double v, double slack) {
  if (!(v >= -slack && v <= 1.0 + slack)) {
    std::ostringstream os;
    os << "probability " << v << " outside [0, 1] by more than " << slack;
    throw Error(Errc::OutOfUnitInterval, os.str());
  }
  return from_raw(std::clamp(v, 0.0, 1.0));
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ExactCorrelated: return "exact";
    case ModelKind::FullCorrelation: return "full-correlation";
    case ModelKind::NoCorrelation: return "no-correlation";
    case ModelKind::MinFading: return "min-fading";
    case ModelKind::MaxFading: return "max-fading";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "exact" || name == "exact-correlated") return ModelKind::ExactCorrelated;
  if (name == "fc" || name == "full-correlation") return ModelKind::FullCorrelation;
  if (name == "nc" || name == "no-correlation") return ModelKind::NoCorrelation;
  if (name == "min" || name == "min-fading") return ModelKind::MinFading;
  if (name == "max" || name == "max-fading") return ModelKind::MaxFading;
  throw Error(Errc::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

const SystemParams& validate_params(const SystemParams& p) {
  require_alpha(p.alpha);
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) {
    throw Error(Errc::NonPositive, "density lambda must be > 0");
  }
  if (!(p.d > 0.0) || !std::isfinite(p.d)) {
    throw Error(Errc::NonPositive, "link distance d must be > 0");
  }
  if (p.n_antennas < 1) {
    throw Error(Errc::ZeroAntennas, "antenna count must be >= 1");
  }
  return p;
}

double interference_scale_c(double lambda, double alpha) {
  require_alpha(alpha);
  if (!(lambda >= 0.0)) {
    throw Error(Errc::NonPositive, "density lambda must be >= 0");
  }
  constexpr double pi = std::numbers::pi;
  return (2.0 / alpha) * pi * pi * lambda / std::sin(2.0 * pi / alpha);
}

Probability single_antenna_ccdf(double T, const SystemParams& p) {
  validate_params(p);
  if (!(T >= 0.0)) throw Error(Errc::InvalidArgument, "threshold must be >= 0");
  const double x = interference_scale_c(p.lambda, p.alpha) * p.d * p.d * std::pow(T, 2.0 / p.alpha);
  return Probability(std::exp(-x));
}

Probability single_antenna_cdf(double T, const SystemParams& p) {
  validate_params(p);
  if (!(T >= 0.0)) throw Error(Errc::InvalidArgument, "threshold must be >= 0");
  const double x = interference_scale_c(p.lambda, p.alpha) * p.d * p.d * std::pow(T, 2.0 / p.alpha);
  return Probability(-std::expm1(-x));
}

SystemParams scale_transform(const SystemParams& p, double kappa) {
  if (!(kappa > 0.0)) throw Error(Errc::NonPositive, "scale factor must be > 0");
  SystemParams out = p;
  out.lambda = p.lambda / (kappa * kappa);
  out.d = p.d * kappa;
  return out;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace mrcsir
