#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mrcsir {

enum class Errc {
  AlphaOutOfRange,
  NonPositive,
  ZeroAntennas,
  AlphaMismatch,
  InvalidArgument,
  NonFiniteIntegrand,
  MaxSubdivisionsExceeded,
  OutOfUnitInterval,
  BracketFailure,
  NotConverged,
  DegenerateDesign,
  DivisionByNearZero,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Link and network geometry shared by every evaluator.
///
/// All quantities are unit-free: `lambda` is in points per unit area and `d`
/// in the same length unit. Every formula depends on `lambda` and `d` only
/// through the product lambda * d^2.
struct SystemParams {
  double lambda = 1e-3;
  double alpha = 4.0;
  double d = 10.0;
  int n_antennas = 2;

  bool operator==(const SystemParams&) const = default;
};

/// A value in [0, 1].
class Probability {
 public:
  constexpr Probability() = default;
  /// Throws Errc::OutOfUnitInterval unless 0 <= v <= 1.
  explicit Probability(double v);

  /// Accepts v within `slack` of [0, 1] and clamps it; anything further out
  /// (or NaN) throws Errc::OutOfUnitInterval.
  static Probability checked(double v, double slack);

  constexpr double value() const noexcept { return value_; }
  constexpr Probability complement() const noexcept { return from_raw(1.0 - value_); }

  friend constexpr bool operator==(Probability, Probability) = default;

 private:
  static constexpr Probability from_raw(double v) noexcept {
    Probability p;
    p.value_ = v;
    return p;
  }
  double value_ = 0.0;
};

/// Correlation model of the per-antenna interference.
enum class ModelKind {
  ExactCorrelated,  // shared locations, independent fading per antenna
  FullCorrelation,  // identical interference on every antenna
  NoCorrelation,    // independent field per antenna
  MinFading,        // per-interferer minimum over the N gains
  MaxFading,        // per-interferer maximum over the N gains
};

std::string_view to_string(ModelKind kind);
/// Accepts the names produced by to_string(ModelKind) plus short aliases
/// ("exact", "fc", "nc", "min", "max").
ModelKind parse_model_kind(std::string_view name);

const SystemParams& validate_params(const SystemParams& p);

/// c = (2/alpha) pi^2 lambda csc(2 pi / alpha), the coefficient of the
/// stretched-exponential Laplace transform of Poisson-Rayleigh interference.
double interference_scale_c(double lambda, double alpha);

/// exp(-c d^2 T^(2/alpha)): success probability of a single-antenna link.
Probability single_antenna_ccdf(double T, const SystemParams& p);

/// 1 - single_antenna_ccdf, computed without cancellation at small outage.
Probability single_antenna_cdf(double T, const SystemParams& p);

/// (lambda / kappa^2, alpha, kappa d, N). Leaves every CCDF unchanged.
SystemParams scale_transform(const SystemParams& p, double kappa);

double db_to_linear(double db);
double linear_to_db(double x);

}  // namespace mrcsir
