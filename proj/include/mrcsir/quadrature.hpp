#pragma once

#include <functional>
#include <span>

#include "mrcsir/core.hpp"

namespace mrcsir {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;
  /// Relative tolerance for the outer z-integral of the dual-antenna CCDF.
  double outer_rel_tol = 1e-6;
  /// Evaluate the z > T part of the dual-antenna integral in closed form
  /// (it integrates to exp(-c d^2 T^(2/alpha))). When false it is integrated
  /// numerically like the rest; used to cross-check the identity.
  bool analytic_tail = true;

  void validate() const;
};

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  int subdivisions = 0;
  /// False when max_subdivisions was reached before the tolerance was met;
  /// `value` is then the best estimate available.
  bool converged = true;
};

using Integrand = std::function<double(double)>;

/// Adaptive 15-point Gauss-Kronrod quadrature with bisection of the panel
/// carrying the largest error.
///
/// Infinite limits are mapped onto a finite interval before subdivision:
///   [a, inf)   : x = a + u / (1 - u),       u in [0, 1)
///   (-inf, b]  : x = b - u / (1 - u),       u in [0, 1)
///   (-inf, inf): x = u / (1 - u^2),         u in (-1, 1)
/// Nodes are strictly interior, so `f` is never evaluated at an infinite
/// point. `breakpoints` (finite, inside (lo, hi)) seed the initial panels.
///
/// Throws Errc::NonFiniteIntegrand if `f` returns NaN or +-inf.
IntegrationResult integrate_adaptive(const Integrand& f, double lo, double hi,
                                     const QuadratureConfig& cfg = {},
                                     std::span<const double> breakpoints = {});

// Dual-antenna exact distribution. In all of these, z is the value of the
// second branch's SIR and (T - z)^+ the residual threshold left for the first.

/// C(z, T) = exp{-2 pi lambda * int_0^inf r (1 - 1/((1 + z w)(1 + (T-z)^+ w))) dr},
/// w = (d/r)^alpha, by numerical quadrature. C(0, T) is the single-antenna CCDF.
double c_factor(double z, double T, const SystemParams& p, const QuadratureConfig& cfg = {});

/// Closed form of c_factor for alpha == 4. Throws Errc::AlphaMismatch otherwise.
double c_factor_alpha4(double z, double T, const SystemParams& p);

/// int_0^inf r^(1-alpha) d^alpha / (1 + z w)^2 / (1 + (T-z)^+ w) dr.
/// Uses the Beta-function closed form when z > T unless `force_numeric`.
double inner_r_integral(double z, double T, const SystemParams& p, const QuadratureConfig& cfg = {},
                        bool force_numeric = false);

struct ExactN2Result {
  Probability ccdf;
  Probability cdf;  // computed directly, accurate when the outage is tiny
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// P(SIR >= T) for two-antenna MRC with spatially correlated interference.
ExactN2Result exact_n2(double T, const SystemParams& p, const QuadratureConfig& cfg = {});
Probability ccdf_exact_n2(double T, const SystemParams& p, const QuadratureConfig& cfg = {});
Probability cdf_exact_n2(double T, const SystemParams& p, const QuadratureConfig& cfg = {});

/// Same distribution for alpha == 4 using the closed-form C and a single
/// outer quadrature. Throws Errc::AlphaMismatch for other alpha.
ExactN2Result exact_n2_alpha4(double T, const SystemParams& p, const QuadratureConfig& cfg = {});
Probability ccdf_exact_n2_alpha4(double T, const SystemParams& p, const QuadratureConfig& cfg = {});

/// Integrand factor (z^1.5 - 3 sqrt(z) w + 2 w^1.5) / (z - w)^2 with
/// w = (T - z)^+, evaluated in a form that is regular at z == w.
double alpha4_kernel(double z, double T);

}  // namespace mrcsir
