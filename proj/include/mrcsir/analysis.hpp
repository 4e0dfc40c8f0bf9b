#pragma once

#include <span>
#include <vector>

#include "mrcsir/core.hpp"
#include "mrcsir/quadrature.hpp"
#include "mrcsir/simulator.hpp"

namespace mrcsir {

/// Analytic outage P(SIR < T) for the models that have one:
/// ExactCorrelated (N = 1 closed form, N = 2 quadrature), FullCorrelation,
/// MinFading and MaxFading. Anything else throws Errc::InvalidArgument.
Probability outage_probability(double T, const SystemParams& p, ModelKind model,
                               const QuadratureConfig& cfg = {});

/// True when outage_probability supports (model, N).
bool has_analytic_outage(ModelKind model, int N);

struct CriticalDensityResult {
  double lambda_eps = 0.0;
  double epsilon = 0.0;
  int iterations = 0;
  /// outage(lambda_eps) - epsilon.
  double residual = 0.0;
};

/// Largest density with single-antenna outage epsilon:
/// -log(1 - eps) / (c(1, alpha) d^2 T^(2/alpha)).
double critical_density_single(double epsilon, double T, double alpha, double d);

struct CriticalDensityOptions {
  double tol = 1e-9;
  int max_iterations = 60;
  /// Doublings of the upper bracket allowed before Errc::BracketFailure.
  int max_expansions = 40;
  QuadratureConfig quadrature{};
};

/// Solves outage(lambda) = epsilon by bisection on (0, lambda_hi] with
/// lambda_hi = 4 critical_density_single(...), doubled while the outage
/// there is still below epsilon. `p.lambda` is ignored.
CriticalDensityResult critical_density(double epsilon, double T, const SystemParams& p, ModelKind model,
                                       const CriticalDensityOptions& opt = {});

struct CriticalDensityEstimate {
  double lambda_eps = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Density the samples were drawn at.
  double lambda_ref = 0.0;
  std::int64_t n = 0;
};

/// Monte Carlo critical density.
///
/// SIR samples are drawn once at lambda_ref. Scaling lambda by k multiplies
/// every SIR by k^(-alpha/2), so the epsilon-quantile q of those samples gives
/// lambda_eps = lambda_ref (q / T)^(2/alpha). The interval comes from the
/// binomial order statistics around the quantile. When `lambda_ref` is not
/// positive it is taken from the min/max bound solutions.
CriticalDensityEstimate critical_density_mc(double epsilon, double T, const SystemParams& p, ModelKind model,
                                            const MonteCarloConfig& mc, double lambda_ref = 0.0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (x, y).
SlopeFit fit_line(std::span<const double> x, std::span<const double> y);

/// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Fit of log P(SIR < T) against log lambda over `lambda_grid` (default:
/// 8 points from 1e-7 to 1e-5). `p.lambda` is ignored.
SlopeFit scdo_slope(double T, const SystemParams& p, std::span<const double> lambda_grid = {},
                    ModelKind model = ModelKind::ExactCorrelated, const QuadratureConfig& cfg = {});

struct A1A2 {
  double a1 = 0.0;
  double a2 = 0.0;
  double a1_error = 0.0;
};

/// Coefficients of the small-density expansion
/// P(SIR < T) = lambda (A2 - A1) + O(lambda^2) for N = 2:
/// A1 = 2 pi int_0^T inner_r_integral(z) dz, A2 = c(1, alpha) d^2 T^(2/alpha).
A1A2 a1_a2(double T, double alpha, double d, const QuadratureConfig& cfg = {});

/// P(SIR_FC < T) / P(SIR < T). N must be 1 or 2.
double delta_fc(double T, const SystemParams& p, const QuadratureConfig& cfg = {});

/// P(SIR_max < T) / P(SIR_min < T); exactly 1 for N = 1.
double delta_minmax(double T, const SystemParams& p);

struct SqrtFit {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> residuals;
  /// Standard errors; zero when there are only two points.
  double se_a = 0.0;
  double se_b = 0.0;
};

/// Least squares for gain ~ a sqrt(N) + b.
SqrtFit sqrt_fit(std::span<const int> n_list, std::span<const double> gains);

}  // namespace mrcsir
