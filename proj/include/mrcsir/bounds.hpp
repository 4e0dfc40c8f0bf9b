#pragma once

#include <limits>
#include <vector>

#include "mrcsir/core.hpp"

namespace mrcsir {

/// L(s) = exp(-c_scale * s^beta), the Laplace transform of Poisson shot
/// noise with Rayleigh fading (beta = 2/alpha).
struct LaplaceSpec {
  double c_scale = 0.0;
  double beta = 0.5;

  void validate() const;
};

/// Derivatives d^k L / ds^k at `s` for k = 0 .. size()-1.
struct DerivativeTable {
  double s = 0.0;
  std::vector<double> values;
  /// 1 - values[0], carried separately so that outage probabilities near
  /// zero keep their relative accuracy. NaN means "use 1 - values[0]".
  double complement0 = std::numeric_limits<double>::quiet_NaN();

  /// values[0] in (0, 1] and (-1)^k values[k] >= 0 for every k.
  bool completely_monotone() const;
};

/// Derivatives of exp(-c s^beta) through the complete Bell polynomial
/// recurrence B_{k+1} = sum_j C(k, j) B_{k-j} g_{j+1}, where
/// g_j = d^j/ds^j (-c s^beta). Cost O(K^2).
DerivativeTable exp_power_derivatives(const LaplaceSpec& spec, double s, int K);

/// P((g_1 + ... + g_N) >= s U) = sum_{k<N} (-1)^k s^k / k! L_U^(k)(s)
/// for i.i.d. unit-mean exponential g_n independent of U.
Probability ccdf_from_laplace(const DerivativeTable& table, int N);
/// Complement of ccdf_from_laplace, summed without the leading 1.
Probability cdf_from_laplace(const DerivativeTable& table, int N);

/// Full-correlation model: every antenna sees the same interference.
Probability ccdf_fc(double T, const SystemParams& p);
Probability cdf_fc(double T, const SystemParams& p);
/// N = 2 closed form exp(-x)(1 + (2/alpha) x), x = c d^2 T^(2/alpha).
Probability ccdf_fc_n2(double T, const SystemParams& p);

/// E[h_max^(2/alpha)] for h_max the maximum of N unit-mean exponentials.
double hmax_moment(int N, double alpha);

/// Min-fading model; stochastically dominates the exact SIR.
Probability ccdf_min(double T, const SystemParams& p);
Probability cdf_min(double T, const SystemParams& p);
/// Max-fading model; stochastically dominated by the exact SIR.
Probability ccdf_max(double T, const SystemParams& p);
Probability cdf_max(double T, const SystemParams& p);

/// Coefficients of the N = 2 and N = 4 closed forms. Both include d^2, so
/// each bound is a polynomial in x = c * T^(2/alpha) times exp(-x).
struct MinMaxCoefficients {
  double c_min;  // upper CCDF bound
  double c_max;  // lower CCDF bound
};

struct CcdfInterval {
  Probability lower;
  Probability upper;
};

/// Closed form for N = 2: exp(-c d^2 T^b)(alpha + 2 c d^2 T^b)/alpha with
/// c1 = 2^(1-2/alpha) pi^2 lambda csc(2pi/alpha)/alpha (upper) and
/// c2 = (4 - 2^(1-2/alpha)) pi^2 lambda csc(2pi/alpha)/alpha (lower).
CcdfInterval minmax_closed_n2(double T, const SystemParams& p);
MinMaxCoefficients minmax_coefficients_n2(const SystemParams& p);

/// Closed-form quartic for N = 4. The returned coefficients include d^2.
CcdfInterval minmax_closed_n4(double T, const SystemParams& p);
MinMaxCoefficients minmax_coefficients_n4(const SystemParams& p);

/// D(alpha, N) = sum_{k<N} (-1)^k / k! (1 + 2/alpha - k)_k, rising factorial.
double d_alpha_n(double alpha, int N);

struct SlopeBounds {
  double lower_coeff;
  double upper_coeff;
};

/// Limits of P(SIR <= T)/c' as c' = pi lambda d^2 T^(2/alpha) Gamma(1-2/alpha) -> 0:
/// lower = N^(-2/alpha) Gamma(1+2/alpha) D, upper = E[h_max^(2/alpha)] D.
SlopeBounds asymptotic_cdf_slope_bounds(double alpha, int N);

}  // namespace mrcsir
