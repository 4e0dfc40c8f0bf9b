#include "mrcsir/bounds.hpp"

#include <cmath>
#include <numbers>

#include "mrcsir/quadrature.hpp"

namespace mrcsir {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLaplaceSlack = 1e-9;

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_threshold(double T) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw Error(Errc::InvalidArgument, "threshold must be finite and >= 0");
}

// Derivative-sum evaluation of exp(-c s^beta) at s, for the bound models.
DerivativeTable stretched_table(double c_scale, double beta, double s, int N) {
  return exp_power_derivatives(LaplaceSpec{c_scale, beta}, s, N);
}

double c_max_scale(const SystemParams& p) {
  const double beta = 2.0 / p.alpha;
  return p.lambda * kPi * std::tgamma(1.0 - beta) * hmax_moment(p.n_antennas, p.alpha);
}

double closed_n2(double x, double alpha) { return std::exp(-x) * (alpha + 2.0 * x) / alpha; }

double closed_n4(double x, double alpha) {
  const double a2 = alpha * alpha;
  const double a3 = a2 * alpha;
  const double poly = 3.0 * a3 + 11.0 * a2 * x + 12.0 * alpha * x * (x - 1.0) + 4.0 * x * (1.0 - 3.0 * x + x * x);
  return std::exp(-x) * poly / (3.0 * a3);
}

CcdfInterval closed_interval(double T, const SystemParams& p, const MinMaxCoefficients& c,
                             double (*form)(double, double)) {
  require_threshold(T);
  const double tb = std::pow(T, 2.0 / p.alpha);
  return {Probability::checked(form(c.c_max * tb, p.alpha), kLaplaceSlack),
          Probability::checked(form(c.c_min * tb, p.alpha), kLaplaceSlack)};
}

void require_antennas(const SystemParams& p, int n) {
  validate_params(p);
  if (p.n_antennas != n) {
    throw Error(Errc::InvalidArgument, "closed form requires N = " + std::to_string(n));
  }
}

}  // namespace

void LaplaceSpec::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(Errc::InvalidArgument, "Laplace exponent must lie in (0, 1)");
  if (!(c_scale >= 0.0) || !std::isfinite(c_scale)) throw Error(Errc::InvalidArgument, "Laplace scale must be >= 0");
}

bool DerivativeTable::completely_monotone() const {
  if (values.empty() || !(values[0] > 0.0 && values[0] <= 1.0)) return false;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double signed_value = (k % 2 == 0) ? values[k] : -values[k];
    if (signed_value < 0.0) return false;
  }
  return true;
}

DerivativeTable exp_power_derivatives(const LaplaceSpec& spec, double s, int K) {
  spec.validate();
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(Errc::InvalidArgument, "evaluation point must be > 0");
  if (K < 1) throw Error(Errc::InvalidArgument, "need at least one derivative");

  // Work with s^j g_j = -x * beta (beta-1) ... (beta-j+1), x = c s^beta; the
  // Bell polynomials are homogeneous, so s^k B_k(g) = B_k(s g_1, s^2 g_2, ...).
  const double x = spec.c_scale * std::pow(s, spec.beta);
  std::vector<double> scaled_g(static_cast<std::size_t>(K));
  double falling = 1.0;
  for (int j = 1; j < K; ++j) {
    falling *= spec.beta - (j - 1);
    scaled_g[static_cast<std::size_t>(j)] = -x * falling;
  }

  std::vector<double> bell(static_cast<std::size_t>(K));
  bell[0] = 1.0;
  for (int k = 0; k + 1 < K; ++k) {
    double binom = 1.0;
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
      acc += binom * bell[static_cast<std::size_t>(k - j)] * scaled_g[static_cast<std::size_t>(j + 1)];
      binom = binom * (k - j) / (j + 1);
    }
    bell[static_cast<std::size_t>(k + 1)] = acc;
  }

  DerivativeTable table;
  table.s = s;
  table.values.resize(static_cast<std::size_t>(K));
  const double base = std::exp(-x);
  double inv_pow = 1.0;
  for (int k = 0; k < K; ++k) {
    table.values[static_cast<std::size_t>(k)] = base * bell[static_cast<std::size_t>(k)] * inv_pow;
    inv_pow /= s;
  }
  table.complement0 = -std::expm1(-x);
  return table;
}

Probability ccdf_from_laplace(const DerivativeTable& table, int N) {
  if (N < 1) throw Error(Errc::ZeroAntennas, "N must be >= 1");
  if (table.values.size() < static_cast<std::size_t>(N)) {
    throw Error(Errc::InvalidArgument, "derivative table shorter than N");
  }
  CompensatedSum sum;
  double coeff = 1.0;  // (-s)^k / k!
  for (int k = 0; k < N; ++k) {
    sum.add(coeff * table.values[static_cast<std::size_t>(k)]);
    coeff *= -table.s / (k + 1);
  }
  return Probability::checked(sum.value(), kLaplaceSlack);
}

Probability cdf_from_laplace(const DerivativeTable& table, int N) {
  if (N < 1) throw Error(Errc::ZeroAntennas, "N must be >= 1");
  if (table.values.size() < static_cast<std::size_t>(N)) {
    throw Error(Errc::InvalidArgument, "derivative table shorter than N");
  }
  CompensatedSum sum;
  sum.add(std::isnan(table.complement0) ? 1.0 - table.values[0] : table.complement0);
  double coeff = -table.s;
  for (int k = 1; k < N; ++k) {
    sum.add(-coeff * table.values[static_cast<std::size_t>(k)]);
    coeff *= -table.s / (k + 1);
  }
  return Probability::checked(sum.value(), kLaplaceSlack);
}

Probability ccdf_fc(double T, const SystemParams& p) {
  validate_params(p);
  require_threshold(T);
  if (T == 0.0) return Probability(1.0);
  const double s = T * std::pow(p.d, p.alpha);
  return ccdf_from_laplace(
      stretched_table(interference_scale_c(p.lambda, p.alpha), 2.0 / p.alpha, s, p.n_antennas), p.n_antennas);
}

Probability cdf_fc(double T, const SystemParams& p) {
  validate_params(p);
  require_threshold(T);
  if (T == 0.0) return Probability(0.0);
  const double s = T * std::pow(p.d, p.alpha);
  return cdf_from_laplace(
      stretched_table(interference_scale_c(p.lambda, p.alpha), 2.0 / p.alpha, s, p.n_antennas), p.n_antennas);
}

Probability ccdf_fc_n2(double T, const SystemParams& p) {
  require_antennas(p, 2);
  require_threshold(T);
  const double x = interference_scale_c(p.lambda, p.alpha) * p.d * p.d * std::pow(T, 2.0 / p.alpha);
  return Probability::checked(std::exp(-x) * (1.0 + 2.0 * x / p.alpha), kLaplaceSlack);
}

double hmax_moment(int N, double alpha) {
  if (N < 1) throw Error(Errc::ZeroAntennas, "N must be >= 1");
  if (!(alpha > 2.0)) throw Error(Errc::AlphaOutOfRange, "path-loss exponent must be > 2");
  const double beta = 2.0 / alpha;
  if (N <= 12) {
    CompensatedSum sum;
    double binom = 1.0;  // C(N-1, j)
    for (int j = 0; j < N; ++j) {
      const double term = binom * std::pow(j + 1.0, -1.0 - beta);
      sum.add(j % 2 == 0 ? term : -term);
      binom = binom * (N - 1 - j) / (j + 1);
    }
    return N * std::tgamma(1.0 + beta) * sum.value();
  }
  // Alternating sums lose too many digits here; integrate the order-statistic density.
  auto density = [N, beta](double h) {
    if (h == 0.0) return 0.0;
    const double log_f = beta * std::log(h) + std::log(static_cast<double>(N)) +
                         (N - 1) * std::log(-std::expm1(-h)) - h;
    return std::exp(log_f);
  };
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-300;
  const double mode[] = {std::log(static_cast<double>(N))};
  const IntegrationResult r = integrate_adaptive(density, 0.0, INFINITY, cfg, mode);
  if (!r.converged) throw Error(Errc::MaxSubdivisionsExceeded, "h_max moment quadrature did not converge");
  return r.value;
}

Probability ccdf_min(double T, const SystemParams& p) {
  validate_params(p);
  require_threshold(T);
  if (T == 0.0) return Probability(1.0);
  const double s = (T / p.n_antennas) * std::pow(p.d, p.alpha);
  return ccdf_from_laplace(
      stretched_table(interference_scale_c(p.lambda, p.alpha), 2.0 / p.alpha, s, p.n_antennas), p.n_antennas);
}

Probability cdf_min(double T, const SystemParams& p) {
  validate_params(p);
  require_threshold(T);
  if (T == 0.0) return Probability(0.0);
  const double s = (T / p.n_antennas) * std::pow(p.d, p.alpha);
  return cdf_from_laplace(
      stretched_table(interference_scale_c(p.lambda, p.alpha), 2.0 / p.alpha, s, p.n_antennas), p.n_antennas);
}

Probability ccdf_max(double T, const SystemParams& p) {
  validate_params(p);
  require_threshold(T);
  if (T == 0.0) return Probability(1.0);
  const double s = T * std::pow(p.d, p.alpha);
  return ccdf_from_laplace(stretched_table(c_max_scale(p), 2.0 / p.alpha, s, p.n_antennas), p.n_antennas);
}

Probability cdf_max(double T, const SystemParams& p) {
  validate_params(p);
  require_threshold(T);
  if (T == 0.0) return Probability(0.0);
  const double s = T * std::pow(p.d, p.alpha);
  return cdf_from_laplace(stretched_table(c_max_scale(p), 2.0 / p.alpha, s, p.n_antennas), p.n_antennas);
}

MinMaxCoefficients minmax_coefficients_n2(const SystemParams& p) {
  require_antennas(p, 2);
  const double beta = 2.0 / p.alpha;
  const double common = kPi * kPi * p.lambda * p.d * p.d / (p.alpha * std::sin(2.0 * kPi / p.alpha));
  const double two_pow = std::pow(2.0, 1.0 - beta);
  return {two_pow * common, (4.0 - two_pow) * common};
}

MinMaxCoefficients minmax_coefficients_n4(const SystemParams& p) {
  require_antennas(p, 4);
  const double beta = 2.0 / p.alpha;
  const double common = kPi * kPi * p.lambda * p.d * p.d / (p.alpha * std::sin(2.0 * kPi / p.alpha));
  const double c1 = std::pow(2.0, 1.0 - 2.0 * beta) * common;
  const double c2 = (8.0 - 3.0 * std::pow(2.0, 2.0 - beta) - std::pow(2.0, 1.0 - 2.0 * beta) +
                     8.0 * std::pow(3.0, -beta)) *
                    common;
  return {c1, c2};
}

CcdfInterval minmax_closed_n2(double T, const SystemParams& p) {
  return closed_interval(T, p, minmax_coefficients_n2(p), closed_n2);
}

CcdfInterval minmax_closed_n4(double T, const SystemParams& p) {
  return closed_interval(T, p, minmax_coefficients_n4(p), closed_n4);
}

double d_alpha_n(double alpha, int N) {
  if (N < 1) throw Error(Errc::ZeroAntennas, "N must be >= 1");
  if (!(alpha > 2.0)) throw Error(Errc::AlphaOutOfRange, "path-loss exponent must be > 2");
  const double beta = 2.0 / alpha;
  // (1 + beta - k)_k equals the falling factorial beta (beta-1) ... (beta-k+1).
  CompensatedSum sum;
  double term = 1.0;
  for (int k = 0; k < N; ++k) {
    sum.add(term);
    term *= -(beta - k) / (k + 1);
  }
  return sum.value();
}

SlopeBounds asymptotic_cdf_slope_bounds(double alpha, int N) {
  const double beta = 2.0 / alpha;
  const double D = d_alpha_n(alpha, N);
  return {std::pow(static_cast<double>(N), -beta) * std::tgamma(1.0 + beta) * D, hmax_moment(N, alpha) * D};
}

}  // namespace mrcsir
