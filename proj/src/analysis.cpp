#include "mrcsir/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mrcsir/bounds.hpp"
#include "mrcsir/parallel.hpp"

namespace mrcsir {

namespace {

constexpr double kDivisionFloor = 1e-15;

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::OutOfUnitInterval, "epsilon must lie in (0, 1)");
}

void require_threshold(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(Errc::NonPositive, "threshold must be finite and > 0");
}

double ratio_or_throw(double num, double den) {
  if (!(den >= kDivisionFloor)) throw Error(Errc::DivisionByNearZero, "outage probability below 1e-15");
  return num / den;
}

}  // namespace

bool has_analytic_outage(ModelKind model, int N) {
  switch (model) {
    case ModelKind::ExactCorrelated:
      return N == 1 || N == 2;
    case ModelKind::FullCorrelation:
    case ModelKind::MinFading:
    case ModelKind::MaxFading:
      return N >= 1;
    case ModelKind::NoCorrelation:
      return N == 1;
  }
  return false;
}

Probability outage_probability(double T, const SystemParams& p, ModelKind model, const QuadratureConfig& cfg) {
  validate_params(p);
  if (!has_analytic_outage(model, p.n_antennas)) {
    throw Error(Errc::InvalidArgument, std::string("no analytic outage for model ") + std::string(to_string(model)) +
                                           " with N = " + std::to_string(p.n_antennas));
  }
  if (p.n_antennas == 1) return single_antenna_cdf(T, p);
  switch (model) {
    case ModelKind::ExactCorrelated:
      return cdf_exact_n2(T, p, cfg);
    case ModelKind::FullCorrelation:
      return cdf_fc(T, p);
    case ModelKind::MinFading:
      return cdf_min(T, p);
    case ModelKind::MaxFading:
      return cdf_max(T, p);
    case ModelKind::NoCorrelation:
      break;
  }
  throw Error(Errc::InvalidArgument, "no analytic outage for this model");
}

double critical_density_single(double epsilon, double T, double alpha, double d) {
  require_epsilon(epsilon);
  require_threshold(T);
  if (!(d > 0.0)) throw Error(Errc::NonPositive, "d must be > 0");
  const double c1 = interference_scale_c(1.0, alpha);
  return -std::log1p(-epsilon) / (c1 * d * d * std::pow(T, 2.0 / alpha));
}

CriticalDensityResult critical_density(double epsilon, double T, const SystemParams& p, ModelKind model,
                                       const CriticalDensityOptions& opt) {
  require_epsilon(epsilon);
  require_threshold(T);
  validate_params(p);
  if (!(opt.tol > 0.0) || opt.max_iterations < 1) throw Error(Errc::InvalidArgument, "invalid solver options");

  SystemParams q = p;
  auto residual_at = [&](double lambda) {
    q.lambda = lambda;
    return outage_probability(T, q, model, opt.quadrature).value() - epsilon;
  };

  double lo = 0.0;
  double hi = 4.0 * critical_density_single(epsilon, T, p.alpha, p.d);
  double f_hi = residual_at(hi);
  for (int k = 0; f_hi < 0.0; ++k) {
    if (k >= opt.max_expansions) {
      throw Error(Errc::BracketFailure, "outage stays below epsilon up to lambda = " + std::to_string(hi));
    }
    lo = hi;
    hi *= 2.0;
    f_hi = residual_at(hi);
  }

  CriticalDensityResult out;
  out.epsilon = epsilon;
  out.lambda_eps = hi;
  out.residual = f_hi;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = residual_at(mid);
    out.iterations = it;
    if (std::abs(f) < std::abs(out.residual)) {
      out.lambda_eps = mid;
      out.residual = f;
    }
    if (std::abs(f) <= opt.tol) {
      out.lambda_eps = mid;
      out.residual = f;
      return out;
    }
    (f < 0.0 ? lo : hi) = mid;
    if (!(hi - lo > 1e-15 * hi)) break;
  }
  if (std::abs(out.residual) > opt.tol) {
    throw Error(Errc::NotConverged, "critical density residual " + std::to_string(out.residual) +
                                        " exceeds tolerance after " + std::to_string(out.iterations) +
                                        " iterations");
  }
  return out;
}

CriticalDensityEstimate critical_density_mc(double epsilon, double T, const SystemParams& p, ModelKind model,
                                            const MonteCarloConfig& mc, double lambda_ref) {
  require_epsilon(epsilon);
  require_threshold(T);
  validate_params(p);
  mc.validate();
  if (!(lambda_ref > 0.0)) {
    const double lmin = critical_density(epsilon, T, p, ModelKind::MinFading).lambda_eps;
    const double lmax = critical_density(epsilon, T, p, ModelKind::MaxFading).lambda_eps;
    lambda_ref = std::sqrt(lmin * lmax);
  }
  SystemParams q = p;
  q.lambda = lambda_ref;
  std::vector<double> sir = draw_sir_samples(q, model, mc, T);
  std::sort(sir.begin(), sir.end());

  const auto n = static_cast<std::int64_t>(sir.size());
  const double k = epsilon * static_cast<double>(n);
  const double spread = 1.959963984540054 * std::sqrt(k * (1.0 - epsilon));
  auto order_stat = [&](double idx) {
    const auto i = std::clamp<std::int64_t>(static_cast<std::int64_t>(idx), 0, n - 1);
    return sir[static_cast<std::size_t>(i)];
  };
  auto to_lambda = [&](double quantile) { return lambda_ref * std::pow(quantile / T, 2.0 / p.alpha); };

  CriticalDensityEstimate out;
  out.lambda_ref = lambda_ref;
  out.n = n;
  out.lambda_eps = to_lambda(order_stat(std::floor(k)));
  out.ci_low = to_lambda(order_stat(std::floor(k - spread)));
  out.ci_high = to_lambda(order_stat(std::ceil(k + spread)));
  return out;
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::InvalidArgument, "need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(Errc::DegenerateDesign, "all x values are equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw Error(Errc::InvalidArgument, "log grid needs 0 < lo < hi, count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

SlopeFit scdo_slope(double T, const SystemParams& p, std::span<const double> lambda_grid, ModelKind model,
                    const QuadratureConfig& cfg) {
  require_threshold(T);
  std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  if (grid.empty()) grid = log_grid(1e-7, 1e-5, 8);
  std::vector<double> x(grid.size());
  std::vector<double> y(grid.size());
  parallel_blocks(static_cast<std::int64_t>(grid.size()), resolve_threads(0),
                  [&](int, std::int64_t begin, std::int64_t end) {
                    for (auto i = static_cast<std::size_t>(begin); i < static_cast<std::size_t>(end); ++i) {
                      SystemParams q = p;
                      q.lambda = grid[i];
                      const double cdf = outage_probability(T, q, model, cfg).value();
                      if (!(cdf > 0.0)) throw Error(Errc::DivisionByNearZero, "outage underflows to zero");
                      x[i] = std::log(grid[i]);
                      y[i] = std::log(cdf);
                    }
                  });
  return fit_line(x, y);
}

A1A2 a1_a2(double T, double alpha, double d, const QuadratureConfig& cfg) {
  require_threshold(T);
  const SystemParams p{1.0, alpha, d, 2};
  validate_params(p);
  const double half[] = {0.5 * T};
  QuadratureConfig outer = cfg;
  outer.rel_tol = cfg.outer_rel_tol;
  const IntegrationResult r =
      integrate_adaptive([&](double z) { return inner_r_integral(z, T, p, cfg); }, 0.0, T, outer, half);
  if (!r.converged) throw Error(Errc::MaxSubdivisionsExceeded, "A1 integral did not converge");
  A1A2 out;
  out.a1 = 2.0 * std::numbers::pi * r.value;
  out.a1_error = 2.0 * std::numbers::pi * r.error_estimate;
  out.a2 = interference_scale_c(1.0, alpha) * d * d * std::pow(T, 2.0 / alpha);
  return out;
}

double delta_fc(double T, const SystemParams& p, const QuadratureConfig& cfg) {
  validate_params(p);
  if (p.n_antennas > 2) throw Error(Errc::InvalidArgument, "delta_fc needs the exact CDF, so N must be 1 or 2");
  const double exact = outage_probability(T, p, ModelKind::ExactCorrelated, cfg).value();
  const double fc = outage_probability(T, p, ModelKind::FullCorrelation, cfg).value();
  return ratio_or_throw(fc, exact);
}

double delta_minmax(double T, const SystemParams& p) {
  validate_params(p);
  if (p.n_antennas == 1) return 1.0;
  return ratio_or_throw(cdf_max(T, p).value(), cdf_min(T, p).value());
}

SqrtFit sqrt_fit(std::span<const int> n_list, std::span<const double> gains) {
  if (n_list.size() != gains.size() || n_list.size() < 2) {
    throw Error(Errc::InvalidArgument, "sqrt_fit needs >= 2 paired points");
  }
  std::vector<double> x(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw Error(Errc::ZeroAntennas, "N must be >= 1");
    x[i] = std::sqrt(static_cast<double>(n_list[i]));
  }
  const SlopeFit line = fit_line(x, gains);
  SqrtFit out;
  out.a = line.slope;
  out.b = line.intercept;
  out.residuals.resize(x.size());
  double sse = 0.0;
  double mx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.residuals[i] = gains[i] - (out.a * x[i] + out.b);
    sse += out.residuals[i] * out.residuals[i];
    mx += x[i];
  }
  const double n = static_cast<double>(x.size());
  mx /= n;
  if (x.size() > 2) {
    double sxx = 0.0;
    double sx2 = 0.0;
    for (double xi : x) {
      sxx += (xi - mx) * (xi - mx);
      sx2 += xi * xi;
    }
    const double s2 = sse / (n - 2.0);
    out.se_a = std::sqrt(s2 / sxx);
    out.se_b = std::sqrt(s2 * sx2 / (n * sxx));
  }
  return out;
}

}  // namespace mrcsir
