// Exact SIR distribution of two-antenna MRC in a Poisson field.
//
// With w = (d/r)^alpha both r-integrals of the dual-antenna CCDF become
// Mellin-type integrals in w. Writing s = z + (T-z)^+ and a = z/s,
// b = (T-z)^+/s (so a + b = 1 whenever s > 0), the substitution w = u/s gives
//
//   exponent of C(z,T) = 2 pi lambda (d^2/alpha) s^beta     J_C(a)
//   inner r-integral   =           (d^2/alpha) s^(beta-1) J_I(a)
//
// with beta = 2/alpha and
//
//   J_C(a) = int_0^inf u^(-beta-1) (1 - 1/((1+au)(1+bu))) du
//   J_I(a) = int_0^inf u^(-beta)   / ((1+au)^2 (1+bu))    du.
//
// Both are integrated over t = log u on the whole real line, where the
// integrands decay exponentially at both ends.

#include <cmath>
#include <numbers>

#include "mrcsir/quadrature.hpp"

namespace mrcsir {

namespace {

constexpr double kPi = std::numbers::pi;

struct Split {
  double s;  // z + (T - z)^+
  double a;  // z / s
  double b;  // (T - z)^+ / s
};

Split split(double z, double T) {
  const double v = std::max(T - z, 0.0);
  const double s = z + v;
  if (s == 0.0) return {0.0, 0.0, 0.0};
  return {s, z / s, v / s};
}

double ratio(double y, double a) { return a == 0.0 ? 1.0 : y / (y + a); }

double j_c_integrand(double t, double a, double b, double beta) {
  if (t <= 0.0) {
    const double u = std::exp(t);
    return std::pow(u, 1.0 - beta) * (1.0 + a * b * u) / ((1.0 + a * u) * (1.0 + b * u));
  }
  const double y = std::exp(-t);
  if (y == 0.0) return 0.0;
  return std::pow(y, beta) * (1.0 - ratio(y, a) * ratio(y, b));
}

double j_i_integrand(double t, double a, double b, double beta) {
  if (t <= 0.0) {
    const double u = std::exp(t);
    const double q = 1.0 + a * u;
    return std::pow(u, 1.0 - beta) / (q * q * (1.0 + b * u));
  }
  const double y = std::exp(-t);
  if (y == 0.0) return 0.0;
  const double q = ratio(y, a);
  return std::pow(y, beta) * q * q / (y + b);
}

double integrate_or_throw(const Integrand& f, double lo, double hi, const QuadratureConfig& cfg,
                          const char* what) {
  const IntegrationResult r = integrate_adaptive(f, lo, hi, cfg);
  if (!r.converged) {
    throw Error(Errc::MaxSubdivisionsExceeded, std::string(what) + " did not reach tolerance");
  }
  return r.value;
}

double j_c(double a, double b, double beta, const QuadratureConfig& cfg) {
  return integrate_or_throw([=](double t) { return j_c_integrand(t, a, b, beta); },
                            -INFINITY, INFINITY, cfg, "interference exponent integral");
}

double j_i(double a, double b, double beta, const QuadratureConfig& cfg) {
  return integrate_or_throw([=](double t) { return j_i_integrand(t, a, b, beta); },
                            -INFINITY, INFINITY, cfg, "inner r-integral");
}

void require_n2(const SystemParams& p) {
  validate_params(p);
  if (p.n_antennas != 2) {
    throw Error(Errc::InvalidArgument, "exact distribution is only available for N = 2");
  }
}

void require_threshold(double T) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw Error(Errc::InvalidArgument, "threshold must be finite and >= 0");
}

void require_alpha4(const SystemParams& p) {
  if (p.alpha != 4.0) throw Error(Errc::AlphaMismatch, "closed form requires alpha == 4");
}

ExactN2Result assemble(double tail, double tail_cdf, double head, double err, long evals) {
  const double slack = 1e-9 + 10.0 * err;
  ExactN2Result r;
  r.ccdf = Probability::checked(tail + head, slack);
  r.cdf = Probability::checked(tail_cdf - head, slack);
  r.error_estimate = err;
  r.evaluations = evals;
  return r;
}

}  // namespace

double c_factor(double z, double T, const SystemParams& p, const QuadratureConfig& cfg) {
  validate_params(p);
  require_threshold(T);
  if (!(z >= 0.0)) throw Error(Errc::InvalidArgument, "z must be >= 0");
  const Split sp = split(z, T);
  if (sp.s == 0.0) return 1.0;
  const double beta = 2.0 / p.alpha;
  const double exponent =
      2.0 * kPi * p.lambda * (p.d * p.d / p.alpha) * std::pow(sp.s, beta) * j_c(sp.a, sp.b, beta, cfg);
  return std::exp(-exponent);
}

double c_factor_alpha4(double z, double T, const SystemParams& p) {
  validate_params(p);
  require_alpha4(p);
  require_threshold(T);
  if (!(z >= 0.0)) throw Error(Errc::InvalidArgument, "z must be >= 0");
  // (z^1.5 - w^1.5)/(z - w) = (a^2 + ab + b^2)/(a + b) with a = sqrt(z), b = sqrt(w);
  // equals 1.5 sqrt(z) at z == w.
  const double a = std::sqrt(z);
  const double b = std::sqrt(std::max(T - z, 0.0));
  if (a + b == 0.0) return 1.0;
  const double frac = (a * a + a * b + b * b) / (a + b);
  return std::exp(-0.5 * kPi * kPi * p.lambda * p.d * p.d * frac);
}

double alpha4_kernel(double z, double T) {
  // z^1.5 - 3 sqrt(z) w + 2 w^1.5 = (a - b)^2 (a + 2b) and (z - w)^2 = (a - b)^2 (a + b)^2.
  const double a = std::sqrt(z);
  const double b = std::sqrt(std::max(T - z, 0.0));
  const double s = a + b;
  return (a + 2.0 * b) / (s * s);
}

double inner_r_integral(double z, double T, const SystemParams& p, const QuadratureConfig& cfg,
                        bool force_numeric) {
  validate_params(p);
  require_threshold(T);
  if (!(z >= 0.0)) throw Error(Errc::InvalidArgument, "z must be >= 0");
  const Split sp = split(z, T);
  if (sp.s == 0.0) throw Error(Errc::InvalidArgument, "inner r-integral diverges at z = T = 0");
  const double beta = 2.0 / p.alpha;
  const double scale = (p.d * p.d / p.alpha) * std::pow(sp.s, beta - 1.0);
  if (z > T && !force_numeric) {
    // int_0^inf u^-beta/(1+u)^2 du = B(1-beta, 1+beta)
    return scale * std::tgamma(1.0 - beta) * std::tgamma(1.0 + beta);
  }
  return scale * j_i(sp.a, sp.b, beta, cfg);
}

ExactN2Result exact_n2(double T, const SystemParams& p, const QuadratureConfig& cfg) {
  require_n2(p);
  require_threshold(T);
  cfg.validate();
  if (T == 0.0) return {Probability(1.0), Probability(0.0), 0.0, 0};

  const double beta = 2.0 / p.alpha;
  const double single = interference_scale_c(p.lambda, p.alpha) * p.d * p.d * std::pow(T, beta);

  QuadratureConfig outer = cfg;
  outer.rel_tol = cfg.outer_rel_tol;
  auto integrand = [&](double z) {
    return 2.0 * kPi * p.lambda * c_factor(z, T, p, cfg) * inner_r_integral(z, T, p, cfg);
  };
  const double cuts[] = {0.5 * T};
  const IntegrationResult head = integrate_adaptive(integrand, 0.0, T, outer, cuts);
  if (!head.converged) throw Error(Errc::MaxSubdivisionsExceeded, "outer z-integral did not reach tolerance");

  // Rough cost: each outer node runs two inner quadratures.
  const long evals = head.evaluations * 3;
  const double err = head.error_estimate + 2.0 * cfg.rel_tol * std::abs(head.value);

  if (cfg.analytic_tail) {
    return assemble(std::exp(-single), -std::expm1(-single), head.value, err, evals);
  }
  auto tail_integrand = [&](double z) {
    return 2.0 * kPi * p.lambda * c_factor(z, T, p, cfg) * inner_r_integral(z, T, p, cfg, true);
  };
  const IntegrationResult tail = integrate_adaptive(tail_integrand, T, INFINITY, outer);
  if (!tail.converged) throw Error(Errc::MaxSubdivisionsExceeded, "z > T tail did not reach tolerance");
  return assemble(tail.value, 1.0 - tail.value, head.value,
                  err + tail.error_estimate + 2.0 * cfg.rel_tol * tail.value,
                  evals + tail.evaluations * 3);
}

Probability ccdf_exact_n2(double T, const SystemParams& p, const QuadratureConfig& cfg) {
  return exact_n2(T, p, cfg).ccdf;
}

Probability cdf_exact_n2(double T, const SystemParams& p, const QuadratureConfig& cfg) {
  return exact_n2(T, p, cfg).cdf;
}

ExactN2Result exact_n2_alpha4(double T, const SystemParams& p, const QuadratureConfig& cfg) {
  require_n2(p);
  require_alpha4(p);
  require_threshold(T);
  cfg.validate();
  if (T == 0.0) return {Probability(1.0), Probability(0.0), 0.0, 0};

  const double ld2 = p.lambda * p.d * p.d;
  const double single = 0.5 * kPi * kPi * ld2 * std::sqrt(T);
  QuadratureConfig outer = cfg;
  outer.rel_tol = cfg.outer_rel_tol;

  auto integrand = [&](double z) { return 0.25 * kPi * kPi * ld2 * c_factor_alpha4(z, T, p) * alpha4_kernel(z, T); };
  const double cuts[] = {0.5 * T};
  const IntegrationResult head = integrate_adaptive(integrand, 0.0, T, outer, cuts);
  if (!head.converged) throw Error(Errc::MaxSubdivisionsExceeded, "outer z-integral did not reach tolerance");

  if (cfg.analytic_tail) {
    return assemble(std::exp(-single), -std::expm1(-single), head.value, head.error_estimate, head.evaluations);
  }
  const IntegrationResult tail = integrate_adaptive(integrand, T, INFINITY, outer);
  if (!tail.converged) throw Error(Errc::MaxSubdivisionsExceeded, "z > T tail did not reach tolerance");
  return assemble(tail.value, 1.0 - tail.value, head.value, head.error_estimate + tail.error_estimate,
                  head.evaluations + tail.evaluations);
}

Probability ccdf_exact_n2_alpha4(double T, const SystemParams& p, const QuadratureConfig& cfg) {
  return exact_n2_alpha4(T, p, cfg).ccdf;
}

}  // namespace mrcsir
