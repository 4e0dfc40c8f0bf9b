#include "mrcsir/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace mrcsir {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

double checked_eval(const Integrand& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream os;
    os << "integrand returned " << y << " at x = " << x;
    throw Error(Errc::NonFiniteIntegrand, os.str());
  }
  return y;
}

Panel kronrod15(const Integrand& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  const double fc = checked_eval(f, center);
  double res_g = fc * kGaussWeights[3];
  double res_k = fc * kKronrodWeights[7];
  double res_abs = std::abs(res_k);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = checked_eval(f, center - dx);
    f2[j] = checked_eval(f, center + dx);
    const double sum = f1[j] + f2[j];
    res_k += kKronrodWeights[j] * sum;
    res_abs += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_g += kGaussWeights[j / 2] * sum;
  }
  const double mean = 0.5 * res_k;
  double res_asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    res_asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }

  const double ah = std::abs(half);
  double err = std::abs((res_k - res_g) * half);
  res_asc *= ah;
  res_abs *= ah;
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  if (res_abs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * res_abs, err);
  return {a, b, res_k * half, err};
}

IntegrationResult integrate_finite(const Integrand& f, double lo, double hi, const QuadratureConfig& cfg,
                                   std::vector<double> cuts) {
  std::vector<double> edges;
  edges.reserve(cuts.size() + 2);
  edges.push_back(lo);
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts) {
    if (c > edges.back() && c < hi) edges.push_back(c);
  }
  edges.push_back(hi);

  std::vector<Panel> panels;
  panels.reserve(edges.size() + static_cast<std::size_t>(cfg.max_subdivisions));
  IntegrationResult out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    panels.push_back(kronrod15(f, edges[i], edges[i + 1]));
    out.evaluations += 15;
  }

  auto totals = [&panels] {
    double v = 0.0;
    double e = 0.0;
    for (const Panel& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };

  auto [value, error] = totals();
  while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) {
    if (out.subdivisions >= cfg.max_subdivisions) {
      out.converged = false;
      break;
    }
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const Panel& x, const Panel& y) { return x.error < y.error; });
    const double mid = 0.5 * (worst->a + worst->b);
    if (!(mid > worst->a && mid < worst->b)) {
      // Panel narrower than floating-point resolution.
      out.converged = false;
      break;
    }
    const Panel left = kronrod15(f, worst->a, mid);
    const Panel right = kronrod15(f, mid, worst->b);
    *worst = left;
    panels.push_back(right);
    out.evaluations += 30;
    ++out.subdivisions;
    std::tie(value, error) = totals();
  }

  // Fixed summation order, independent of the refinement history.
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::tie(out.value, out.error_estimate) = totals();
  return out;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(outer_rel_tol > 0.0)) {
    throw Error(Errc::InvalidArgument, "quadrature tolerances must be > 0");
  }
  if (max_subdivisions < 1) {
    throw Error(Errc::InvalidArgument, "max_subdivisions must be >= 1");
  }
}

IntegrationResult integrate_adaptive(const Integrand& f, double lo, double hi, const QuadratureConfig& cfg,
                                     std::span<const double> breakpoints) {
  cfg.validate();
  if (std::isnan(lo) || std::isnan(hi)) throw Error(Errc::InvalidArgument, "NaN integration limit");
  if (lo == hi) return {};
  if (lo > hi) {
    IntegrationResult r = integrate_adaptive(f, hi, lo, cfg, breakpoints);
    r.value = -r.value;
    return r;
  }

  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (std::isfinite(b) && b > lo && b < hi) cuts.push_back(b);
  }

  if (!lo_inf && !hi_inf) return integrate_finite(f, lo, hi, cfg, std::move(cuts));

  if (!lo_inf) {
    auto g = [&f, lo](double u) {
      const double s = 1.0 - u;
      return f(lo + u / s) / (s * s);
    };
    for (double& c : cuts) c = (c - lo) / (1.0 + (c - lo));
    return integrate_finite(g, 0.0, 1.0, cfg, std::move(cuts));
  }
  if (!hi_inf) {
    auto g = [&f, hi](double u) {
      const double s = 1.0 - u;
      return f(hi - u / s) / (s * s);
    };
    for (double& c : cuts) c = (hi - c) / (1.0 + (hi - c));
    return integrate_finite(g, 0.0, 1.0, cfg, std::move(cuts));
  }
  auto g = [&f](double u) {
    const double s = 1.0 - u * u;
    return f(u / s) * (1.0 + u * u) / (s * s);
  };
  for (double& c : cuts) c = 2.0 * c / (1.0 + std::sqrt(1.0 + 4.0 * c * c));
  return integrate_finite(g, -1.0, 1.0, cfg, std::move(cuts));
}

}  // namespace mrcsir
