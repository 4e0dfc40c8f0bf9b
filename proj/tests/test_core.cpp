#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "mrcsir/analysis.hpp"
#include "mrcsir/bounds.hpp"
#include "mrcsir/core.hpp"

using namespace mrcsir;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected mrcsir::Error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("validate_params rejects out-of-domain parameters") {
  CHECK_NOTHROW(validate_params({1e-3, 3.5, 10.0, 2}));
  CHECK(code_of([] { validate_params({1e-3, 2.0, 10.0, 2}); }) == Errc::AlphaOutOfRange);
  CHECK(code_of([] { validate_params({1e-3, 1.5, 10.0, 2}); }) == Errc::AlphaOutOfRange);
  CHECK(code_of([] { validate_params({0.0, 4.0, 10.0, 2}); }) == Errc::NonPositive);
  CHECK(code_of([] { validate_params({1e-3, 4.0, -1.0, 2}); }) == Errc::NonPositive);
  CHECK(code_of([] { validate_params({1e-3, 4.0, 10.0, 0}); }) == Errc::ZeroAntennas);
  CHECK(code_of([] { validate_params({NAN, 4.0, 10.0, 1}); }) == Errc::NonPositive);
}

TEST_CASE("error messages carry the code name") {
  const Error e(Errc::BracketFailure, "no sign change");
  CHECK(std::string(e.what()).find("BracketFailure") != std::string::npos);
  CHECK(to_string(Errc::DivisionByNearZero) == "DivisionByNearZero");
}

TEST_CASE("Probability enforces the unit interval") {
  CHECK(Probability(0.25).value() == 0.25);
  CHECK(Probability(0.25).complement().value() == 0.75);
  CHECK(code_of([] { Probability(1.0 + 1e-12); }) == Errc::OutOfUnitInterval);
  CHECK(code_of([] { Probability(-1e-300); }) == Errc::OutOfUnitInterval);
  CHECK(code_of([] { Probability(NAN); }) == Errc::OutOfUnitInterval);
  CHECK(Probability::checked(1.0 + 1e-12, 1e-9).value() == 1.0);
  CHECK(Probability::checked(-1e-12, 1e-9).value() == 0.0);
  CHECK(code_of([] { Probability::checked(1.1, 1e-9); }) == Errc::OutOfUnitInterval);
}

TEST_CASE("model names round-trip and accept aliases") {
  for (ModelKind k : {ModelKind::ExactCorrelated, ModelKind::FullCorrelation, ModelKind::NoCorrelation,
                      ModelKind::MinFading, ModelKind::MaxFading}) {
    CHECK(parse_model_kind(to_string(k)) == k);
  }
  CHECK(parse_model_kind("fc") == ModelKind::FullCorrelation);
  CHECK(parse_model_kind("nc") == ModelKind::NoCorrelation);
  CHECK(parse_model_kind("min") == ModelKind::MinFading);
  CHECK(parse_model_kind("max") == ModelKind::MaxFading);
  CHECK(code_of([] { parse_model_kind("rician"); }) == Errc::InvalidArgument);
}

TEST_CASE("interference scale equals lambda pi Gamma(1+b) Gamma(1-b)") {
  for (double alpha : {2.5, 3.0, 3.5, 4.0, 5.0, 6.0}) {
    const double b = 2.0 / alpha;
    const double oracle = 1e-3 * std::numbers::pi * boost::math::tgamma(1.0 + b) * boost::math::tgamma(1.0 - b);
    CHECK(interference_scale_c(1e-3, alpha) == doctest::Approx(oracle).epsilon(1e-13));
  }
  CHECK(interference_scale_c(1.0, 4.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 2).epsilon(1e-15));
  CHECK(interference_scale_c(0.0, 4.0) == 0.0);
  CHECK(code_of([] { interference_scale_c(1.0, 2.0); }) == Errc::AlphaOutOfRange);
}

TEST_CASE("single-antenna CCDF and CDF") {
  const SystemParams p{1e-3, 4.0, 10.0, 1};
  const double K = interference_scale_c(p.lambda, p.alpha) * 100.0;
  for (double T : {0.0, 0.01, 1.0, 30.0}) {
    const double ccdf = single_antenna_ccdf(T, p).value();
    CHECK(ccdf == doctest::Approx(std::exp(-K * std::sqrt(T))).epsilon(1e-14));
    CHECK(ccdf + single_antenna_cdf(T, p).value() == doctest::Approx(1.0).epsilon(1e-15));
  }
  // Relative accuracy survives at outage levels where 1 - ccdf would cancel.
  const SystemParams tiny{1e-14, 4.0, 10.0, 1};
  const double k_tiny = interference_scale_c(tiny.lambda, 4.0) * 100.0;
  CHECK(single_antenna_cdf(1.0, tiny).value() == doctest::Approx(k_tiny).epsilon(1e-12));
}

TEST_CASE("dB conversions") {
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(db_to_linear(-3.0) == doctest::Approx(0.5011872336272722));
  CHECK(linear_to_db(db_to_linear(7.25)) == doctest::Approx(7.25));
}

TEST_CASE("scale transform leaves every analytic CCDF unchanged") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_kappa(-2.0, 2.0);
  std::uniform_real_distribution<double> t_db(-10.0, 15.0);
  for (int trial = 0; trial < 12; ++trial) {
    const SystemParams p{1e-3, trial % 2 ? 3.5 : 4.0, 10.0, 2};
    const double kappa = std::exp(log_kappa(rng));
    const double T = db_to_linear(t_db(rng));
    const SystemParams q = scale_transform(p, kappa);
    CHECK(q.lambda == doctest::Approx(p.lambda / (kappa * kappa)).epsilon(1e-15));
    CHECK(q.d == doctest::Approx(p.d * kappa).epsilon(1e-15));
    CHECK(single_antenna_ccdf(T, q).value() == doctest::Approx(single_antenna_ccdf(T, p).value()).epsilon(1e-12));
    CHECK(ccdf_fc(T, q).value() == doctest::Approx(ccdf_fc(T, p).value()).epsilon(1e-11));
    CHECK(ccdf_min(T, q).value() == doctest::Approx(ccdf_min(T, p).value()).epsilon(1e-11));
    CHECK(ccdf_max(T, q).value() == doctest::Approx(ccdf_max(T, p).value()).epsilon(1e-11));
    CHECK(ccdf_exact_n2(T, q).value() == doctest::Approx(ccdf_exact_n2(T, p).value()).epsilon(1e-7));
  }
}
