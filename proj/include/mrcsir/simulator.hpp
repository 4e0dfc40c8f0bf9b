#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "mrcsir/core.hpp"

namespace mrcsir {

struct MonteCarloConfig {
  std::int64_t num_samples = 100000;
  /// Radius of the simulated disk around the receiver; nullopt selects it
  /// automatically (see auto_window_radius).
  std::optional<double> window_radius;
  std::uint64_t seed = 1;
  double tail_frac = 1e-3;
  /// Mean per-branch SNR in dB; nullopt means no noise.
  std::optional<double> noise_snr_db;
  /// Add the mean interference from beyond the window to every branch.
  bool compensate_tail = true;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend on it.
  int threads = 0;

  void validate() const;
};

/// Outage estimate at one threshold. `point` is the fraction of samples with
/// SIR < threshold; [ci_low, ci_high] is the 95% Wilson score interval.
struct CcdfEstimate {
  double threshold = 0.0;
  Probability point;
  Probability ci_low;
  Probability ci_high;
  std::int64_t n = 0;

  double half_width() const { return 0.5 * (ci_high.value() - ci_low.value()); }
};

using Rng = std::mt19937_64;

/// Generators for sample `index`, derived from (seed, index) only: one for
/// interferer positions, one for fading gains.
struct SampleStreams {
  Rng positions;
  Rng fading;
};
SampleStreams sample_streams(std::uint64_t seed, std::uint64_t index);

struct InterfererField {
  std::vector<double> distances;
  double radius = 0.0;
  /// Mean interference from points beyond `radius`, for unit-mean gains.
  double tail_mean = 0.0;
};

/// Poisson(lambda pi R^2) points uniform in the disk of radius R, in order of
/// increasing distance. The squared distances are the arrival times of a
/// rate-(lambda pi) Poisson process, so a draw with radius 2R starts with the
/// same points as a draw with radius R from the same generator state.
InterfererField sample_field(double lambda, double radius, Rng& rng);

/// 2 pi lambda R^(2-alpha) / (alpha - 2).
double far_field_mean(double lambda, double alpha, double radius);

struct GainMoments {
  double mean;
  double second;
};

/// Moments of the per-interferer gain each model applies on a branch.
GainMoments interferer_gain_moments(ModelKind model, int N);

/// Window radius for thresholds up to `t_max`, never below 50 d.
///
/// With tail compensation the residual far-field fluctuation is what biases
/// the estimate, and its effect on the outage is second order; R is chosen
/// so that (std of far-field interference / (d^-alpha / t_max))^2 <= tail_frac.
/// Without compensation R satisfies the first-order criterion
/// E[h] 2 pi lambda R^(2-alpha)/(alpha-2) <= tail_frac d^-alpha / t_max.
double auto_window_radius(const SystemParams& p, ModelKind model, double t_max, double tail_frac,
                          bool compensate_tail = true);

/// Per-branch interference (including the field's tail_mean) under `model`.
///
/// Random draws are consumed point by point, N gains per point, for the
/// exact, min and max models, so identical generators produce coupled
/// samples with min <= exact <= max per branch.
std::vector<double> branch_interference(const SystemParams& p, ModelKind model, const InterfererField& field,
                                        Rng& rng);

/// Post-combiner SIR sum_n g_n d^-alpha / I_n. The signal gains g_n are drawn
/// from `rng` first, then the interferer gains as in branch_interference.
/// Returns +infinity for an empty field with no tail (no interference): such
/// a sample is never in outage for a finite threshold.
double sample_sir(const SystemParams& p, ModelKind model, const InterfererField& field, Rng& rng);

/// sum_n g_n d^-alpha / (I_n + noise_power).
double sample_sinr(const SystemParams& p, ModelKind model, const InterfererField& field, Rng& rng,
                   double noise_power);

/// W = d^-alpha / 10^(snr_db/10): noise power giving the stated mean SNR per branch.
double noise_power_from_snr_db(double snr_db, const SystemParams& p);

std::pair<Probability, Probability> wilson_interval(std::int64_t successes, std::int64_t n);

CcdfEstimate estimate_outage(double T, const SystemParams& p, ModelKind model, const MonteCarloConfig& mc);

/// All thresholds are evaluated on one sample set, so the curve is monotone.
std::vector<CcdfEstimate> estimate_outage_curve(std::span<const double> thresholds, const SystemParams& p,
                                                ModelKind model, const MonteCarloConfig& mc);

/// Raw SIR (or SINR when mc.noise_snr_db is set) samples in index order.
/// `t_max` feeds the automatic window radius.
std::vector<double> draw_sir_samples(const SystemParams& p, ModelKind model, const MonteCarloConfig& mc,
                                     double t_max);

/// Window radius actually used for (p, model, mc, t_max).
double effective_window_radius(const SystemParams& p, ModelKind model, const MonteCarloConfig& mc, double t_max);

}  // namespace mrcsir
