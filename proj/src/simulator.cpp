#include "mrcsir/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mrcsir/parallel.hpp"

namespace mrcsir {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWilsonZ = 1.959963984540054;  // two-sided 95%
constexpr double kMinRadiusInLinkDistances = 50.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fill_distances(double lambda, double radius, Rng& rng, std::vector<double>& out) {
  out.clear();
  const double rate = lambda * kPi;
  if (!(rate > 0.0)) return;
  std::exponential_distribution<double> gap(rate);
  const double t_max = radius * radius;
  for (double t = gap(rng); t <= t_max; t += gap(rng)) out.push_back(std::sqrt(t));
}

// Scratch buffers reused across samples by one worker.
struct Workspace {
  std::vector<double> signal;
  std::vector<double> distances;
  std::vector<double> extra;
  std::vector<double> branches;
};

double path_loss(double r, double alpha) { return std::exp(-alpha * std::log(r)); }

void compute_branches(const SystemParams& p, ModelKind model, std::span<const double> distances, double radius,
                      double tail_mean, Rng& rng, Workspace& ws) {
  const int N = p.n_antennas;
  ws.branches.assign(static_cast<std::size_t>(N), 0.0);
  std::exponential_distribution<double> expo(1.0);
  const double tail = tail_mean * interferer_gain_moments(model, N).mean;

  switch (model) {
    case ModelKind::ExactCorrelated: {
      for (double r : distances) {
        const double l = path_loss(r, p.alpha);
        for (int n = 0; n < N; ++n) ws.branches[static_cast<std::size_t>(n)] += expo(rng) * l;
      }
      break;
    }
    case ModelKind::MinFading:
    case ModelKind::MaxFading: {
      const bool take_min = model == ModelKind::MinFading;
      double sum = 0.0;
      for (double r : distances) {
        const double l = path_loss(r, p.alpha);
        double h = expo(rng);
        for (int n = 1; n < N; ++n) {
          const double x = expo(rng);
          h = take_min ? std::min(h, x) : std::max(h, x);
        }
        sum += h * l;
      }
      std::fill(ws.branches.begin(), ws.branches.end(), sum);
      break;
    }
    case ModelKind::FullCorrelation: {
      double sum = 0.0;
      for (double r : distances) sum += expo(rng) * path_loss(r, p.alpha);
      std::fill(ws.branches.begin(), ws.branches.end(), sum);
      break;
    }
    case ModelKind::NoCorrelation: {
      for (int n = 0; n < N; ++n) {
        std::span<const double> field = distances;
        if (n > 0) {
          fill_distances(p.lambda, radius, rng, ws.extra);
          field = ws.extra;
        }
        double sum = 0.0;
        for (double r : field) sum += expo(rng) * path_loss(r, p.alpha);
        ws.branches[static_cast<std::size_t>(n)] = sum;
      }
      break;
    }
  }
  for (double& b : ws.branches) b += tail;
}

void draw_signal(int N, Rng& rng, Workspace& ws) {
  std::exponential_distribution<double> expo(1.0);
  ws.signal.resize(static_cast<std::size_t>(N));
  for (double& g : ws.signal) g = expo(rng);
}

double combine(const SystemParams& p, const Workspace& ws, double noise_power) {
  const double signal = std::pow(p.d, -p.alpha);
  double total = 0.0;
  for (std::size_t n = 0; n < ws.branches.size(); ++n) {
    const double denom = ws.branches[n] + noise_power;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    total += ws.signal[n] * signal / denom;
  }
  return total;
}

double noise_power_for(const SystemParams& p, const MonteCarloConfig& mc) {
  return mc.noise_snr_db ? noise_power_from_snr_db(*mc.noise_snr_db, p) : 0.0;
}

// Draws the SIR of every sample index in [0, n) and hands (index, sir) to sink.
template <class Sink>
void run_samples(const SystemParams& p, ModelKind model, const MonteCarloConfig& mc, double t_max, Sink&& sink) {
  const double radius = effective_window_radius(p, model, mc, t_max);
  const double tail_mean = mc.compensate_tail ? far_field_mean(p.lambda, p.alpha, radius) : 0.0;
  const double noise = noise_power_for(p, mc);
  parallel_blocks(mc.num_samples, resolve_threads(mc.threads),
                  [&](int worker, std::int64_t begin, std::int64_t end) {
                    Workspace ws;
                    for (std::int64_t i = begin; i < end; ++i) {
                      SampleStreams rng = sample_streams(mc.seed, static_cast<std::uint64_t>(i));
                      fill_distances(p.lambda, radius, rng.positions, ws.distances);
                      draw_signal(p.n_antennas, rng.fading, ws);
                      compute_branches(p, model, ws.distances, radius, tail_mean, rng.fading, ws);
                      sink(worker, i, combine(p, ws, noise));
                    }
                  });
}

}  // namespace

void MonteCarloConfig::validate() const {
  if (num_samples < 1) throw Error(Errc::InvalidArgument, "num_samples must be >= 1");
  if (window_radius && !(*window_radius > 0.0)) throw Error(Errc::NonPositive, "window radius must be > 0");
  if (!(tail_frac > 0.0 && tail_frac < 1.0)) throw Error(Errc::InvalidArgument, "tail_frac must lie in (0, 1)");
  if (noise_snr_db && !std::isfinite(*noise_snr_db)) throw Error(Errc::InvalidArgument, "SNR must be finite");
}

SampleStreams sample_streams(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t base = splitmix64(seed) ^ splitmix64(2 * index + 0x632be59bd9b4e019ULL);
  return {Rng(splitmix64(base)), Rng(splitmix64(base ^ 0xd1b54a32d192ed03ULL))};
}

InterfererField sample_field(double lambda, double radius, Rng& rng) {
  if (!(radius > 0.0)) throw Error(Errc::NonPositive, "window radius must be > 0");
  if (!(lambda >= 0.0)) throw Error(Errc::NonPositive, "density must be >= 0");
  InterfererField field;
  field.radius = radius;
  fill_distances(lambda, radius, rng, field.distances);
  return field;
}

double far_field_mean(double lambda, double alpha, double radius) {
  if (!(alpha > 2.0)) throw Error(Errc::AlphaOutOfRange, "path-loss exponent must be > 2");
  return 2.0 * kPi * lambda * std::pow(radius, 2.0 - alpha) / (alpha - 2.0);
}

GainMoments interferer_gain_moments(ModelKind model, int N) {
  if (N < 1) throw Error(Errc::ZeroAntennas, "N must be >= 1");
  switch (model) {
    case ModelKind::MinFading: {
      // min of N unit exponentials is Exp(N).
      const double m = 1.0 / N;
      return {m, 2.0 * m * m};
    }
    case ModelKind::MaxFading: {
      // max of N unit exponentials is a sum of independent Exp(k), k = 1..N.
      double mean = 0.0;
      double var = 0.0;
      for (int k = 1; k <= N; ++k) {
        mean += 1.0 / k;
        var += 1.0 / (static_cast<double>(k) * k);
      }
      return {mean, var + mean * mean};
    }
    default:
      return {1.0, 2.0};
  }
}

double auto_window_radius(const SystemParams& p, ModelKind model, double t_max, double tail_frac,
                          bool compensate_tail) {
  validate_params(p);
  const double floor_radius = kMinRadiusInLinkDistances * p.d;
  if (!(t_max > 0.0) || !std::isfinite(t_max)) return floor_radius;
  const GainMoments g = interferer_gain_moments(model, p.n_antennas);
  const double target = std::pow(p.d, -p.alpha) / t_max;  // interference level that matters at t_max
  double radius = 0.0;
  if (compensate_tail) {
    // var(tail) = 2 pi lambda E[h^2] R^(2 - 2 alpha) / (2 alpha - 2)
    const double coeff = 2.0 * kPi * p.lambda * g.second / (2.0 * p.alpha - 2.0);
    radius = std::pow(coeff / (tail_frac * target * target), 1.0 / (2.0 * p.alpha - 2.0));
  } else {
    const double coeff = 2.0 * kPi * p.lambda * g.mean / (p.alpha - 2.0);
    radius = std::pow(coeff / (tail_frac * target), 1.0 / (p.alpha - 2.0));
  }
  return std::max(floor_radius, radius);
}

std::vector<double> branch_interference(const SystemParams& p, ModelKind model, const InterfererField& field,
                                        Rng& rng) {
  validate_params(p);
  Workspace ws;
  compute_branches(p, model, field.distances, field.radius, field.tail_mean, rng, ws);
  return ws.branches;
}

double sample_sir(const SystemParams& p, ModelKind model, const InterfererField& field, Rng& rng) {
  return sample_sinr(p, model, field, rng, 0.0);
}

double sample_sinr(const SystemParams& p, ModelKind model, const InterfererField& field, Rng& rng,
                   double noise_power) {
  validate_params(p);
  if (!(noise_power >= 0.0)) throw Error(Errc::InvalidArgument, "noise power must be >= 0");
  if (model == ModelKind::NoCorrelation && !(field.radius > 0.0)) {
    throw Error(Errc::NonPositive, "no-correlation model needs the field radius to resample");
  }
  Workspace ws;
  draw_signal(p.n_antennas, rng, ws);
  compute_branches(p, model, field.distances, field.radius, field.tail_mean, rng, ws);
  return combine(p, ws, noise_power);
}

double noise_power_from_snr_db(double snr_db, const SystemParams& p) {
  return std::pow(p.d, -p.alpha) / db_to_linear(snr_db);
}

std::pair<Probability, Probability> wilson_interval(std::int64_t successes, std::int64_t n) {
  if (n < 1 || successes < 0 || successes > n) throw Error(Errc::InvalidArgument, "invalid binomial counts");
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half = kWilsonZ / denom * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  // Clamp against rounding so that the interval always brackets phat.
  const double lo = std::min(phat, std::max(0.0, center - half));
  const double hi = std::max(phat, std::min(1.0, center + half));
  return {Probability(lo), Probability(hi)};
}

double effective_window_radius(const SystemParams& p, ModelKind model, const MonteCarloConfig& mc, double t_max) {
  validate_params(p);
  mc.validate();
  if (mc.window_radius) return *mc.window_radius;
  return auto_window_radius(p, model, t_max, mc.tail_frac, mc.compensate_tail);
}

std::vector<CcdfEstimate> estimate_outage_curve(std::span<const double> thresholds, const SystemParams& p,
                                                ModelKind model, const MonteCarloConfig& mc) {
  validate_params(p);
  mc.validate();
  for (double t : thresholds) {
    if (!(t >= 0.0)) throw Error(Errc::InvalidArgument, "thresholds must be >= 0");
  }
  std::vector<double> sorted(thresholds.begin(), thresholds.end());
  std::sort(sorted.begin(), sorted.end());
  const double t_max = sorted.empty() ? 0.0 : sorted.back();

  // hist[k][j]: samples of worker k whose SIR lies in [sorted[j-1], sorted[j]).
  const int workers = resolve_threads(mc.threads);
  std::vector<std::vector<std::int64_t>> hist(static_cast<std::size_t>(workers),
                                              std::vector<std::int64_t>(sorted.size() + 1, 0));
  run_samples(p, model, mc, t_max, [&](int worker, std::int64_t, double sir) {
    const auto pos = std::upper_bound(sorted.begin(), sorted.end(), sir) - sorted.begin();
    ++hist[static_cast<std::size_t>(worker)][static_cast<std::size_t>(pos)];
  });

  std::vector<std::int64_t> below(sorted.size(), 0);  // samples with SIR < sorted[j]
  std::int64_t running = 0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    for (const auto& h : hist) running += h[j];
    below[j] = running;
  }

  std::vector<CcdfEstimate> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    // Smallest j with sorted[j] == t: SIR < t counts everything in buckets 0..j.
    const auto j = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
    const std::int64_t k = below[j];
    auto [lo, hi] = wilson_interval(k, mc.num_samples);
    out.push_back({t, Probability(static_cast<double>(k) / static_cast<double>(mc.num_samples)), lo, hi,
                   mc.num_samples});
  }
  return out;
}

CcdfEstimate estimate_outage(double T, const SystemParams& p, ModelKind model, const MonteCarloConfig& mc) {
  const double ts[] = {T};
  return estimate_outage_curve(ts, p, model, mc).front();
}

std::vector<double> draw_sir_samples(const SystemParams& p, ModelKind model, const MonteCarloConfig& mc,
                                     double t_max) {
  validate_params(p);
  mc.validate();
  std::vector<double> out(static_cast<std::size_t>(mc.num_samples));
  run_samples(p, model, mc, t_max, [&](int, std::int64_t i, double sir) { out[static_cast<std::size_t>(i)] = sir; });
  return out;
}

}  // namespace mrcsir
