#include "mrcsir/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrcsir/analysis.hpp"
#include "mrcsir/bounds.hpp"
#include "mrcsir/parallel.hpp"

#ifndef MRCSIR_VERSION
#define MRCSIR_VERSION "0.0.0"
#endif
#ifndef MRCSIR_GIT_HASH
#define MRCSIR_GIT_HASH "unknown"
#endif

namespace mrcsir::cli {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- output

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw Error(Errc::InvalidArgument, "row width does not match the header");
  rows_.push_back(std::move(row));
}

namespace {

int cell_rank(const Cell& c) { return static_cast<int>(c.index() == 2 ? 1 : c.index()); }

double cell_number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return static_cast<double>(std::get<std::int64_t>(c));
}

bool cell_less(const Cell& a, const Cell& b) {
  const int ra = cell_rank(a);
  const int rb = cell_rank(b);
  if (ra != rb) return ra < rb;
  if (ra == 1) return cell_number(a) < cell_number(b);
  if (ra == 3) return std::get<std::string>(a) < std::get<std::string>(b);
  return false;
}

}  // namespace

void Table::sort_by(const std::vector<std::size_t>& keys) {
  std::stable_sort(rows_.begin(), rows_.end(), [&](const auto& x, const auto& y) {
    for (std::size_t k : keys) {
      if (cell_less(x[k], y[k])) return true;
      if (cell_less(y[k], x[k])) return false;
    }
    return false;
  });
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  switch (c.index()) {
    case 1:
      return format_number(std::get<double>(c));
    case 2:
      return std::to_string(std::get<std::int64_t>(c));
    case 3:
      return std::get<std::string>(c);
    default:
      return {};
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

ojson cell_json(const Cell& c) {
  switch (c.index()) {
    case 1: {
      const double v = std::get<double>(c);
      return std::isfinite(v) ? ojson(v) : ojson(format_number(v));
    }
    case 2:
      return std::get<std::int64_t>(c);
    case 3:
      return std::get<std::string>(c);
    default:
      return nullptr;
  }
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns().size(); ++i) out += (i ? "," : "") + csv_escape(t.columns()[i]);
  out += '\n';
  for (const auto& row : t.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(cell_text(row[i]));
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& t, const std::string& meta_json) {
  ojson doc;
  doc["meta"] = ojson::parse(meta_json);
  ojson rows = ojson::array();
  for (const auto& row : t.rows()) {
    ojson obj = ojson::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns()[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename output onto " + path);
  }
}

// ---------------------------------------------------------------- config

namespace {

struct RunConfig {
  std::string command;
  std::string figure;
  SystemParams params{};
  std::vector<double> thresholds;
  std::string t_grid = "-10:20:12";
  std::vector<std::string> models;
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  double radius = 0.0;
  double snr_db = 0.0;
  bool has_radius = false;
  bool has_snr = false;
  double tail_frac = 1e-3;
  bool no_tail_compensation = false;
  int threads = 0;
  QuadratureConfig quad{};
  std::string out = "-";
  std::string format;

  double epsilon = 0.05;
  std::vector<int> n_list;
  std::vector<double> alpha_list;
  std::vector<double> lambda_list;
  std::string lambda_grid = "1e-7:1e-5:8";
  std::string fit_grid = "1e-7:1e-5:8";
  std::vector<int> sim_n_list;
};

Error config_error(const std::string& what) { return Error(Errc::InvalidArgument, what); }

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw config_error("not a number: '" + s + "'");
  return v;
}

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

GridSpec parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw config_error("grid '" + spec + "' is not LO:HI:COUNT");
  GridSpec g{parse_double(parts[0]), parse_double(parts[1]), 0};
  const double count = parse_double(parts[2]);
  if (!(count >= 1.0) || count != std::floor(count) || count > 1e6) {
    throw config_error("grid '" + spec + "' needs a positive integer count");
  }
  g.count = static_cast<int>(count);
  if (g.count == 1 ? g.lo != g.hi : !(g.hi > g.lo)) throw config_error("grid '" + spec + "' must be increasing");
  return g;
}

// Thresholds uniform in dB, returned in linear scale.
std::vector<double> db_grid(const std::string& spec) {
  const GridSpec g = parse_grid(spec);
  std::vector<double> out;
  for (int i = 0; i < g.count; ++i) {
    const double db = g.count == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.count - 1);
    out.push_back(db_to_linear(db));
  }
  return out;
}

std::vector<double> density_grid(const std::string& spec) {
  const GridSpec g = parse_grid(spec);
  if (!(g.lo > 0.0)) throw config_error("density grid '" + spec + "' must be positive");
  if (g.count == 1) return {g.lo};
  return log_grid(g.lo, g.hi, g.count);
}

template <class T>
void require_increasing(const std::vector<T>& v, const std::string& name) {
  if (v.empty()) throw config_error(name + " is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw config_error(name + " must be strictly increasing");
  }
}

std::vector<double> resolve_thresholds(const RunConfig& cfg) {
  std::vector<double> t = cfg.thresholds.empty() ? db_grid(cfg.t_grid) : cfg.thresholds;
  require_increasing(t, "threshold grid");
  for (double x : t) {
    if (!(x > 0.0) || !std::isfinite(x)) throw config_error("thresholds must be finite and > 0");
  }
  return t;
}

double single_threshold(const RunConfig& cfg) {
  if (cfg.thresholds.empty()) return 1.0;
  if (cfg.thresholds.size() != 1) throw config_error("this command takes exactly one --threshold");
  if (!(cfg.thresholds[0] > 0.0)) throw config_error("threshold must be > 0");
  return cfg.thresholds[0];
}

MonteCarloConfig mc_config(const RunConfig& cfg) {
  MonteCarloConfig mc;
  mc.num_samples = cfg.samples;
  mc.seed = cfg.seed;
  if (cfg.has_radius) mc.window_radius = cfg.radius;
  if (cfg.has_snr) mc.noise_snr_db = cfg.snr_db;
  mc.tail_frac = cfg.tail_frac;
  mc.compensate_tail = !cfg.no_tail_compensation;
  mc.threads = cfg.threads;
  mc.validate();
  return mc;
}

struct ModelSpec {
  std::string label;
  ModelKind kind = ModelKind::ExactCorrelated;
  bool single = false;
  bool simulate = false;
};

bool strip_suffix(std::string& s, std::string_view suffix) {
  if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    s.resize(s.size() - suffix.size());
    return true;
  }
  return false;
}

// "<model>[-analytic|-sim]"; without a suffix the analytic form is used when it exists.
ModelSpec parse_model_spec(std::string token, int N) {
  std::optional<bool> simulate;
  if (strip_suffix(token, "-analytic")) {
    simulate = false;
  } else if (strip_suffix(token, "-sim") || strip_suffix(token, "-simulation")) {
    simulate = true;
  }
  ModelSpec spec;
  if (token == "single" || token == "single-antenna") {
    if (simulate.value_or(false)) throw config_error("'single' is analytic only");
    spec.single = true;
    spec.label = "single-antenna";
    return spec;
  }
  spec.kind = parse_model_kind(token);
  spec.label = std::string(to_string(spec.kind));
  spec.simulate = simulate.value_or(!has_analytic_outage(spec.kind, N));
  if (!spec.simulate && !has_analytic_outage(spec.kind, N)) {
    throw config_error("no analytic form for model " + spec.label + " with N = " + std::to_string(N));
  }
  return spec;
}

ModelKind analytic_kind(std::string token) {
  strip_suffix(token, "-analytic");
  return parse_model_kind(token);
}

ojson params_json(const SystemParams& p) {
  return {{"lambda", p.lambda}, {"alpha", p.alpha}, {"d", p.d}, {"n_antennas", p.n_antennas}};
}

ojson base_meta(const RunConfig& cfg) {
  ojson meta;
  meta["tool"] = "mrcsir";
  meta["version"] = MRCSIR_VERSION;
  meta["git_hash"] = MRCSIR_GIT_HASH;
  meta["command"] = cfg.command;
  meta["figure"] = cfg.figure.empty() ? ojson(nullptr) : ojson(cfg.figure);
  meta["params"] = params_json(cfg.params);
  meta["quadrature"] = {{"rel_tol", cfg.quad.rel_tol},
                        {"abs_tol", cfg.quad.abs_tol},
                        {"outer_rel_tol", cfg.quad.outer_rel_tol},
                        {"max_subdivisions", cfg.quad.max_subdivisions}};
  meta["monte_carlo"] = {{"samples", cfg.samples},
                         {"seed", cfg.seed},
                         {"radius", cfg.has_radius ? ojson(cfg.radius) : ojson("auto")},
                         {"tail_frac", cfg.tail_frac},
                         {"compensate_tail", !cfg.no_tail_compensation},
                         {"snr_db", cfg.has_snr ? ojson(cfg.snr_db) : ojson(nullptr)}};
  return meta;
}

Cell opt_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

// ---------------------------------------------------------------- commands

struct Output {
  Table table;
  ojson meta;
};

// Evaluates fn(i) for i in [0, n) on the worker pool, results in index order.
template <class Fn>
std::vector<double> sweep(std::size_t n, int threads, Fn&& fn) {
  std::vector<double> out(n);
  parallel_blocks(static_cast<std::int64_t>(n), resolve_threads(threads), [&](int, std::int64_t b, std::int64_t e) {
    for (auto i = static_cast<std::size_t>(b); i < static_cast<std::size_t>(e); ++i) out[i] = fn(i);
  });
  return out;
}

Output cmd_ccdf(const RunConfig& cfg, std::ostream& err) {
  const SystemParams& p = validate_params(cfg.params);
  const std::vector<double> ts = resolve_thresholds(cfg);
  std::vector<std::string> tokens = cfg.models;
  if (tokens.empty()) tokens = {"exact"};
  std::vector<ModelSpec> specs;
  for (const auto& tok : tokens) specs.push_back(parse_model_spec(tok, p.n_antennas));

  Output o{Table({"T", "model", "cdf", "ci_low", "ci_high", "source"}), base_meta(cfg)};
  ojson radii = ojson::object();
  for (const auto& spec : specs) {
    if (spec.simulate) {
      const MonteCarloConfig mc = mc_config(cfg);
      err << "ccdf: simulating " << spec.label << " (" << mc.num_samples << " samples)\n";
      radii[spec.label] = effective_window_radius(p, spec.kind, mc, ts.back());
      for (const auto& e : estimate_outage_curve(ts, p, spec.kind, mc)) {
        o.table.add_row({e.threshold, spec.label, e.point.value(), e.ci_low.value(), e.ci_high.value(),
                         std::string("simulation")});
      }
      continue;
    }
    if (cfg.has_snr) throw config_error("analytic models are noise-free; drop --snr-db or use -sim models");
    SystemParams q = p;
    if (spec.single) q.n_antennas = 1;
    const auto cdf = sweep(ts.size(), cfg.threads, [&](std::size_t i) {
      return spec.single ? single_antenna_cdf(ts[i], q).value()
                         : outage_probability(ts[i], q, spec.kind, cfg.quad).value();
    });
    for (std::size_t i = 0; i < ts.size(); ++i) {
      o.table.add_row({ts[i], spec.label, cdf[i], Cell(), Cell(), std::string("analytic")});
    }
  }
  o.meta["window_radius"] = radii;
  o.table.sort_by({1, 5, 0});
  return o;
}

Output cmd_simulate(const RunConfig& cfg, std::ostream& err) {
  const SystemParams& p = validate_params(cfg.params);
  const std::vector<double> ts = resolve_thresholds(cfg);
  std::vector<std::string> tokens = cfg.models;
  if (tokens.empty()) tokens = {"exact"};
  const MonteCarloConfig mc = mc_config(cfg);

  Output o{Table({"T", "model", "cdf", "ci_low", "ci_high", "n", "radius"}), base_meta(cfg)};
  for (std::string tok : tokens) {
    strip_suffix(tok, "-sim");
    const ModelKind kind = parse_model_kind(tok);
    const std::string label(to_string(kind));
    const double radius = effective_window_radius(p, kind, mc, ts.back());
    err << "simulate: " << label << " (" << mc.num_samples << " samples, radius " << format_number(radius) << ")\n";
    for (const auto& e : estimate_outage_curve(ts, p, kind, mc)) {
      o.table.add_row({e.threshold, label, e.point.value(), e.ci_low.value(), e.ci_high.value(), e.n, radius});
    }
  }
  o.table.sort_by({1, 0});
  return o;
}

Output cmd_compare(const RunConfig& cfg, std::ostream&) {
  const std::vector<double> ts = resolve_thresholds(cfg);
  const std::vector<double> alphas = cfg.alpha_list.empty() ? std::vector<double>{cfg.params.alpha} : cfg.alpha_list;
  const std::vector<double> lambdas =
      cfg.lambda_list.empty() ? std::vector<double>{cfg.params.lambda} : cfg.lambda_list;
  const std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{cfg.params.n_antennas} : cfg.n_list;
  require_increasing(alphas, "--alpha-list");
  require_increasing(lambdas, "--lambda-list");
  require_increasing(ns, "--n-list");

  struct Point {
    SystemParams p;
    double T;
  };
  std::vector<Point> points;
  for (double a : alphas) {
    for (double l : lambdas) {
      for (int n : ns) {
        SystemParams p{l, a, cfg.params.d, n};
        validate_params(p);
        for (double t : ts) points.push_back({p, t});
      }
    }
  }
  std::vector<std::optional<double>> fc(points.size());
  std::vector<std::optional<double>> mm(points.size());
  parallel_blocks(static_cast<std::int64_t>(points.size()), resolve_threads(cfg.threads),
                  [&](int, std::int64_t b, std::int64_t e) {
                    for (auto i = static_cast<std::size_t>(b); i < static_cast<std::size_t>(e); ++i) {
                      const auto& [p, T] = points[i];
                      try {
                        if (p.n_antennas <= 2) fc[i] = delta_fc(T, p, cfg.quad);
                      } catch (const Error& ex) {
                        if (ex.code() != Errc::DivisionByNearZero) throw;
                      }
                      try {
                        mm[i] = delta_minmax(T, p);
                      } catch (const Error& ex) {
                        if (ex.code() != Errc::DivisionByNearZero) throw;
                      }
                    }
                  });

  Output o{Table({"T", "alpha", "lambda", "n_antennas", "delta_fc", "delta_minmax", "delta_minmax_asymptotic"}),
           base_meta(cfg)};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [p, T] = points[i];
    const SlopeBounds sb = asymptotic_cdf_slope_bounds(p.alpha, p.n_antennas);
    const double asym = p.n_antennas == 1 ? 1.0 : sb.upper_coeff / sb.lower_coeff;
    o.table.add_row({T, p.alpha, p.lambda, std::int64_t{p.n_antennas}, opt_cell(fc[i]), opt_cell(mm[i]), asym});
  }
  o.meta["d"] = cfg.params.d;
  o.table.sort_by({1, 2, 3, 0});
  return o;
}

Output cmd_critical_density(const RunConfig& cfg, std::ostream& err) {
  const double T = single_threshold(cfg);
  const std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{1, 2} : cfg.n_list;
  require_increasing(ns, "--n-list");
  const ModelKind model = cfg.models.empty() ? ModelKind::ExactCorrelated : analytic_kind(cfg.models.front());
  SystemParams base = cfg.params;
  validate_params(base);
  const double eps = cfg.epsilon;
  const double single = critical_density_single(eps, T, base.alpha, base.d);
  CriticalDensityOptions opt;
  opt.quadrature = cfg.quad;

  Output o{Table({"n_antennas", "lambda_exact", "lambda_min_bound", "lambda_max_bound", "lambda_fc", "lambda_mc",
                  "mc_ci_low", "mc_ci_high", "gain", "gain_source", "fit_gain", "fit_residual"}),
           base_meta(cfg)};
  std::vector<int> fit_n;
  std::vector<double> fit_gain;
  std::vector<std::vector<Cell>> rows;
  for (int n : ns) {
    SystemParams p = base;
    p.n_antennas = n;
    validate_params(p);
    std::optional<double> exact;
    if (has_analytic_outage(model, n)) {
      exact = n == 1 ? single : critical_density(eps, T, p, model, opt).lambda_eps;
    }
    const double lmin = critical_density(eps, T, p, ModelKind::MinFading, opt).lambda_eps;
    const double lmax = critical_density(eps, T, p, ModelKind::MaxFading, opt).lambda_eps;
    const double lfc = critical_density(eps, T, p, ModelKind::FullCorrelation, opt).lambda_eps;
    std::optional<CriticalDensityEstimate> mc;
    if (cfg.samples > 0) {
      err << "critical-density: simulating N = " << n << " (" << cfg.samples << " samples)\n";
      mc = critical_density_mc(eps, T, p, model, mc_config(cfg), std::sqrt(lmin * lmax));
    }
    std::optional<double> gain;
    std::string source;
    if (n == 1) {
      gain = 1.0;
      source = "exact";
    } else if (exact) {
      gain = *exact / single;
      source = "exact";
    } else if (mc) {
      gain = mc->lambda_eps / single;
      source = "simulation";
    }
    if (gain) {
      fit_n.push_back(n);
      fit_gain.push_back(*gain);
    }
    rows.push_back({std::int64_t{n}, opt_cell(exact), lmin, lmax, lfc,
                    mc ? Cell(mc->lambda_eps) : Cell(), mc ? Cell(mc->ci_low) : Cell(),
                    mc ? Cell(mc->ci_high) : Cell(), opt_cell(gain), source, Cell(), Cell()});
  }
  if (fit_n.size() >= 2) {
    const SqrtFit fit = sqrt_fit(fit_n, fit_gain);
    o.meta["sqrt_fit"] = {{"a", fit.a}, {"b", fit.b}, {"se_a", fit.se_a}, {"se_b", fit.se_b}};
    std::size_t k = 0;
    for (auto& row : rows) {
      if (row[8].index() == 0) continue;
      const double n = static_cast<double>(std::get<std::int64_t>(row[0]));
      row[10] = fit.a * std::sqrt(n) + fit.b;
      row[11] = fit.residuals[k++];
    }
    err << "critical-density: gain ~ " << format_number(fit.a) << " sqrt(N) + " << format_number(fit.b) << "\n";
  }
  for (auto& row : rows) o.table.add_row(std::move(row));
  o.meta["epsilon"] = eps;
  o.meta["threshold"] = T;
  o.meta["model"] = std::string(to_string(model));
  o.meta["lambda_single"] = single;
  o.table.sort_by({0});
  return o;
}

Output cmd_scdo(const RunConfig& cfg, std::ostream& err) {
  const double T = single_threshold(cfg);
  SystemParams base = cfg.params;
  validate_params(base);
  const ModelKind model = cfg.models.empty() ? ModelKind::ExactCorrelated : analytic_kind(cfg.models.front());
  if (!has_analytic_outage(model, base.n_antennas)) {
    throw config_error("scdo needs an analytic model; " + std::string(to_string(model)) + " has none for this N");
  }
  const std::vector<double> grid = density_grid(cfg.lambda_grid);
  const std::vector<double> fit_grid = density_grid(cfg.fit_grid);
  if (fit_grid.size() < 2) throw config_error("--fit-grid needs at least 2 points");

  const SlopeFit fit = scdo_slope(T, base, fit_grid, model, cfg.quad);
  const A1A2 a = a1_a2(T, base.alpha, base.d, cfg.quad);

  const std::string label(to_string(model));
  Output o{Table({"lambda", "series", "n_antennas", "snr_db", "cdf", "ci_low", "ci_high", "source"}), base_meta(cfg)};
  const auto cdf = sweep(grid.size(), cfg.threads, [&](std::size_t i) {
    SystemParams p = base;
    p.lambda = grid[i];
    return outage_probability(T, p, model, cfg.quad).value();
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    o.table.add_row({grid[i], label, std::int64_t{base.n_antennas}, Cell(), cdf[i], Cell(), Cell(),
                     std::string("analytic")});
  }

  for (int n : cfg.sim_n_list) {
    std::vector<std::optional<double>> snrs{std::nullopt};
    if (cfg.has_snr) snrs.push_back(cfg.snr_db);
    for (const auto& snr : snrs) {
      RunConfig c = cfg;
      c.has_snr = snr.has_value();
      MonteCarloConfig mc = mc_config(c);
      const std::string series = "sim-N" + std::to_string(n) + (snr ? "-noise" : "");
      err << "scdo: simulating " << series << " (" << mc.num_samples << " samples per density)\n";
      for (double l : grid) {
        SystemParams p{l, base.alpha, base.d, n};
        const CcdfEstimate e = estimate_outage(T, p, ModelKind::ExactCorrelated, mc);
        o.table.add_row({l, series, std::int64_t{n}, opt_cell(snr), e.point.value(), e.ci_low.value(),
                         e.ci_high.value(), std::string("simulation")});
      }
    }
  }

  o.meta["threshold"] = T;
  o.meta["model"] = label;
  o.meta["fit_grid"] = fit_grid;
  o.meta["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
  o.meta["a1"] = a.a1;
  o.meta["a2"] = a.a2;
  o.meta["a2_minus_a1"] = a.a2 - a.a1;
  o.meta["log_a2_minus_a1"] = a.a2 > a.a1 ? ojson(std::log(a.a2 - a.a1)) : ojson(nullptr);
  err << "scdo: slope " << format_number(fit.slope) << ", intercept " << format_number(fit.intercept) << ", r^2 "
      << format_number(fit.r_squared) << "\n";
  err << "scdo: A1 " << format_number(a.a1) << ", A2 " << format_number(a.a2) << "\n";
  if (!(a.a2 > a.a1)) {
    throw Error(Errc::NotConverged, "expected A2 > A1, got A1 = " + format_number(a.a1) +
                                        ", A2 = " + format_number(a.a2));
  }
  o.table.sort_by({1, 3, 0});
  return o;
}

// ---------------------------------------------------------------- presets

struct Preset {
  std::string command;
  std::map<std::string, std::function<void(RunConfig&)>> values;
};

Preset figure_preset(const std::string& fig) {
  Preset p;
  auto set_params = [](double lambda, double alpha, double d, int n) {
    return std::map<std::string, std::function<void(RunConfig&)>>{
        {"--lambda", [=](RunConfig& c) { c.params.lambda = lambda; }},
        {"--alpha", [=](RunConfig& c) { c.params.alpha = alpha; }},
        {"--d", [=](RunConfig& c) { c.params.d = d; }},
        {"--n-antennas", [=](RunConfig& c) { c.params.n_antennas = n; }}};
  };
  if (fig == "3") {
    p.command = "ccdf";
    p.values = set_params(1e-3, 3.5, 10.0, 2);
    p.values["--t-grid"] = [](RunConfig& c) { c.t_grid = "-10:20:12"; };
    p.values["--model"] = [](RunConfig& c) { c.models = {"exact-analytic", "exact-sim", "nc-sim"}; };
  } else if (fig == "4") {
    p.command = "compare";
    p.values = set_params(1e-3, 4.0, 15.0, 2);
    p.values["--t-grid"] = [](RunConfig& c) { c.t_grid = "-30:20:51"; };
    p.values["--alpha-list"] = [](RunConfig& c) { c.alpha_list = {3.0, 3.5, 4.0, 5.0}; };
    p.values["--lambda-list"] = [](RunConfig& c) { c.lambda_list = {1e-3, 1e-2}; };
    p.values["--n-list"] = [](RunConfig& c) { c.n_list = {2}; };
  } else if (fig == "5a") {
    p.command = "ccdf";
    p.values = set_params(1e-3, 4.0, 15.0, 2);
    p.values["--t-grid"] = [](RunConfig& c) { c.t_grid = "-20:20:21"; };
    p.values["--model"] = [](RunConfig& c) {
      c.models = {"single", "exact-analytic", "fc-analytic", "min-analytic", "max-analytic", "exact-sim"};
    };
  } else if (fig == "5b") {
    p.command = "compare";
    p.values = set_params(1e-3, 4.0, 10.0, 2);
    p.values["--t-grid"] = [](RunConfig& c) { c.t_grid = "-3:9:2"; };
    p.values["--alpha-list"] = [](RunConfig& c) { c.alpha_list = {3.0, 4.0, 5.0}; };
    p.values["--n-list"] = [](RunConfig& c) { c.n_list = {1, 2, 3, 4, 5, 6, 7, 8}; };
  } else if (fig == "6b") {
    p.command = "scdo";
    p.values = set_params(1e-3, 4.0, 10.0, 2);
    p.values["--threshold"] = [](RunConfig& c) { c.thresholds = {1.0}; };
    p.values["--lambda-grid"] = [](RunConfig& c) { c.lambda_grid = "1e-6:1e-3:7"; };
    p.values["--sim-n-list"] = [](RunConfig& c) { c.sim_n_list = {1, 2, 4}; };
    p.values["--snr-db"] = [](RunConfig& c) {
      c.snr_db = 14.0;
      c.has_snr = true;
    };
  } else if (fig == "7") {
    p.command = "critical-density";
    p.values = set_params(1e-3, 4.0, 15.0, 2);
    p.values["--threshold"] = [](RunConfig& c) { c.thresholds = {1.0}; };
    p.values["--epsilon"] = [](RunConfig& c) { c.epsilon = 0.05; };
    p.values["--n-list"] = [](RunConfig& c) { c.n_list = {1, 2, 3, 4, 5, 6, 7, 8}; };
  }
  return p;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::NonFiniteIntegrand:
    case Errc::MaxSubdivisionsExceeded:
    case Errc::BracketFailure:
    case Errc::NotConverged:
    case Errc::DivisionByNearZero:
      return kNumericalFailure;
    default:
      return kConfigError;
  }
}

}  // namespace

// ---------------------------------------------------------------- entry

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"SIR outage of multi-antenna MRC receivers in a Poisson field of interferers", "mrcsir"};
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
  app.require_subcommand(0, 1);
  std::multimap<std::string, CLI::Option*> opts;
  auto keep = [&](CLI::Option* o) {
    opts.emplace(o->get_name(), o);
    return o;
  };

  keep(app.add_option("--lambda", cfg.params.lambda, "Interferer density")->capture_default_str());
  keep(app.add_option("--alpha", cfg.params.alpha, "Path-loss exponent (> 2)")->capture_default_str());
  keep(app.add_option("--d", cfg.params.d, "Link distance")->capture_default_str());
  keep(app.add_option("--n-antennas", cfg.params.n_antennas, "Receive antennas")->capture_default_str());
  keep(app.add_option("--threshold", cfg.thresholds, "SIR threshold(s), linear; comma separated")->delimiter(','));
  keep(app.add_option("--t-grid", cfg.t_grid, "Threshold grid LO_DB:HI_DB:COUNT, uniform in dB")
           ->capture_default_str());
  keep(app.add_option("--model", cfg.models, "Models, e.g. exact-analytic,exact-sim,nc-sim,fc,min,max,single")
           ->delimiter(','));
  keep(app.add_option("--samples", cfg.samples, "Monte Carlo samples")->capture_default_str());
  keep(app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str());
  keep(app.add_option("--radius", cfg.radius, "Simulation window radius (default: automatic)"));
  keep(app.add_option("--snr-db", cfg.snr_db, "Mean per-branch SNR in dB for noise-added simulation"));
  keep(app.add_option("--tail-frac", cfg.tail_frac, "Window radius criterion")->capture_default_str());
  keep(app.add_flag("--no-tail-compensation", cfg.no_tail_compensation,
                    "Do not add the mean far-field interference to simulated branches"));
  keep(app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str());
  keep(app.add_option("--rel-tol", cfg.quad.rel_tol, "Inner quadrature relative tolerance")->capture_default_str());
  keep(app.add_option("--outer-rel-tol", cfg.quad.outer_rel_tol, "Outer quadrature relative tolerance")
           ->capture_default_str());
  keep(app.add_option("--max-subdivisions", cfg.quad.max_subdivisions, "Quadrature panel limit")
           ->capture_default_str());
  keep(app.add_option("--out", cfg.out, "Output file ('-' for stdout)")->capture_default_str());
  keep(app.add_option("--format", cfg.format, "csv or json (default: from --out extension, else csv)")
           ->check(CLI::IsMember({"csv", "json"})));
  keep(app.add_option("--figure", cfg.figure, "Preset for one of the reference figures")
           ->check(CLI::IsMember({"3", "4", "5a", "5b", "6b", "7"})));

  keep(app.add_option("--alpha-list", cfg.alpha_list, "Path-loss exponents (compare)")->delimiter(','));
  keep(app.add_option("--lambda-list", cfg.lambda_list, "Densities (compare)")->delimiter(','));
  keep(app.add_option("--n-list", cfg.n_list, "Antenna counts (compare, critical-density)")->delimiter(','));
  keep(app.add_option("--epsilon", cfg.epsilon, "Target outage (critical-density)")->capture_default_str());
  keep(app.add_option("--lambda-grid", cfg.lambda_grid, "Densities LO:HI:COUNT, log spaced (scdo)")
           ->capture_default_str());
  keep(app.add_option("--fit-grid", cfg.fit_grid, "Densities used for the slope fit (scdo)")->capture_default_str());
  keep(app.add_option("--sim-n-list", cfg.sim_n_list, "Antenna counts for simulated curves (scdo)")->delimiter(','));

  const std::pair<const char*, const char*> commands[] = {
      {"ccdf", "Outage CDF vs threshold for analytic and simulated models"},
      {"simulate", "Monte Carlo outage curves with confidence intervals"},
      {"compare", "Deviation ratios delta_fc and delta_minmax"},
      {"critical-density", "Critical density and its gain over one antenna"},
      {"scdo", "Outage vs density and the fitted diversity slope"}};
  for (const auto& [name, about] : commands) app.add_subcommand(name, about)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  auto given = [&](const std::string& name) {
    const auto [lo, hi] = opts.equal_range(name);
    return std::any_of(lo, hi, [](const auto& kv) { return kv.second->count() > 0; });
  };
  try {
    std::string command;
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    if (!cfg.figure.empty()) {
      const Preset preset = figure_preset(cfg.figure);
      if (!command.empty() && command != preset.command) {
        throw config_error("--figure " + cfg.figure + " belongs to the '" + preset.command + "' command");
      }
      command = preset.command;
      for (const auto& [name, apply] : preset.values) {
        if (!given(name)) apply(cfg);
      }
    }
    if (command.empty()) throw config_error("no command given (see --help)");
    cfg.command = command;
    cfg.has_radius = cfg.has_radius || given("--radius");
    cfg.has_snr = cfg.has_snr || given("--snr-db");
    cfg.quad.validate();
    if (cfg.samples < 0) throw config_error("--samples must be >= 0");

    Output result = command == "ccdf"               ? cmd_ccdf(cfg, err)
                    : command == "simulate"         ? cmd_simulate(cfg, err)
                    : command == "compare"          ? cmd_compare(cfg, err)
                    : command == "critical-density" ? cmd_critical_density(cfg, err)
                                                    : cmd_scdo(cfg, err);

    std::string format = cfg.format;
    if (format.empty()) {
      format = cfg.out.size() > 5 && cfg.out.compare(cfg.out.size() - 5, 5, ".json") == 0 ? "json" : "csv";
    }
    const std::string text = format == "json" ? to_json(result.table, result.meta.dump()) : to_csv(result.table);
    if (cfg.out == "-") {
      out << text;
    } else {
      write_atomic(cfg.out, text);
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace mrcsir::cli
