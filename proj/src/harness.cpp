#include "pcarisk/harness.hpp"

#include "pcarisk/concentration.hpp"
#include "pcarisk/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#ifndef PCARISK_VERSION
#define PCARISK_VERSION "unknown"
#endif

namespace pcarisk {

CovModel ModelSpec::build() const {
  CovModel model = kind == ModelKind::custom ? make_custom_model(Spectrum(custom_values)) : make_model(kind, params, p);
  if (random_basis) {
    RngStream rng(basis_seed, kBasisStream);
    model = model.with_basis(random_orthonormal_frame(model.dim(), rng));
  }
  return model;
}

namespace {
template <class T>
void check_increasing(const std::vector<T>& grid, const char* name) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(name) + " must be strictly increasing");
}
}  // namespace

void ExperimentConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (n < 1) throw std::invalid_argument("n must be positive");
  check_increasing(x_grid, "x-grid");
  check_increasing(n_grid, "n-grid");
  check_increasing(y_grid, "y-grid");
  check_increasing(d_grid, "d-grid");
  constants.validate();
}

// ---------------------------------------------------------------------------
// Reductions and parallel execution

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Shifted by the first value, so a constant input returns that value exactly.
double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double shift = v.front();
  std::vector<double> centered(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) centered[i] = v[i] - shift;
  return shift + pairwise_sum(centered) / static_cast<double>(v.size());
}

double stderr_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Estimators

std::string_view to_string(SigmaSource s) {
  switch (s) {
    case SigmaSource::samples: return "samples";
    case SigmaSource::wishart: return "wishart";
    case SigmaSource::population: return "population";
  }
  return "?";
}

SigmaSource parse_sigma_source(std::string_view name) {
  for (auto s : {SigmaSource::samples, SigmaSource::wishart, SigmaSource::population})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown covariance source: " + std::string(name));
}

Realization make_replication(const CovModel& model, int n, int d, std::uint64_t seed, std::uint64_t index,
                             SigmaSource source) {
  switch (source) {
    case SigmaSource::population: return Realization(model, model.covariance(), d);
    case SigmaSource::wishart: return Realization(model, draw_wishart_covariance(model, n, seed, index), d);
    case SigmaSource::samples: break;
  }
  return Realization(model, empirical_covariance(draw_gaussian_samples(model, n, seed, index)), d);
}

namespace {

double oracle_risk(const Realization& r) {
  // <Sigma, Phat_{>d}> summed term by term keeps the digits of small tails.
  const Matrix& uh = r.emp_frame();
  const Matrix& sigma = r.sigma().matrix();
  double sum = 0.0;
  for (int l = r.p(); l > r.d(); --l) {
    const auto u = uh.col(l - 1);
    sum += u.dot(sigma * u);
  }
  return sum;
}

const std::map<std::string, Estimator, std::less<>>& registry() {
  static const std::map<std::string, Estimator, std::less<>> reg = {
      {"excess_risk", [](const Realization& r) { return excess_risk(r); }},
      {"hs_sq", [](const Realization& r) { return hs_distance_sq(r.pop_leq(), r.emp_leq()); }},
      {"erm_gap", [](const Realization& r) { return erm_gap(r); }},
      {"part_leq", [](const Realization& r) { return risk_parts(r, r.lambda(r.d() + 1)).leq; }},
      {"part_gt", [](const Realization& r) { return risk_parts(r, r.lambda(r.d() + 1)).gt; }},
      {"oracle_risk", oracle_risk},
      {"lambda_hat_d", [](const Realization& r) { return r.lambda_hat(r.d()); }},
      {"lambda_hat_d1", [](const Realization& r) { return r.lambda_hat(r.d() + 1); }},
      {"crude_deterministic", [](const Realization& r) { return crude_deterministic(r).value; }},
      {"empirical_global", [](const Realization& r) { return empirical_global_bound(r).value; }},
      {"quadexp_excess", [](const Realization& r) { return quadexp_excess_bound(r).value; }},
      {"quadexp_hs", [](const Realization& r) { return quadexp_hs_bound(r).value; }},
  };
  return reg;
}

}  // namespace

Estimator find_estimator(std::string_view name) {
  const auto colon = name.find(':');
  if (colon != std::string_view::npos) {
    const std::string head(name.substr(0, colon));
    const std::string arg(name.substr(colon + 1));
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw std::invalid_argument("bad estimator parameter: " + std::string(name));
    if (head == "right_event")
      return [x](const Realization& r) { return r.lambda_hat(r.d() + 1) - r.lambda(r.d() + 1) > x ? 1.0 : 0.0; };
    if (head == "left_event")
      return [x](const Realization& r) { return r.lambda_hat(r.d()) - r.lambda(r.d()) < -x ? 1.0 : 0.0; };
    throw std::invalid_argument("unknown estimator: " + std::string(name));
  }
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw std::invalid_argument("unknown estimator: " + std::string(name));
  return it->second;
}

std::vector<std::string> estimator_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  out.push_back("right_event:<x>");
  out.push_back("left_event:<x>");
  return out;
}

MCResult run_replications(const ExperimentConfig& cfg, std::string_view estimator, bool keep_values) {
  cfg.validate();
  const Estimator est = find_estimator(estimator);
  const CovModel model = cfg.model.build();
  std::vector<double> values(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, cfg.threads, [&](int i) {
    values[static_cast<std::size_t>(i)] =
        est(make_replication(model, cfg.n, cfg.d, cfg.base_seed, static_cast<std::uint64_t>(i), cfg.source));
  });
  MCResult out;
  out.estimate = mean_of(values);
  out.std_error = stderr_of(values);
  out.replications = cfg.replications;
  out.base_seed = cfg.base_seed;
  if (keep_values) out.values = std::move(values);
  return out;
}

// ---------------------------------------------------------------------------
// Tables

double SweepTable::at(std::size_t row, std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("SweepTable: no column " + std::string(name));
  return rows.at(row).at(static_cast<std::size_t>(it - columns.begin()));
}

std::vector<double> SweepTable::column(std::string_view name) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(at(i, name));
  return out;
}

void SweepTable::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::isinf(row[c])) {
        std::snprintf(buf, sizeof buf, "%s", row[c] > 0 ? "inf" : "-inf");
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      }
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

namespace {
std::vector<double> default_figure1_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);
  return grid;
}
}  // namespace

SweepTable figure1_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.model.kind != ModelKind::spiked || cfg.model.params.kappa != 1.0)
    throw std::invalid_argument("figure1_sweep: needs the spiked model with kappa = 1");
  const std::vector<double> grid = cfg.x_grid.empty() ? default_figure1_grid() : cfg.x_grid;
  const int p = cfg.model.p;
  const int d = cfg.d;
  const auto reps = static_cast<std::size_t>(cfg.replications);

  SweepTable table;
  table.columns = {"x",           "mc_mean",       "mc_stderr",        "erm_curve", "global_curve",
                   "scm_curve",   "erm_stderr",    "global_stderr",    "scm_condition_ok",
                   "C2",          "C3",            "C_display"};
  for (double x : grid) {
    ModelSpec spec = cfg.model;
    spec.params.x = x;
    spec.params.d = d;
    const CovModel model = spec.build();
    std::vector<double> excess(reps), gap(reps), global(reps);
    parallel_for(cfg.replications, cfg.threads, [&](int i) {
      const Realization r = make_replication(model, cfg.n, d, cfg.base_seed, static_cast<std::uint64_t>(i), cfg.source);
      const auto idx = static_cast<std::size_t>(i);
      excess[idx] = excess_risk(r);
      gap[idx] = erm_gap(r);
      global[idx] = empirical_global_bound(r).value;
    });
    const BoundValue scm = spiked_bounds(x, 1.0, p, d, cfg.n, cfg.constants).first;
    table.rows.push_back({x, mean_of(excess), stderr_of(excess), mean_of(gap), mean_of(global), scm.value,
                          stderr_of(gap), stderr_of(global), scm.condition_ok ? 1.0 : 0.0, cfg.constants.C2,
                          cfg.constants.C3, cfg.constants.split_constant()});
  }
  return table;
}

SweepTable deviation_frequency_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.x_grid.empty() && cfg.y_grid.empty())
    throw std::invalid_argument("deviation_frequency_experiment: needs an x-grid or a y-grid");
  const CovModel model = cfg.model.build();
  const Spectrum& spec = model.spectrum();
  const int d = cfg.d;
  const std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{cfg.n} : cfg.n_grid;
  const bool relative = cfg.x_grid.empty();
  const std::vector<double>& grid = relative ? cfg.y_grid : cfg.x_grid;
  const double lam_d = spec.lambda(d);
  const double lam_d1 = spec.lambda(d + 1);
  const auto reps = static_cast<std::size_t>(cfg.replications);

  SweepTable table;
  table.columns = {"n",          "x",         "freq_right", "stderr_right", "bound_right", "condition_right",
                   "freq_left",  "stderr_left", "bound_left", "condition_left", "C3",       "relative"};
  for (int n : ns) {
    std::vector<double> top(reps), bottom(reps);  // lambda_hat_d - lambda_d, lambda_hat_{d+1} - lambda_{d+1}
    parallel_for(cfg.replications, cfg.threads, [&](int i) {
      const auto stream = static_cast<std::uint64_t>(i);
      const Vector ev = sym_eigvals(cfg.source == SigmaSource::wishart
                                        ? draw_wishart_covariance(model, n, cfg.base_seed, stream)
                                        : empirical_covariance(draw_gaussian_samples(model, n, cfg.base_seed, stream)));
      const auto idx = static_cast<std::size_t>(i);
      top[idx] = ev(d - 1) - lam_d;
      bottom[idx] = ev(d) - lam_d1;
    });
    for (double g : grid) {
      const double x_right = relative ? g * lam_d : g;
      const double x_left = relative ? g * lam_d : g;
      double right = 0.0, left = 0.0;
      for (std::size_t i = 0; i < reps; ++i) {
        if (relative) {
          right += top[i] > x_right ? 1.0 : 0.0;
        } else {
          right += bottom[i] > x_right ? 1.0 : 0.0;
        }
        left += top[i] < -x_left ? 1.0 : 0.0;
      }
      right /= static_cast<double>(reps);
      left /= static_cast<double>(reps);
      auto se = [&](double f) { return std::sqrt(f * (1.0 - f) / static_cast<double>(reps)); };
      DeviationBound br, bl;
      if (relative) {
        const auto pair = relative_deviation_bounds(spec, n, d, g, cfg.constants);
        br = pair.upper;
        bl = pair.lower;
      } else {
        br = right_deviation_bound(spec, n, d, g, cfg.constants);
        bl = left_deviation_bound(spec, n, d, g, cfg.constants);
      }
      table.rows.push_back({double(n), g, right, se(right), br.prob_bound, br.condition_ok ? 1.0 : 0.0, left,
                            se(left), bl.prob_bound, bl.condition_ok ? 1.0 : 0.0, cfg.constants.C3,
                            relative ? 1.0 : 0.0});
    }
  }
  return table;
}

SweepTable oracle_ratio_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  const CovModel model = cfg.model.build();
  const Spectrum& spec = model.spectrum();
  const std::vector<int> ds = cfg.d_grid.empty() ? std::vector<int>{cfg.d} : cfg.d_grid;
  for (int d : ds)
    if (d < 1 || d >= spec.dim()) throw std::invalid_argument("oracle_ratio_grid: d out of range");
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<std::vector<double>> risks(ds.size(), std::vector<double>(reps));
  parallel_for(cfg.replications, cfg.threads, [&](int i) {
    const Realization r = make_replication(model, cfg.n, ds.front(), cfg.base_seed, static_cast<std::uint64_t>(i),
                                           cfg.source);
    const Matrix& uh = r.emp_frame();
    const Matrix& sigma = r.sigma().matrix();
    std::vector<double> per_dir(static_cast<std::size_t>(r.p()));
    for (int l = 1; l <= r.p(); ++l) {
      const auto u = uh.col(l - 1);
      per_dir[static_cast<std::size_t>(l - 1)] = u.dot(sigma * u);
    }
    for (std::size_t g = 0; g < ds.size(); ++g) {
      double sum = 0.0;
      for (int l = r.p(); l > ds[g]; --l) sum += per_dir[static_cast<std::size_t>(l - 1)];
      risks[g][static_cast<std::size_t>(i)] = sum;
    }
  });
  SweepTable table;
  table.columns = {"d", "mc_risk", "mc_stderr", "oracle_risk", "ratio", "ratio_stderr", "oracle_bound",
                   "oracle_bound_condition_ok", "C3"};
  for (std::size_t g = 0; g < ds.size(); ++g) {
    const int d = ds[g];
    const double tail = spec.tr_gt(d);
    const double m = mean_of(risks[g]);
    const double se = stderr_of(risks[g]);
    const BoundValue ob = oracle_bound(spec, cfg.n, d, d, cfg.constants);
    table.rows.push_back({double(d), m, se, tail, m / tail, se / tail, ob.value, ob.condition_ok ? 1.0 : 0.0,
                          cfg.constants.C3});
  }
  return table;
}

std::vector<double> scaled_excess_samples(const ExperimentConfig& cfg, int n) {
  cfg.validate();
  const CovModel model = cfg.model.build();
  std::vector<double> out(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, cfg.threads, [&](int i) {
    out[static_cast<std::size_t>(i)] =
        n * excess_risk(make_replication(model, n, cfg.d, cfg.base_seed, static_cast<std::uint64_t>(i), cfg.source));
  });
  std::sort(out.begin(), out.end());
  return out;
}

SweepTable asymptotic_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const CovModel model = cfg.model.build();
  const LimitLawSpec law = make_excess_law(model.spectrum(), cfg.d);
  const int draws = cfg.limit_draws > 0 ? cfg.limit_draws : cfg.replications;
  std::vector<double> limit = limit_law_draws(law, draws, cfg.base_seed, kLimitStream);
  std::sort(limit.begin(), limit.end());
  const std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{cfg.n} : cfg.n_grid;
  SweepTable table;
  table.columns = {"n", "ks", "mc_mean_scaled", "mc_stderr_scaled", "limit_mean", "limit_sample_mean"};
  for (int n : ns) {
    const auto samples = scaled_excess_samples(cfg, n);
    table.rows.push_back({double(n), ks_statistic(samples, limit), mean_of(samples), stderr_of(samples),
                          law.mean(), mean_of(limit)});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Manifest

std::string version_string() { return std::string("pcarisk ") + PCARISK_VERSION; }

Json config_to_json(const ExperimentConfig& cfg) {
  Json model;
  model["kind"] = std::string(to_string(cfg.model.kind));
  model["p"] = cfg.model.p;
  model["alpha"] = cfg.model.params.alpha;
  model["x"] = cfg.model.params.x;
  model["kappa"] = cfg.model.params.kappa;
  model["sigma2"] = cfg.model.params.sigma2;
  model["top_profile"] = cfg.model.params.top_profile;
  model["custom_values"] = cfg.model.custom_values;
  model["random_basis"] = cfg.model.random_basis;
  model["basis_seed"] = cfg.model.basis_seed;
  Json out;
  out["model"] = model;
  out["n"] = cfg.n;
  out["d"] = cfg.d;
  out["replications"] = cfg.replications;
  out["base_seed"] = cfg.base_seed;
  out["x_grid"] = cfg.x_grid;
  out["n_grid"] = cfg.n_grid;
  out["y_grid"] = cfg.y_grid;
  out["d_grid"] = cfg.d_grid;
  out["limit_draws"] = cfg.limit_draws;
  out["sigma_source"] = std::string(to_string(cfg.source));
  out["rng"] = RngStream::kAlgorithm;
  return out;
}

Json make_manifest(const ExperimentConfig& cfg, std::string_view experiment, double wall_seconds) {
  Json out;
  out["experiment"] = std::string(experiment);
  out["version"] = version_string();
  out["config"] = config_to_json(cfg);
  out["constants"] = to_json(cfg.constants);
  Json notes = Json::object();
  for (const auto& [key, v] : cfg.annotations) notes[key] = json_number(v);
  out["calibration"] = notes;
  out["wall_time_s"] = wall_seconds;
  return out;
}

}  // namespace pcarisk
