#pragma once

#include "pcarisk/asymptotics.hpp"
#include "pcarisk/bounds.hpp"
#include "pcarisk/risk.hpp"
#include "pcarisk/serialize.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcarisk {

// Stream indices at or above this value are reserved for auxiliary draws
// (random bases, limit-law samples) so they never collide with replications.
inline constexpr std::uint64_t kAuxStreamBase = std::uint64_t{1} << 63;
inline constexpr std::uint64_t kBasisStream = kAuxStreamBase;
inline constexpr std::uint64_t kLimitStream = kAuxStreamBase + 1;

// How each replication obtains Sigma_hat: from n Gaussian rows, directly from
// its Wishart law (same distribution, cost independent of n), or Sigma itself.
enum class SigmaSource { samples, wishart, population };

std::string_view to_string(SigmaSource s);
SigmaSource parse_sigma_source(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::spiked;
  ModelParams params;
  int p = 40;
  std::vector<double> custom_values;  // for ModelKind::custom
  bool random_basis = false;          // Haar frame drawn from (basis_seed, kBasisStream)
  std::uint64_t basis_seed = 0;

  CovModel build() const;
};

struct ExperimentConfig {
  ModelSpec model;
  int n = 500;
  int d = 15;
  int replications = 1000;
  std::uint64_t base_seed = 0;
  BoundConstants constants;
  std::vector<double> x_grid;
  std::vector<int> n_grid;
  std::vector<double> y_grid;
  std::vector<int> d_grid;
  int limit_draws = 0;  // asymptotic experiment; 0 means `replications`
  int threads = 0;      // 0 means hardware concurrency
  SigmaSource source = SigmaSource::samples;
  std::map<std::string, double> annotations;  // calibration values recorded in the manifest
  std::string output_path;

  void validate() const;
};

struct MCResult {
  double estimate = 0.0;
  double std_error = 0.0;  // sample standard deviation over sqrt(replications)
  int replications = 0;
  std::uint64_t base_seed = 0;
  std::vector<double> values;  // filled when requested
};

using Estimator = std::function<double(const Realization&)>;

// Registered names: excess_risk, hs_sq, erm_gap, part_leq, part_gt, oracle_risk,
// lambda_hat_d, lambda_hat_d1, crude_deterministic, empirical_global, quadexp_excess,
// quadexp_hs, and the indicators right_event:<x>, left_event:<x>.
Estimator find_estimator(std::string_view name);
std::vector<std::string> estimator_names();

// Realization for replication `index`; random draws come from stream (seed, index).
Realization make_replication(const CovModel& model, int n, int d, std::uint64_t seed, std::uint64_t index,
                             SigmaSource source = SigmaSource::samples);

MCResult run_replications(const ExperimentConfig& cfg, std::string_view estimator, bool keep_values = false);

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
// handled exactly once; the first exception is rethrown after joining.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

double pairwise_sum(std::span<const double> v);
double mean_of(std::span<const double> v);
double stderr_of(std::span<const double> v);

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  double at(std::size_t row, std::string_view column) const;
  std::vector<double> column(std::string_view name) const;
  void write_csv(std::ostream& out) const;
};

SweepTable figure1_sweep(const ExperimentConfig& cfg);
SweepTable deviation_frequency_experiment(const ExperimentConfig& cfg);
SweepTable oracle_ratio_grid(const ExperimentConfig& cfg);

// n * excess_risk over cfg.replications draws at sample size n, sorted ascending.
std::vector<double> scaled_excess_samples(const ExperimentConfig& cfg, int n);
// Per n in n_grid: KS distance between scaled excess samples and limit-law draws.
SweepTable asymptotic_experiment(const ExperimentConfig& cfg);

std::string version_string();
Json config_to_json(const ExperimentConfig& cfg);
Json make_manifest(const ExperimentConfig& cfg, std::string_view experiment, double wall_seconds);

}  // namespace pcarisk
