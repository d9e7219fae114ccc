#pragma once

#include "pcarisk/models.hpp"

#include <span>
#include <utility>
#include <vector>

namespace pcarisk {

enum class LawKind { excess_risk, hs_distance };

// Weighted chi-square mixture  scale * sum_{(j,k)} w_jk g_jk^2.
struct LimitLawSpec {
  LawKind law = LawKind::excess_risk;
  int d = 1;
  std::vector<std::pair<int, int>> pairs;  // 1-based (j, k), j <= d < k
  std::vector<double> weights;
  double scale = 1.0;

  double mean() const;
};

// Pairs j <= d < k with lambda_j > lambda_k, weight lambda_j lambda_k / (lambda_j - lambda_k).
LimitLawSpec make_excess_law(const Spectrum& spec, int d);
// All pairs j <= d < k, weight lambda_j lambda_k / (lambda_j - lambda_k)^2, scale 2. Needs lambda_d > lambda_{d+1}.
LimitLawSpec make_hs_law(const Spectrum& spec, int d);

double limit_law_sample(const LimitLawSpec& spec, RngStream& rng);
double hs_limit_law_sample(const LimitLawSpec& spec, RngStream& rng);

std::vector<double> limit_law_draws(const LimitLawSpec& spec, int count, std::uint64_t seed, std::uint64_t stream);

// Two-sample Kolmogorov-Smirnov distance; both inputs sorted ascending.
double ks_statistic(std::span<const double> a, std::span<const double> b);

}  // namespace pcarisk
