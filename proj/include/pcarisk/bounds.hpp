#pragma once

#include "pcarisk/risk.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace pcarisk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundConstants {
  double C1 = 1.0;  // sub-Gaussian norm constant; enters only through the others
  double C2 = 1.0;  // fourth-moment constant, equal to 1 for Gaussian data
  double C3 = 1.0;  // covariance concentration constant
  std::optional<double> C_display;  // replaces every composite constant when set
  std::optional<double> c1;         // lower-gap ratio for the regular-decay corollary
  std::optional<double> c_dev;      // relative-deviation exponent constant
  double c_lower = 1.0;             // minimax lower-bound constant

  // Composite constant of the local bounds with mu-split (8 C2 + 8 C3^2).
  double split_constant() const { return C_display.value_or(8.0 * C2 + 8.0 * C3 * C3); }
  // Composite constant of the weighted-concentration bounds (16 C2 + 8 C3^2).
  double weighted_constant() const { return C_display.value_or(16.0 * C2 + 8.0 * C3 * C3); }
  // Constant of the global expectation bound, which has no explicit form.
  double global_constant() const { return C_display.value_or(1.0); }
  double deviation_constant() const { return c_dev.value_or(1.0 / (32.0 * C3 * C3)); }

  void validate() const;
};

struct BoundValue {
  std::string name;
  double value = 0.0;  // may be +inf
  std::map<std::string, double> params;
  bool condition_ok = true;
  std::optional<double> condition_lhs;
  std::optional<double> condition_rhs;
};

struct BoundPair {
  BoundValue first;
  BoundValue second;
};

// Realization-level bounds.
BoundValue crude_deterministic(const Realization& r);
BoundValue empirical_global_bound(const Realization& r);
BoundValue quadexp_excess_bound(const Realization& r);
BoundValue quadexp_hs_bound(const Realization& r);

struct DavisKahanChain {
  double hs_sq = 0.0;
  double mid = 0.0;
  double right = 0.0;
};
DavisKahanChain davis_kahan_chain(const Realization& r);

// Spectrum-level expectation bounds.
BoundValue crude_expectation(const Spectrum& spec, int n, int d, const BoundConstants& k);
BoundValue global_expectation_bound(const Spectrum& spec, int n, int d, const BoundConstants& k);
BoundValue local_leq_bound(const Spectrum& spec, int n, int d, double mu, int r_idx, const BoundConstants& k);
BoundValue local_gt_bound(const Spectrum& spec, int n, int d, double mu, int l_idx, const BoundConstants& k);
BoundPair minima_bound(const Spectrum& spec, int n, int d, const BoundConstants& k);
BoundPair local_global_bounds(const Spectrum& spec, int n, int d, const BoundConstants& k);
BoundValue weighted_bound(const Spectrum& spec, int n, int d, int s_idx, int r_idx, const BoundConstants& k);
BoundPair weighted_pair_bounds(const Spectrum& spec, int n, int d, const BoundConstants& k);
BoundValue oracle_bound(const Spectrum& spec, int n, int d, int s_idx, const BoundConstants& k);
BoundPair spiked_bounds(double x, double kappa, int p, int d, int n, const BoundConstants& k);

// Left side of the weighted-concentration hypothesis
// (lambda_s/(lambda_s-mu)) sum_{j<=s} lambda_j/(lambda_j-mu); +inf when lambda_s <= mu.
double weighted_condition_lhs(const Spectrum& spec, int s, double mu);
// Largest s in 1..d whose hypothesis holds at mu = lambda_{d+1}; 0 if none.
int largest_admissible_s(const Spectrum& spec, int n, int d, const BoundConstants& k);
// Largest c1 with lambda_d - lambda_{d+1} >= c1 (lambda_d - lambda_p); +inf if lambda_d == lambda_p.
double admissible_c1(const Spectrum& spec, int d);

// Min over r of local_leq_bound at mu = lambda_{d+1} (harness helper).
BoundValue best_local_leq(const Spectrum& spec, int n, int d, const BoundConstants& k);

}  // namespace pcarisk
