#pragma once

#include "pcarisk/bounds.hpp"

#include <string>

namespace pcarisk {

// Operators diagonal in the population eigenbasis:
//   s_leq(s, mu):  sum_{j<=s} (lambda_j - mu)^{-1/2} P_j
//   r_leq(s, mu):  sum_{j<=s} (lambda_j - mu)^{1/2}  P_j
//   s_gt(d):       sum_{k>d}  (lambda_d - lambda_k)^{-1/2} P_k
//   t_gt(d, x):    sum_{k>d}  (lambda_{d+1} - lambda_k + x)^{-1/2} P_k
//   t_leq(d, x):   sum_{j<=d} (lambda_j - lambda_d + x)^{-1/2} P_j
enum class WeightedKind { s_leq, r_leq, s_gt, t_gt, t_leq };

struct WeightedParams {
  int index = 1;    // s for s_leq/r_leq, d otherwise
  double mu = 0.0;  // s_leq / r_leq
  double x = 0.0;   // t_gt / t_leq
};

struct WeightedOperator {
  WeightedKind kind;
  Vector weights;  // per population eigendirection, zero off the support
  SymMatrix matrix;
};

WeightedOperator weighted_operator(const CovModel& model, WeightedKind kind, const WeightedParams& prm);

enum class DeviationSide { upper_d_plus_1, lower_d, relative };

struct DeviationBound {
  std::string name;
  DeviationSide side = DeviationSide::upper_d_plus_1;
  double x_or_y = 0.0;
  double prob_bound = 0.0;  // raw value, may exceed 1
  bool condition_ok = true;
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;
  std::map<std::string, double> params;

  bool vacuous() const { return prob_bound > 1.0; }
  double reported() const { return prob_bound > 1.0 ? 1.0 : prob_bound; }
};

// P(lambda_hat_{d+1} - lambda_{d+1} > x)
DeviationBound right_deviation_bound(const Spectrum& spec, int n, int d, double x, const BoundConstants& k);
// P(lambda_hat_d - lambda_d < -x)
DeviationBound left_deviation_bound(const Spectrum& spec, int n, int d, double x, const BoundConstants& k);

enum class GapSide { right, left };
// right: j <= d with x = (lambda_j - lambda_{d+1})/2; left: k > d with x = (lambda_d - lambda_k)/2.
DeviationBound gap_event_bounds(const Spectrum& spec, int n, int d, int index, GapSide side,
                                const BoundConstants& k);

struct DeviationPair {
  DeviationBound upper;
  DeviationBound lower;
};
// Relative deviations of lambda_hat_d by more than y * lambda_d.
DeviationPair relative_deviation_bounds(const Spectrum& spec, int n, int d, double y, const BoundConstants& k);

// P(||S_{<=s} Delta S_{<=s}||_inf > 1/16) for mu in [0, lambda_s).
DeviationBound weighted_cov_concentration(const Spectrum& spec, int n, int s, double mu, const BoundConstants& k);

// Separation hypothesis (lambda_d/(lambda_d-lambda_{d+1})) sum_{j<=d} lambda_j/(n(lambda_j-lambda_{d+1}))
// <= 1/(8 C3^2) of the relative-deviation discussion.
struct ConditionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};
ConditionCheck separation_condition(const Spectrum& spec, int n, int d, const BoundConstants& k);

struct ShiftEquivalence {
  bool top_exceeds;      // lambda_1(T) > y
  bool shifted_exceeds;  // lambda_1((y-S)^{-1/2}(T-S)(y-S)^{-1/2}) > 1
  bool agree() const { return top_exceeds == shifted_exceeds; }
};
ShiftEquivalence operator_shift_equivalence_check(const SymMatrix& s, const SymMatrix& t, double y);

std::string_view to_string(DeviationSide side);

}  // namespace pcarisk
