#pragma once

#include "pcarisk/risk.hpp"

#include <span>
#include <string>
#include <vector>

namespace pcarisk {

// Outcome of one numerical identity check. Matrix identities report
// Hilbert-Schmidt norms of both sides in lhs/rhs and the norm of the
// difference in abs_err.
struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tol = 0.0;
  bool degenerate = false;
  bool passed = true;  // degenerate checks always count as passed
};

enum class Side { leq, gt };

inline constexpr double kDegenerateRel = 1e-9;
// Overlaps are dimensionless; below this magnitude relative errors are
// measured against the floor instead.
inline constexpr double kOverlapFloor = 1e-14;
// Split checks compare against max(|lhs|, |rhs|, |part_leq| + |part_gt|) and
// never against less than this fraction of tr(Sigma), where both sides are
// roundoff-level zeros.
inline constexpr double kSplitFloor = 1e-7;

// (lambda_j - lambda_hat_k) P_j Phat_k == P_j Delta Phat_k
IdentityCheck interaction_identity(const Realization& r, int j, int k);
// <P_j, Phat_{>d}> (leq) or <P_k, Phat_{<=d}> (gt) against its expansion in
// ||P_j Delta Phat_k||^2 / (lambda_j - lambda_hat_k)^2.
IdentityCheck overlap_expansion(const Realization& r, Side side, int index);
// Four-term second-order expansion of P_j Phat_{>d} (leq) or P_k Phat_{<=d} (gt).
IdentityCheck second_order_expansion(const Realization& r, Side side, int index);
// Excess risk against the sum of its two spectral parts at level mu.
IdentityCheck spectral_split_identity(const Realization& r, double mu);

// Every check above on one realization: all (j,k) pairs, every admissible
// index on both sides, and the split at each mu.
std::vector<IdentityCheck> verify_identities(const Realization& r, std::span<const double> mus);

}  // namespace pcarisk
