#pragma once

#include "pcarisk/models.hpp"

namespace pcarisk {

// One draw of (Sigma, Sigma_hat, Delta = Sigma - Sigma_hat, d) with the
// empirical eigenpairs. Immutable after construction.
class Realization {
public:
  // Eigendecomposes sigma_hat.
  Realization(CovModel model, const SymMatrix& sigma_hat, int d);
  // Uses the given empirical eigenpairs; sigma_hat is rebuilt as V diag(values) V^T.
  Realization(CovModel model, EigenDecomposition emp, int d);

  const CovModel& model() const { return model_; }
  const SymMatrix& sigma() const { return model_.covariance(); }
  const SymMatrix& sigma_hat() const { return sigma_hat_; }
  const SymMatrix& delta() const { return delta_; }
  const EigenDecomposition& emp() const { return emp_; }
  int d() const { return d_; }
  int p() const { return model_.dim(); }

  double lambda(int j) const { return model_.lambda(j); }
  double lambda_hat(int j) const;

  const Matrix& pop_frame() const { return model_.basis(); }
  const Matrix& emp_frame() const { return emp_.vectors; }

  const Projector& pop_leq() const { return pop_leq_; }
  const Projector& emp_leq() const { return emp_leq_; }

  // u_j u_j^T and uhat_k u_hat_k^T (1-based).
  Matrix pop_proj(int j) const;
  Matrix emp_proj(int k) const;

  // Delta in the population eigenbasis, U^T Delta U.
  const Matrix& delta_rotated() const { return delta_rot_; }
  // overlaps()(j-1, k-1) = <P_j, Phat_k> = (u_j . uhat_k)^2.
  const Matrix& overlaps() const { return overlaps_; }

private:
  void finish();

  CovModel model_;
  SymMatrix sigma_hat_;
  EigenDecomposition emp_;
  int d_;
  SymMatrix delta_;
  Projector pop_leq_;
  Projector emp_leq_;
  Matrix delta_rot_;
  Matrix overlaps_;
};

struct RiskReport {
  double excess = 0.0;
  double part_leq = 0.0;
  double part_gt = 0.0;
  double mu = 0.0;
  double hs_sq = 0.0;
  double erm_gap = 0.0;
};

struct RiskParts {
  double leq = 0.0;
  double gt = 0.0;
};

// <S, I - P>
double reconstruction_error(const SymMatrix& sigma_like, const Projector& proj);
// <Sigma, P_{<=d} - Phat_{<=d}>
double excess_risk(const Realization& r);
// Spectral split of the excess risk at level mu, computed from eigenvector overlaps.
RiskParts risk_parts(const Realization& r, double mu);
// ||P - Phat||_2^2 for projectors of equal rank.
double hs_distance_sq(const Projector& p, const Projector& phat);
// <Delta, P_{<=d} - Phat_{<=d}>
double erm_gap(const Realization& r);

RiskReport risk_report(const Realization& r, double mu);

}  // namespace pcarisk
