#include "pcarisk/risk.hpp"

namespace pcarisk {

Realization::Realization(CovModel model, const SymMatrix& sigma_hat, int d)
    : model_(std::move(model)), sigma_hat_(sigma_hat), emp_(sym_eig(sigma_hat)), d_(d) {
  if (sigma_hat_.dim() != model_.dim()) throw std::invalid_argument("Realization: dimension mismatch");
  finish();
}

Realization::Realization(CovModel model, EigenDecomposition emp, int d)
    : model_(std::move(model)), emp_(std::move(emp)), d_(d) {
  const int p = model_.dim();
  if (emp_.values.size() != p || emp_.vectors.rows() != p || emp_.vectors.cols() != p)
    throw std::invalid_argument("Realization: empirical eigenpairs have wrong shape");
  for (int i = 1; i < p; ++i)
    if (emp_.values(i) > emp_.values(i - 1))
      throw std::invalid_argument("Realization: empirical eigenvalues must be non-increasing");
  sigma_hat_ = SymMatrix(Matrix(emp_.vectors * emp_.values.asDiagonal() * emp_.vectors.transpose()));
  finish();
}

void Realization::finish() {
  const int p = model_.dim();
  if (d_ < 1 || d_ >= p) throw std::invalid_argument("Realization: need 1 <= d < p");
  delta_ = model_.covariance() - sigma_hat_;
  pop_leq_ = span_projector(pop_frame(), 1, d_);
  emp_leq_ = span_projector(emp_frame(), 1, d_);
  if (model_.identity_basis()) {
    delta_rot_ = delta_.matrix();
    overlaps_ = emp_frame().array().square().matrix();
  } else {
    delta_rot_ = pop_frame().transpose() * delta_.matrix() * pop_frame();
    overlaps_ = (pop_frame().transpose() * emp_frame()).array().square().matrix();
  }
}

double Realization::lambda_hat(int j) const {
  if (j < 1 || j > p()) throw std::out_of_range("lambda_hat: index out of range");
  return emp_.values(j - 1);
}

Matrix Realization::pop_proj(int j) const {
  const auto u = pop_frame().col(j - 1);
  return u * u.transpose();
}

Matrix Realization::emp_proj(int k) const {
  const auto u = emp_frame().col(k - 1);
  return u * u.transpose();
}

double reconstruction_error(const SymMatrix& sigma_like, const Projector& proj) {
  if (sigma_like.dim() != proj.dim()) throw std::invalid_argument("reconstruction_error: dimension mismatch");
  return sigma_like.matrix().trace() - hs_inner(sigma_like, proj.matrix());
}

double excess_risk(const Realization& r) {
  return hs_inner(r.sigma(), r.pop_leq().matrix() - r.emp_leq().matrix());
}

RiskParts risk_parts(const Realization& r, double mu) {
  const int d = r.d();
  const int p = r.p();
  const Matrix& ov = r.overlaps();
  RiskParts parts;
  for (int j = 1; j <= d; ++j)
    parts.leq += (r.lambda(j) - mu) * ov.row(j - 1).tail(p - d).sum();
  for (int k = d + 1; k <= p; ++k)
    parts.gt += (mu - r.lambda(k)) * ov.row(k - 1).head(d).sum();
  return parts;
}

double hs_distance_sq(const Projector& p, const Projector& phat) {
  if (p.rank() != phat.rank()) throw std::invalid_argument("hs_distance_sq: rank mismatch");
  if (p.dim() != phat.dim()) throw std::invalid_argument("hs_distance_sq: dimension mismatch");
  return hs_norm_sq(Matrix(p.matrix().matrix() - phat.matrix().matrix()));
}

double erm_gap(const Realization& r) {
  return hs_inner(r.delta(), r.pop_leq().matrix() - r.emp_leq().matrix());
}

RiskReport risk_report(const Realization& r, double mu) {
  const auto parts = risk_parts(r, mu);
  return RiskReport{excess_risk(r), parts.leq, parts.gt, mu,
                    hs_distance_sq(r.pop_leq(), r.emp_leq()), erm_gap(r)};
}

}  // namespace pcarisk
