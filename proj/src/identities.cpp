#include "pcarisk/identities.hpp"

#include <algorithm>
#include <cmath>

namespace pcarisk {

namespace {

double relative(double abs_err, double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return scale > 0.0 ? abs_err / scale : 0.0;
}

bool tiny(double gap, double lambda1) { return std::abs(gap) < kDegenerateRel * lambda1; }

void check_index(const Realization& r, Side side, int index) {
  const bool ok = side == Side::leq ? (index >= 1 && index <= r.d()) : (index > r.d() && index <= r.p());
  if (!ok) throw std::out_of_range("identity check: index does not match side");
}

// Empirical eigenvector overlaps with Delta: B(j,l) = u_j^T Delta uhat_l.
Matrix delta_cross(const Realization& r) {
  return r.pop_frame().transpose() * r.delta().matrix() * r.emp_frame();
}

}  // namespace

IdentityCheck interaction_identity(const Realization& r, int j, int k) {
  if (j < 1 || j > r.p() || k < 1 || k > r.p()) throw std::out_of_range("interaction_identity: index");
  const double gap = r.lambda(j) - r.lambda_hat(k);
  const Matrix pj = r.pop_proj(j);
  const Matrix pk_hat = r.emp_proj(k);
  const Matrix left = gap * (pj * pk_hat);
  const Matrix right = pj * r.delta().matrix() * pk_hat;
  IdentityCheck c;
  c.name = "interaction(" + std::to_string(j) + "," + std::to_string(k) + ")";
  c.lhs = left.norm();
  c.rhs = right.norm();
  c.abs_err = (left - right).norm();
  c.rel_err = relative(c.abs_err, c.lhs, c.rhs, 0.0);
  c.tol = 1e-9 * std::max(r.lambda(1), r.delta().matrix().norm());
  c.degenerate = tiny(gap, r.lambda(1));
  c.passed = c.abs_err <= c.tol;
  return c;
}

IdentityCheck overlap_expansion(const Realization& r, Side side, int index) {
  check_index(r, side, index);
  const int d = r.d();
  const int p = r.p();
  const double lam1 = r.lambda(1);
  const Matrix cross = delta_cross(r);
  const auto u = r.pop_frame().col(index - 1);

  IdentityCheck c;
  double expansion = 0.0;
  double direct = 0.0;
  if (side == Side::leq) {
    c.name = "overlap_leq(" + std::to_string(index) + ")";
    const auto tail = r.emp_frame().rightCols(p - d);
    direct = (tail.transpose() * u).squaredNorm();
    for (int k = d + 1; k <= p; ++k) {
      const double gap = r.lambda(index) - r.lambda_hat(k);
      c.degenerate = c.degenerate || tiny(gap, lam1);
      const double b = cross(index - 1, k - 1);
      expansion += b * b / (gap * gap);
    }
  } else {
    c.name = "overlap_gt(" + std::to_string(index) + ")";
    const auto head = r.emp_frame().leftCols(d);
    direct = (head.transpose() * u).squaredNorm();
    for (int j = 1; j <= d; ++j) {
      const double gap = r.lambda_hat(j) - r.lambda(index);
      c.degenerate = c.degenerate || tiny(gap, lam1);
      const double b = cross(index - 1, j - 1);
      expansion += b * b / (gap * gap);
    }
  }
  c.lhs = direct;
  c.rhs = expansion;
  c.abs_err = std::abs(direct - expansion);
  c.rel_err = relative(c.abs_err, direct, expansion, kOverlapFloor);
  c.tol = 1e-6;
  c.passed = c.degenerate || c.rel_err <= c.tol;
  return c;
}

IdentityCheck second_order_expansion(const Realization& r, Side side, int index) {
  check_index(r, side, index);
  const int d = r.d();
  const int p = r.p();
  const double lam1 = r.lambda(1);
  const Matrix& dr = r.delta_rotated();
  const Matrix cross = delta_cross(r);
  const Matrix& u = r.pop_frame();
  const Matrix& uh = r.emp_frame();
  auto lam = [&](int i) { return r.lambda(i); };
  auto lamh = [&](int i) { return r.lambda_hat(i); };

  // Every term is P_index times something; compare the row vectors
  // u_index^T (...) whose norms equal the Hilbert-Schmidt norms.
  bool degenerate = false;
  auto inv = [&](double gap) {
    degenerate = degenerate || tiny(gap, lam1);
    return 1.0 / gap;
  };
  Vector first = Vector::Zero(p);   // coefficients on the population basis
  Vector second = Vector::Zero(p);  // coefficients on the empirical basis
  const int a = index;
  const bool leq = side == Side::leq;
  // First-order term: sum over the opposite block of P_a Delta P_b / (lambda_a - lambda_b).
  for (int b = 1; b <= p; ++b) {
    if ((b <= d) == leq) continue;
    first(b - 1) = dr(a - 1, b - 1) * inv(lam(a) - lam(b));
  }
  for (int b = 1; b <= p; ++b) {
    for (int l = 1; l <= p; ++l) {
      const double num = dr(a - 1, b - 1) * cross(b - 1, l - 1);
      const bool b_same = (b <= d) == leq;  // b in the same block as a
      const bool l_same = (l <= d) == leq;
      if (b_same && !l_same) {
        second(l - 1) += num * inv(lam(a) - lamh(l)) * inv(lam(b) - lamh(l));
      } else if (!b_same && l_same) {
        second(l - 1) += num * inv(lam(a) - lam(b)) * inv(lamh(l) - lam(b));
      } else if (!b_same && !l_same) {
        second(l - 1) -= num * inv(lam(a) - lamh(l)) * inv(lam(a) - lam(b));
      }
    }
  }
  const Vector rhs = u * first + uh * second;
  const Matrix block = leq ? Matrix(uh.rightCols(p - d)) : Matrix(uh.leftCols(d));
  const Vector lhs = block * (block.transpose() * u.col(a - 1));

  IdentityCheck c;
  c.name = std::string(leq ? "second_order_leq(" : "second_order_gt(") + std::to_string(a) + ")";
  c.lhs = lhs.norm();
  c.rhs = rhs.norm();
  c.abs_err = (lhs - rhs).norm();
  c.rel_err = relative(c.abs_err, c.lhs, c.rhs, kOverlapFloor);
  c.tol = 1e-6;
  c.degenerate = degenerate;
  c.passed = c.degenerate || c.rel_err <= c.tol;
  return c;
}

IdentityCheck spectral_split_identity(const Realization& r, double mu) {
  const double direct = excess_risk(r);
  const auto parts = risk_parts(r, mu);
  IdentityCheck c;
  c.name = "spectral_split(mu=" + std::to_string(mu) + ")";
  c.lhs = direct;
  c.rhs = parts.leq + parts.gt;
  c.abs_err = std::abs(c.lhs - c.rhs);
  const double floor = std::max(std::abs(parts.leq) + std::abs(parts.gt), kSplitFloor * r.sigma().matrix().trace());
  c.rel_err = relative(c.abs_err, c.lhs, c.rhs, floor);
  c.tol = 1e-8;
  c.passed = c.rel_err <= c.tol;
  return c;
}

std::vector<IdentityCheck> verify_identities(const Realization& r, std::span<const double> mus) {
  std::vector<IdentityCheck> out;
  for (int j = 1; j <= r.p(); ++j)
    for (int k = 1; k <= r.p(); ++k) out.push_back(interaction_identity(r, j, k));
  for (int j = 1; j <= r.d(); ++j) {
    out.push_back(overlap_expansion(r, Side::leq, j));
    out.push_back(second_order_expansion(r, Side::leq, j));
  }
  for (int k = r.d() + 1; k <= r.p(); ++k) {
    out.push_back(overlap_expansion(r, Side::gt, k));
    out.push_back(second_order_expansion(r, Side::gt, k));
  }
  for (double mu : mus) out.push_back(spectral_split_identity(r, mu));
  return out;
}

}  // namespace pcarisk
