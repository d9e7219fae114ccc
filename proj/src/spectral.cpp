#include "pcarisk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

namespace pcarisk {

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SymMatrix: matrix is not square");
  const Index n = a.rows();
  m_.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    m_(j, j) = a(j, j);
    for (Index i = j + 1; i < n; ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymMatrix SymMatrix::zero(Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }
SymMatrix SymMatrix::identity(Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }
SymMatrix SymMatrix::diagonal(const Vector& diag) { return SymMatrix(Matrix(diag.asDiagonal())); }

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("SymMatrix: dimension mismatch");
  return SymMatrix(Matrix(m_ + o.m_));
}
SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("SymMatrix: dimension mismatch");
  return SymMatrix(Matrix(m_ - o.m_));
}
SymMatrix SymMatrix::scaled(double s) const { return SymMatrix(Matrix(s * m_)); }

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) sum += a(i, j) * a(i, j);
  return std::sqrt(2.0 * sum);
}

// Rotates rows/columns p and q of the symmetric matrix `a` (and the columns
// of `v` when given) so that a(p,q) becomes zero.
void rotate(Matrix& a, Matrix* v, Index p, Index q, bool late) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double app = a(p, p);
  const double aqq = a(q, q);
  // Late sweeps: an element below rounding of both diagonal entries is zeroed outright.
  const double g = 100.0 * std::abs(apq);
  if (late && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    return;
  }
  const double theta = (aqq - app) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  const Index n = a.rows();
  double* colp = a.col(p).data();
  double* colq = a.col(q).data();
  for (Index k = 0; k < n; ++k) {
    const double akp = colp[k];
    const double akq = colq[k];
    colp[k] = akp - s * (akq + tau * akp);
    colq[k] = akq + s * (akp - tau * akq);
  }
  colp[p] = app - t * apq;
  colq[q] = aqq + t * apq;
  colp[q] = 0.0;
  colq[p] = 0.0;
  a.row(p) = a.col(p).transpose();
  a.row(q) = a.col(q).transpose();
  if (v != nullptr) {
    double* vp = v->col(p).data();
    double* vq = v->col(q).data();
    for (Index k = 0; k < n; ++k) {
      const double vkp = vp[k];
      const double vkq = vq[k];
      vp[k] = vkp - s * (vkq + tau * vkp);
      vq[k] = vkq + s * (vkp - tau * vkq);
    }
  }
}

void jacobi(Matrix& a, Matrix* v) {
  if (!a.allFinite()) throw std::invalid_argument("sym_eig: non-finite entry");
  const Index n = a.rows();
  const double tol = kJacobiRelTol * a.norm();
  double off = off_diagonal_norm(a);
  int sweep = 0;
  while (off > tol) {
    if (sweep == kJacobiMaxSweeps) {
      throw EigenSolverError("sym_eig: Jacobi iteration did not converge, off-diagonal norm " +
                                 std::to_string(off),
                             off, sweep);
    }
    for (Index p = 0; p + 1 < n; ++p)
      for (Index q = p + 1; q < n; ++q) rotate(a, v, p, q, sweep >= 4);
    ++sweep;
    off = off_diagonal_norm(a);
  }
}

std::vector<Index> descending_order(const Vector& diag) {
  std::vector<Index> order(static_cast<std::size_t>(diag.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return diag(i) > diag(j); });
  return order;
}

}  // namespace

EigenDecomposition sym_eig(const SymMatrix& s) {
  Matrix a = s.matrix();
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  jacobi(a, &v);
  const Vector diag = a.diagonal();
  const auto order = descending_order(diag);
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values(i) = diag(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

Vector sym_eigvals(const SymMatrix& s) {
  Matrix a = s.matrix();
  jacobi(a, nullptr);
  Vector diag = a.diagonal();
  std::sort(diag.begin(), diag.end(), std::greater<>());
  return diag;
}

Projector span_projector(const Matrix& frame, int first, int last) {
  const Index p = frame.rows();
  if (last < first) return Projector(SymMatrix::zero(p), 0);
  const auto cols = frame.middleCols(first - 1, last - first + 1);
  return Projector(SymMatrix(Matrix(cols * cols.transpose())), last - first + 1);
}

namespace {
void check_orthonormal(const Matrix& frame) {
  const Matrix gram = frame.transpose() * frame;
  const double resid = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (resid > 1e-8) throw std::invalid_argument("build_projector: frame is not orthonormal");
}
}  // namespace

Projector build_projector(const Matrix& frame, std::span<const int> indices) {
  check_orthonormal(frame);
  const Index p = frame.rows();
  std::set<int> seen;
  Matrix m = Matrix::Zero(p, p);
  for (int j : indices) {
    if (j < 1 || j > frame.cols()) throw std::out_of_range("build_projector: index out of range");
    if (!seen.insert(j).second) throw std::invalid_argument("build_projector: repeated index");
    const auto u = frame.col(j - 1);
    m.noalias() += u * u.transpose();
  }
  return Projector(SymMatrix(m), static_cast<int>(indices.size()));
}

Projector build_projector(const Matrix& frame, int first, int last) {
  check_orthonormal(frame);
  if (last >= first && (first < 1 || last > frame.cols()))
    throw std::out_of_range("build_projector: index out of range");
  return span_projector(frame, first, last);
}

double hs_inner(const SymMatrix& s, const SymMatrix& t) {
  if (s.dim() != t.dim()) throw std::invalid_argument("hs_inner: dimension mismatch");
  return (s.matrix().array() * t.matrix().array()).sum();
}

double hs_norm_sq(const SymMatrix& s) { return s.matrix().squaredNorm(); }
double hs_norm_sq(const Matrix& s) { return s.squaredNorm(); }

double op_norm(const SymMatrix& s) {
  if (s.dim() == 0) return 0.0;
  const Vector ev = sym_eigvals(s);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Matrix gram = a.cols() <= a.rows() ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
  const Vector ev = sym_eigvals(SymMatrix(gram));
  return std::sqrt(std::max(ev(0), 0.0));
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace pcarisk
