#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>

namespace pcarisk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Dense symmetric matrix. The constructor averages A and A^T, so the stored
// entries (i,j) and (j,i) are bitwise equal.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a);

  static SymMatrix zero(Index dim);
  static SymMatrix identity(Index dim);
  static SymMatrix diagonal(const Vector& diag);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix scaled(double s) const;

private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;   // non-increasing
  Matrix vectors;  // column j is the eigenvector of values[j]
};

class EigenSolverError : public std::runtime_error {
public:
  EigenSolverError(const std::string& what, double residual, int sweeps)
      : std::runtime_error(what), residual_(residual), sweeps_(sweeps) {}
  double residual() const { return residual_; }
  int sweeps() const { return sweeps_; }

private:
  double residual_;
  int sweeps_;
};

inline constexpr int kJacobiMaxSweeps = 64;
inline constexpr double kJacobiRelTol = 1e-13;

// Cyclic Jacobi. Eigenvalues come back non-increasing; equal eigenvalues keep
// the column order of the converged rotation frame.
EigenDecomposition sym_eig(const SymMatrix& a);

// Same iteration without accumulating the rotation frame.
Vector sym_eigvals(const SymMatrix& a);

class Projector {
public:
  Projector() = default;
  Projector(SymMatrix matrix, int rank) : matrix_(std::move(matrix)), rank_(rank) {}

  const SymMatrix& matrix() const { return matrix_; }
  int rank() const { return rank_; }
  Index dim() const { return matrix_.dim(); }

private:
  SymMatrix matrix_;
  int rank_ = 0;
};

// Sum of u_j u_j^T over the given 1-based column indices of `frame`.
Projector build_projector(const Matrix& frame, std::span<const int> indices);
// Columns first..last (1-based, inclusive); an empty range gives the zero projector.
Projector build_projector(const Matrix& frame, int first, int last);

// Unchecked variant for frames produced by sym_eig.
Projector span_projector(const Matrix& frame, int first, int last);

double hs_inner(const SymMatrix& s, const SymMatrix& t);
double hs_norm_sq(const SymMatrix& s);
double hs_norm_sq(const Matrix& s);

// Largest absolute eigenvalue.
double op_norm(const SymMatrix& s);
// Largest singular value of a general square or rectangular matrix.
double op_norm(const Matrix& a);

double max_abs(const Matrix& a);

}  // namespace pcarisk
