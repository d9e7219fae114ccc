#pragma once

#include "pcarisk/harness.hpp"
#include "pcarisk/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testing {

using namespace pcarisk;

inline Matrix random_symmetric(int p, RngStream& rng) {
  Matrix a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  return 0.5 * (a + a.transpose());
}

// Largest |eigenvalue| by power iteration on A^2; independent of the Jacobi code.
inline double power_iteration_norm(const Matrix& a, int iters = 20000) {
  const Matrix sq = a * a;
  Vector v = Vector::Ones(a.rows()) / std::sqrt(double(a.rows()));
  for (int i = 0; i < iters; ++i) {
    Vector w = sq * v;
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    v = w / nrm;
  }
  return std::sqrt(v.dot(sq * v));
}

// Mixed spectra for randomized suites: decays, two-level spikes, ties and
// generic random levels, with an optional Haar rotation.
inline CovModel random_model(int p, RngStream& rng) {
  const int kind = static_cast<int>(rng.next_u64() % 4);
  std::vector<double> v(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    switch (kind) {
      case 0: v[j] = std::exp(-0.7 * (j + 1)); break;
      case 1: v[j] = std::pow(j + 1.0, -1.5); break;
      case 2: v[j] = j < p / 2 ? 3.0 : 1.0; break;
      default: v[j] = 0.1 + 4.0 * rng.uniform(); break;
    }
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  CovModel m = make_custom_model(Spectrum(v));
  if (rng.uniform() < 0.5) m = m.with_basis(random_orthonormal_frame(p, rng));
  return m;
}

inline Matrix projector_matrix(const Matrix& frame, int first, int last) {
  Matrix pm = Matrix::Zero(frame.rows(), frame.rows());
  for (int j = first; j <= last; ++j) pm += frame.col(j - 1) * frame.col(j - 1).transpose();
  return pm;
}

inline double trace_product(const Matrix& a, const Matrix& b) { return (a * b).trace(); }

}  // namespace testing
