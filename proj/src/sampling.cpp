#include "pcarisk/sampling.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace pcarisk {

SampleSet draw_gaussian_samples(const CovModel& model, int n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw std::invalid_argument("draw_gaussian_samples: n must be positive");
  const int p = model.dim();
  RngStream rng(seed, stream);
  Matrix z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
  Vector root(p);
  for (int j = 0; j < p; ++j) root(j) = std::sqrt(model.lambda(j + 1));
  SampleSet out{n, p, {}, seed, stream};
  if (model.identity_basis()) {
    out.rows = z * root.asDiagonal();
  } else {
    out.rows = z * root.asDiagonal() * model.basis().transpose();
  }
  return out;
}

SymMatrix empirical_covariance(const SampleSet& s) {
  if (s.n < 1) throw std::invalid_argument("empirical_covariance: empty sample");
  Matrix c = Matrix::Zero(s.p, s.p);
  c.selfadjointView<Eigen::Lower>().rankUpdate(s.rows.transpose(), 1.0 / s.n);
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return SymMatrix(c);
}

namespace {
// Marsaglia-Tsang; shape >= 1.
double gamma_draw(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}
}  // namespace

double chi_square_draw(double dof, RngStream& rng) {
  if (!(dof >= 2.0)) throw std::invalid_argument("chi_square_draw: need at least 2 degrees of freedom");
  return 2.0 * gamma_draw(0.5 * dof, rng);
}

SymMatrix draw_wishart_covariance(const CovModel& model, int n, std::uint64_t seed, std::uint64_t stream) {
  const int p = model.dim();
  if (n < p + 1) throw std::invalid_argument("draw_wishart_covariance: need n > p");
  RngStream rng(seed, stream);
  // Bartlett factor: L lower triangular, L_ii^2 ~ chi^2_{n-i}, L_ij ~ N(0,1) below the diagonal.
  Matrix lower = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    lower(i, i) = std::sqrt(chi_square_draw(double(n - i), rng));
    for (int j = 0; j < i; ++j) lower(i, j) = rng.normal();
  }
  Matrix a(p, p);
  for (int j = 0; j < p; ++j) a.col(j) = model.basis().col(j) * std::sqrt(model.lambda(j + 1));
  const Matrix f = a * lower;
  return SymMatrix(Matrix(f * f.transpose() / double(n)));
}

void write_samples_csv(std::ostream& out, const SampleSet& s) {
  for (int j = 0; j < s.p; ++j) out << (j ? "," : "") << 'x' << (j + 1);
  out << '\n' << std::setprecision(17);
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.p; ++j) out << (j ? "," : "") << s.rows(i, j);
    out << '\n';
  }
}

}  // namespace pcarisk
