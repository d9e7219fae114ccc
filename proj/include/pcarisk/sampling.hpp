#pragma once

#include "pcarisk/models.hpp"

#include <cstdint>
#include <iosfwd>

namespace pcarisk {

struct SampleSet {
  int n = 0;
  int p = 0;
  Matrix rows;  // n x p, one observation per row
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Rows X_i = U diag(sqrt(lambda)) Z_i with Z drawn row-major from RngStream(seed, stream).
SampleSet draw_gaussian_samples(const CovModel& model, int n, std::uint64_t seed,
                                std::uint64_t stream = 0);

// (1/n) sum X_i X_i^T, not mean-centered.
SymMatrix empirical_covariance(const SampleSet& s);

// Chi-square variate with `dof` >= 2 degrees of freedom (Marsaglia-Tsang gamma).
double chi_square_draw(double dof, RngStream& rng);

// Sigma_hat with the same law as empirical_covariance(draw_gaussian_samples(...)),
// drawn directly from the Wishart(n, Sigma)/n distribution by the Bartlett
// decomposition in O(p^2) variates. Needs n > p. The stream is consumed
// differently, so individual draws do not match the row sampler.
SymMatrix draw_wishart_covariance(const CovModel& model, int n, std::uint64_t seed, std::uint64_t stream = 0);

void write_samples_csv(std::ostream& out, const SampleSet& s);

}  // namespace pcarisk
