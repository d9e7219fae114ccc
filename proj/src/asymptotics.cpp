#include "pcarisk/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcarisk {

double LimitLawSpec::mean() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return scale * sum;
}

namespace {
void check_d(const Spectrum& spec, int d) {
  if (d < 1 || d >= spec.dim()) throw std::invalid_argument("limit law: need 1 <= d < p");
}

double draw(const LimitLawSpec& spec, RngStream& rng) {
  double sum = 0.0;
  for (double w : spec.weights) {
    const double g = rng.normal();
    sum += w * g * g;
  }
  return spec.scale * sum;
}
}  // namespace

LimitLawSpec make_excess_law(const Spectrum& spec, int d) {
  check_d(spec, d);
  LimitLawSpec out;
  out.law = LawKind::excess_risk;
  out.d = d;
  for (int j = 1; j <= d; ++j)
    for (int k = d + 1; k <= spec.dim(); ++k) {
      const double lj = spec.lambda(j), lk = spec.lambda(k);
      if (lj > lk) {
        out.pairs.emplace_back(j, k);
        out.weights.push_back(lj * lk / (lj - lk));
      }
    }
  return out;
}

LimitLawSpec make_hs_law(const Spectrum& spec, int d) {
  check_d(spec, d);
  if (!(spec.lambda(d) > spec.lambda(d + 1))) throw std::domain_error("hs limit law: lambda_d == lambda_{d+1}");
  LimitLawSpec out;
  out.law = LawKind::hs_distance;
  out.d = d;
  out.scale = 2.0;
  for (int j = 1; j <= d; ++j)
    for (int k = d + 1; k <= spec.dim(); ++k) {
      const double lj = spec.lambda(j), lk = spec.lambda(k);
      out.pairs.emplace_back(j, k);
      out.weights.push_back(lj * lk / ((lj - lk) * (lj - lk)));
    }
  return out;
}

double limit_law_sample(const LimitLawSpec& spec, RngStream& rng) {
  if (spec.law != LawKind::excess_risk) throw std::invalid_argument("limit_law_sample: expects the excess-risk law");
  return draw(spec, rng);
}

double hs_limit_law_sample(const LimitLawSpec& spec, RngStream& rng) {
  if (spec.law != LawKind::hs_distance) throw std::invalid_argument("hs_limit_law_sample: expects the distance law");
  return draw(spec, rng);
}

std::vector<double> limit_law_draws(const LimitLawSpec& spec, int count, std::uint64_t seed, std::uint64_t stream) {
  RngStream rng(seed, stream);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& v : out) v = draw(spec, rng);
  return out;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  if (!std::is_sorted(a.begin(), a.end()) || !std::is_sorted(b.begin(), b.end()))
    throw std::invalid_argument("ks_statistic: samples must be sorted");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    // Advance past every copy of the smaller value so ties are compared after the jump.
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    best = std::max(best, std::abs(i / na - j / nb));
  }
  return best;
}

}  // namespace pcarisk
