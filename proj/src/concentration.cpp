#include "pcarisk/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcarisk {

std::string_view to_string(DeviationSide side) {
  switch (side) {
    case DeviationSide::upper_d_plus_1: return "upper_d_plus_1";
    case DeviationSide::lower_d: return "lower_d";
    case DeviationSide::relative: return "relative";
  }
  return "relative";
}

WeightedOperator weighted_operator(const CovModel& model, WeightedKind kind, const WeightedParams& prm) {
  const int p = model.dim();
  const int idx = prm.index;
  if (idx < 1 || idx > p) throw std::out_of_range("weighted_operator: index out of range");
  Vector w = Vector::Zero(p);
  auto lam = [&](int j) { return model.lambda(j); };
  auto put = [&](int j, double base, double power) {
    if (!(base > 0.0)) throw std::invalid_argument("weighted_operator: non-positive weight");
    w(j - 1) = std::pow(base, power);
  };
  switch (kind) {
    case WeightedKind::s_leq:
    case WeightedKind::r_leq: {
      const double power = kind == WeightedKind::s_leq ? -0.5 : 0.5;
      for (int j = 1; j <= idx; ++j) put(j, lam(j) - prm.mu, power);
      break;
    }
    case WeightedKind::s_gt:
      if (idx >= p) throw std::out_of_range("weighted_operator: need d < p");
      for (int k = idx + 1; k <= p; ++k) put(k, lam(idx) - lam(k), -0.5);
      break;
    case WeightedKind::t_gt:
      if (idx >= p) throw std::out_of_range("weighted_operator: need d < p");
      if (!(prm.x > 0.0)) throw std::invalid_argument("weighted_operator: need x > 0");
      for (int k = idx + 1; k <= p; ++k) put(k, lam(idx + 1) - lam(k) + prm.x, -0.5);
      break;
    case WeightedKind::t_leq:
      if (!(prm.x > 0.0)) throw std::invalid_argument("weighted_operator: need x > 0");
      for (int j = 1; j <= idx; ++j) put(j, lam(j) - lam(idx) + prm.x, -0.5);
      break;
  }
  const Matrix& u = model.basis();
  SymMatrix m(Matrix(u * w.asDiagonal() * u.transpose()));

  if (kind == WeightedKind::s_leq || kind == WeightedKind::r_leq) {
    Vector inv = Vector::Zero(p);
    for (int j = 0; j < idx; ++j) inv(j) = 1.0 / w(j);
    const Matrix prod = m.matrix() * (u * inv.asDiagonal() * u.transpose());
    const Matrix proj = span_projector(u, 1, idx).matrix().matrix();
    const double spread = w.head(idx).maxCoeff() / w.head(idx).minCoeff();
    if (max_abs(prod - proj) > 1e-12 * std::max(1.0, spread))
      throw std::logic_error("weighted_operator: S R differs from the spectral projector");
  }
  return {kind, std::move(w), std::move(m)};
}

namespace {

double exponent_rate(int n, double x, double scale, double c3) {
  const double t = x / (c3 * scale);
  return std::exp(-n * std::min(t * t, t));
}

DeviationBound make(const char* name, DeviationSide side, double x, double prob, double lhs, double rhs,
                    int n, int d, const BoundConstants& k) {
  DeviationBound b;
  b.name = name;
  b.side = side;
  b.x_or_y = x;
  b.prob_bound = prob;
  b.condition_lhs = lhs;
  b.condition_rhs = rhs;
  b.condition_ok = lhs <= rhs;
  b.params["n"] = n;
  b.params["d"] = d;
  b.params["C3"] = k.C3;
  return b;
}

void check_basic(const Spectrum& spec, int n, int d) {
  if (n < 1) throw std::invalid_argument("deviation bound: n must be positive");
  if (d < 1 || d >= spec.dim()) throw std::invalid_argument("deviation bound: need 1 <= d < p");
}

}  // namespace

DeviationBound right_deviation_bound(const Spectrum& spec, int n, int d, double x, const BoundConstants& k) {
  check_basic(spec, n, d);
  if (!(x > 0.0)) throw std::invalid_argument("right_deviation_bound: need x > 0");
  const double lam = spec.lambda(d + 1);
  double sum = 0.0;
  for (int j = d + 1; j <= spec.dim(); ++j) sum += spec.lambda(j) / (lam - spec.lambda(j) + x);
  const double lhs = std::max(k.C3 * lam / x, 1.0) * sum;
  return make("right_deviation", DeviationSide::upper_d_plus_1, x, exponent_rate(n, x, lam, k.C3), lhs, n / k.C3,
              n, d, k);
}

DeviationBound left_deviation_bound(const Spectrum& spec, int n, int d, double x, const BoundConstants& k) {
  check_basic(spec, n, d);
  if (!(x > 0.0)) throw std::invalid_argument("left_deviation_bound: need x > 0");
  const double lam = spec.lambda(d);
  double sum = 0.0;
  for (int j = 1; j <= d; ++j) sum += spec.lambda(j) / (spec.lambda(j) - lam + x);
  const double lhs = std::max(k.C3 * lam / x, 1.0) * sum;
  return make("left_deviation", DeviationSide::lower_d, x, exponent_rate(n, x, lam, k.C3), lhs, n / k.C3, n, d,
              k);
}

DeviationBound gap_event_bounds(const Spectrum& spec, int n, int d, int index, GapSide side,
                                const BoundConstants& k) {
  check_basic(spec, n, d);
  const int p = spec.dim();
  const double c3sq = k.C3 * k.C3;
  if (side == GapSide::right) {
    if (index < 1 || index > d) throw std::out_of_range("gap_event_bounds: need j <= d");
    const double lam = spec.lambda(index);
    const double gap = lam - spec.lambda(d + 1);
    if (!(gap > 0.0)) throw std::domain_error("gap_event_bounds: zero gap");
    double sum = 0.0;
    for (int j = d + 1; j <= p; ++j) sum += spec.lambda(j) / (lam - spec.lambda(j));
    auto b = make("gap_event_right", DeviationSide::upper_d_plus_1, gap / 2.0,
                  std::exp(-n * gap * gap / (4.0 * c3sq * lam * lam)), lam / gap * sum, n / (4.0 * c3sq), n, d, k);
    b.params["j"] = index;
    return b;
  }
  if (index <= d || index > p) throw std::out_of_range("gap_event_bounds: need k > d");
  const double lam_d = spec.lambda(d);
  const double gap = lam_d - spec.lambda(index);
  if (!(gap > 0.0)) throw std::domain_error("gap_event_bounds: zero gap");
  double sum = 0.0;
  for (int j = 1; j <= d; ++j) sum += spec.lambda(j) / (spec.lambda(j) - spec.lambda(index));
  auto b = make("gap_event_left", DeviationSide::lower_d, gap / 2.0,
                2.0 * std::exp(-n * gap * gap / (4.0 * c3sq * lam_d * lam_d)), lam_d / gap * sum, n / (4.0 * c3sq),
                n, d, k);
  b.params["k"] = index;
  return b;
}

DeviationPair relative_deviation_bounds(const Spectrum& spec, int n, int d, double y, const BoundConstants& k) {
  check_basic(spec, n, d);
  if (!(y > 0.0)) throw std::invalid_argument("relative_deviation_bounds: need y > 0");
  const double lam_d = spec.lambda(d);
  const double c = k.deviation_constant();
  const double prob = std::exp(1.0 - c * n * std::min(y, y * y));
  const double scale = 1.0 / (n * std::min(y, 1.0));
  const double rhs = 1.0 / (2.0 * k.C3 * k.C3);
  double up = 0.0, low = 0.0;
  for (int j = d + 1; j <= spec.dim(); ++j) up += spec.lambda(j) / (lam_d - spec.lambda(j) + y * lam_d);
  for (int j = 1; j < d; ++j) low += spec.lambda(j) / (spec.lambda(j) - lam_d + y * lam_d);
  DeviationPair out{make("relative_upper", DeviationSide::relative, y, prob, scale * up, rhs, n, d, k),
                    make("relative_lower", DeviationSide::relative, y, prob, scale * low, rhs, n, d, k)};
  out.upper.params["c"] = c;
  out.lower.params["c"] = c;
  return out;
}

DeviationBound weighted_cov_concentration(const Spectrum& spec, int n, int s, double mu, const BoundConstants& k) {
  if (n < 1) throw std::invalid_argument("weighted_cov_concentration: n must be positive");
  if (s < 1 || s > spec.dim()) throw std::out_of_range("weighted_cov_concentration: s out of range");
  const double lam_s = spec.lambda(s);
  if (!(mu >= 0.0 && mu < lam_s)) throw std::invalid_argument("weighted_cov_concentration: need 0 <= mu < lambda_s");
  const double c3sq = k.C3 * k.C3;
  const double g = lam_s - mu;
  auto b = make("weighted_cov", DeviationSide::upper_d_plus_1, mu,
                std::exp(-n * g * g / (256.0 * c3sq * lam_s * lam_s)), weighted_condition_lhs(spec, s, mu),
                n / (256.0 * c3sq), n, s, k);
  b.params.erase("d");
  b.params["s"] = s;
  b.params["mu"] = mu;
  return b;
}

ConditionCheck separation_condition(const Spectrum& spec, int n, int d, const BoundConstants& k) {
  check_basic(spec, n, d);
  const double next = spec.lambda(d + 1);
  const double lam_d = spec.lambda(d);
  ConditionCheck c;
  c.rhs = 1.0 / (8.0 * k.C3 * k.C3);
  if (!(lam_d > next)) {
    c.lhs = kInf;
  } else {
    double sum = 0.0;
    for (int j = 1; j <= d; ++j) sum += spec.lambda(j) / (n * (spec.lambda(j) - next));
    c.lhs = lam_d / (lam_d - next) * sum;
  }
  c.ok = c.lhs <= c.rhs;
  return c;
}

ShiftEquivalence operator_shift_equivalence_check(const SymMatrix& s, const SymMatrix& t, double y) {
  if (s.dim() != t.dim()) throw std::invalid_argument("operator_shift_equivalence_check: dimension mismatch");
  const EigenDecomposition es = sym_eig(s);
  if (!(y > es.values(0))) throw std::invalid_argument("operator_shift_equivalence_check: need y > lambda_1(S)");
  const Vector w = (y - es.values.array()).rsqrt().matrix();
  const Matrix root = es.vectors * w.asDiagonal() * es.vectors.transpose();
  const SymMatrix shifted(Matrix(root * (t.matrix() - s.matrix()) * root));
  ShiftEquivalence out{};
  out.top_exceeds = sym_eigvals(t)(0) > y;
  out.shifted_exceeds = sym_eigvals(shifted)(0) > 1.0;
  return out;
}

}  // namespace pcarisk
