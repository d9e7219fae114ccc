#include "pcarisk/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcarisk {

void BoundConstants::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("constant must be positive: ") + name);
  };
  positive(C1, "C1");
  positive(C2, "C2");
  positive(C3, "C3");
  positive(c_lower, "c_lower");
  if (C_display) positive(*C_display, "C_display");
  if (c1) positive(*c1, "c1");
  if (c_dev) positive(*c_dev, "c");
}

namespace {

// Non-negative ratio with 0/0 := 0 and x/0 := +inf.
double ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den == 0.0) return kInf;
  return num / den;
}

void check_split(const Spectrum& spec, int n, int d) {
  if (n < 1) throw std::invalid_argument("bound: n must be positive");
  if (d < 1 || d >= spec.dim()) throw std::invalid_argument("bound: need 1 <= d < p");
}

void check_mu(const Spectrum& spec, int d, double mu) {
  if (mu < spec.lambda(d + 1) || mu > spec.lambda(d))
    throw std::invalid_argument("bound: mu outside [lambda_{d+1}, lambda_d]");
}

void base_params(BoundValue& b, int n, int d, const BoundConstants& k) {
  b.params["n"] = n;
  b.params["d"] = d;
  b.params["C2"] = k.C2;
  b.params["C3"] = k.C3;
  if (k.C_display) b.params["C_display"] = *k.C_display;
}

void set_condition(BoundValue& b, double lhs, double rhs) {
  b.condition_lhs = lhs;
  b.condition_rhs = rhs;
  b.condition_ok = lhs <= rhs;
}

double rank_condition_rhs(int n, const BoundConstants& k) { return n / (16.0 * k.C3 * k.C3); }
double split_remainder_rate(int n, const BoundConstants& k) { return std::exp(-n / (32.0 * k.C3 * k.C3)); }
double weighted_rhs(int n, const BoundConstants& k) { return n / (256.0 * k.C3 * k.C3); }

void require_gap(const Realization& r, const char* who) {
  if (!(r.lambda(r.d()) > r.lambda(r.d() + 1)))
    throw std::domain_error(std::string(who) + ": lambda_d == lambda_{d+1}");
}

// Shared pieces of the quadratic-expansion bounds, all in the population eigenbasis.
struct QuadTerms {
  Vector gap_leq;    // lambda_j - lambda_{d+1}, j <= d
  Vector gap_gt;     // lambda_d - lambda_k, k > d
  Matrix a;          // a(j, m) = sum_{k>d} D_jk D_km / (lambda_j - lambda_k), j <= d
  Matrix b;          // b(k-d-1, m) = sum_{j<=d} D_kj D_jm / (lambda_j - lambda_k), k > d
  double first_order = 0.0;     // sum_{j<=d<k} D_jk^2 / (lambda_j - lambda_k)
  double first_order_sq = 0.0;  // sum_{j<=d<k} D_jk^2 / (lambda_j - lambda_k)^2
};

QuadTerms quad_terms(const Realization& r) {
  const int d = r.d();
  const int p = r.p();
  const Matrix& dm = r.delta_rotated();
  QuadTerms q;
  q.gap_leq.resize(d);
  q.gap_gt.resize(p - d);
  for (int j = 1; j <= d; ++j) q.gap_leq(j - 1) = r.lambda(j) - r.lambda(d + 1);
  for (int k = d + 1; k <= p; ++k) q.gap_gt(k - d - 1) = r.lambda(d) - r.lambda(k);
  Matrix inv_gap(d, p - d);  // 1 / (lambda_j - lambda_k)
  for (int j = 1; j <= d; ++j)
    for (int k = d + 1; k <= p; ++k) {
      const double g = r.lambda(j) - r.lambda(k);
      inv_gap(j - 1, k - d - 1) = 1.0 / g;
      const double djk = dm(j - 1, k - 1);
      q.first_order += djk * djk / g;
      q.first_order_sq += djk * djk / (g * g);
    }
  const Matrix weighted = dm.topRightCorner(d, p - d).cwiseProduct(inv_gap);  // D_jk/(lambda_j-lambda_k)
  q.a = weighted * dm.bottomRows(p - d);
  q.b = weighted.transpose() * dm.topRows(d);
  return q;
}

}  // namespace

BoundValue crude_deterministic(const Realization& r) {
  const int d = r.d();
  const double hs = r.delta().matrix().norm();
  const double gap = r.lambda(d) - r.lambda(d + 1);
  const double first = std::sqrt(2.0 * d) * hs;
  const double second = gap > 0.0 ? 2.0 * hs * hs / gap : kInf;
  BoundValue b{"crude_deterministic", std::min(first, second), {}, true, {}, {}};
  b.params["d"] = d;
  b.params["delta_hs"] = hs;
  b.params["gap"] = gap;
  b.params["branch_sqrt"] = first;
  b.params["branch_gap"] = second;
  return b;
}

BoundValue empirical_global_bound(const Realization& r) {
  const int d = r.d();
  const int p = r.p();
  const Matrix& dm = r.delta_rotated();
  double sum = 0.0;
  for (int j = 1; j <= d; ++j) {
    const int m = p - j + 1;
    sum += op_norm(SymMatrix(Matrix(dm.bottomRightCorner(m, m))));
  }
  BoundValue b{"empirical_global", sum, {}, true, {}, {}};
  b.params["d"] = d;
  return b;
}

BoundValue quadexp_excess_bound(const Realization& r) {
  require_gap(r, "quadexp_excess_bound");
  const int d = r.d();
  const int p = r.p();
  const Matrix& dm = r.delta_rotated();
  const QuadTerms q = quad_terms(r);
  const double lam_d = r.lambda(d);
  const double lam_d1 = r.lambda(d + 1);

  double main_leq = 0.0, main_gt = 0.0;
  double tail_leq = 0.0, tail_gt = 0.0;            // same products restricted to the other block
  double weighted_leq = 0.0, weighted_gt = 0.0;    // with S_{<=d} resp. S_{>d} on the right
  double block_leq = 0.0, block_gt = 0.0;          // ||P_j Delta P_{<=d}||^2, ||P_k Delta P_{>d}||^2
  for (int j = 1; j <= d; ++j) {
    const double g = q.gap_leq(j - 1);
    main_leq += q.a.row(j - 1).tail(p - d).squaredNorm() / g;
    tail_leq += q.a.row(j - 1).head(d).squaredNorm() / g;
    for (int m = 1; m <= d; ++m) {
      const double v = q.a(j - 1, m - 1);
      weighted_leq += v * v / q.gap_leq(m - 1) / g;
    }
    block_leq += dm.row(j - 1).head(d).squaredNorm() / g;
  }
  for (int k = d + 1; k <= p; ++k) {
    const double g = q.gap_gt(k - d - 1);
    const auto row = q.b.row(k - d - 1);
    main_gt += row.head(d).squaredNorm() / g;
    tail_gt += row.tail(p - d).squaredNorm() / g;
    for (int m = d + 1; m <= p; ++m) {
      const double v = row(m - 1);
      weighted_gt += v * v / q.gap_gt(m - d - 1) / g;
    }
    block_gt += dm.row(k - 1).tail(p - d).squaredNorm() / g;
  }

  // ||S Delta S||_inf on each block.
  const Vector w_leq = q.gap_leq.cwiseInverse().cwiseSqrt();
  const Vector w_gt = q.gap_gt.cwiseInverse().cwiseSqrt();
  const double s_leq = op_norm(SymMatrix(Matrix(w_leq.asDiagonal() * dm.topLeftCorner(d, d) * w_leq.asDiagonal())));
  const double s_gt =
      op_norm(SymMatrix(Matrix(w_gt.asDiagonal() * dm.bottomRightCorner(p - d, p - d) * w_gt.asDiagonal())));
  const bool ev_s_leq = s_leq > 1.0 / 16.0;
  const bool ev_s_gt = s_gt > 1.0 / 16.0;
  const bool ev_e1 = weighted_leq > 1.0 / 128.0;
  const bool ev_e2 = weighted_gt > 1.0 / 128.0;

  double r1_gap = 0.0;
  const double up = r.lambda_hat(d + 1) - lam_d1;
  for (int j = 1; j <= d; ++j) {
    const double g = q.gap_leq(j - 1);
    if (up > g / 2.0) r1_gap += g;
  }
  double r2_gap = 0.0;
  const double down = r.lambda_hat(d) - lam_d;
  for (int k = d + 1; k <= p; ++k) {
    const double g = q.gap_gt(k - d - 1);
    if (down < -g / 2.0) r2_gap += g;
  }
  const double rem1 = 4.0 * r1_gap + (ev_s_leq ? 32.0 * block_leq : 0.0) + (ev_e1 ? 128.0 * tail_leq : 0.0);
  const double rem2 = 4.0 * r2_gap + (ev_s_gt ? 32.0 * block_gt : 0.0) + (ev_e2 ? 128.0 * tail_gt : 0.0);
  const double main = 32.0 * q.first_order + 128.0 * main_leq + 128.0 * main_gt;

  BoundValue b{"quadexp_excess", main + rem1 + rem2, {}, true, {}, {}};
  b.params["d"] = d;
  b.params["main"] = main;
  b.params["remainder_leq"] = rem1;
  b.params["remainder_gt"] = rem2;
  b.params["weighted_norm_leq"] = s_leq;
  b.params["weighted_norm_gt"] = s_gt;
  b.params["event_weighted_leq"] = ev_s_leq;
  b.params["event_weighted_gt"] = ev_s_gt;
  b.params["event_e1"] = ev_e1;
  b.params["event_e2"] = ev_e2;
  return b;
}

BoundValue quadexp_hs_bound(const Realization& r) {
  require_gap(r, "quadexp_hs_bound");
  const int d = r.d();
  const int p = r.p();
  const Matrix& dm = r.delta_rotated();
  const QuadTerms q = quad_terms(r);
  const double lam_d1 = r.lambda(d + 1);
  const double split = risk_parts(r, lam_d1).leq;

  double second = 0.0, fourth = 0.0;
  for (int j = 1; j <= d; ++j) {
    const double g2 = q.gap_leq(j - 1) * q.gap_leq(j - 1);
    second += q.a.row(j - 1).tail(p - d).squaredNorm() / g2;
    double w = 0.0;
    for (int m = 1; m <= d; ++m) {
      const double v = q.a(j - 1, m - 1);
      w += v * v / q.gap_leq(m - 1);
    }
    fourth += w / g2;
  }
  // S_{<=d}^2 Delta S_{<=d} restricted to the top block.
  Matrix m(d, d);
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l) m(j, l) = dm(j, l) / q.gap_leq(j) / std::sqrt(q.gap_leq(l));
  const double s_norm = op_norm(m);

  const double value = 4.0 * q.first_order_sq + 64.0 * second + 32.0 * s_norm * s_norm * split + 64.0 * fourth * split;
  BoundValue b{"quadexp_hs", value, {}, true, {}, {}};
  b.params["d"] = d;
  b.params["split_leq"] = split;
  b.params["weighted_norm"] = s_norm;
  set_condition(b, r.lambda_hat(d + 1) - lam_d1, (r.lambda(d) - lam_d1) / 2.0);
  return b;
}

DavisKahanChain davis_kahan_chain(const Realization& r) {
  require_gap(r, "davis_kahan_chain");
  const double gap = r.lambda(r.d()) - r.lambda(r.d() + 1);
  const double split = risk_parts(r, r.lambda(r.d() + 1)).leq;
  return {hs_distance_sq(r.pop_leq(), r.emp_leq()), 2.0 * split / gap, 2.0 * excess_risk(r) / gap};
}

BoundValue crude_expectation(const Spectrum& spec, int n, int d, const BoundConstants& k) {
  check_split(spec, n, d);
  const double tr = spec.trace();
  const double gap = spec.lambda(d) - spec.lambda(d + 1);
  const double first = std::sqrt(4.0 * k.C2 * d) * tr / std::sqrt(double(n));
  const double second = gap > 0.0 ? 4.0 * k.C2 * tr * tr / (n * gap) : kInf;
  BoundValue b{"crude_expectation", std::min(first, second), {}, true, {}, {}};
  base_params(b, n, d, k);
  b.params["branch_sqrt"] = first;
  b.params["branch_gap"] = second;
  return b;
}

BoundValue global_expectation_bound(const Spectrum& spec, int n, int d, const BoundConstants& k) {
  if (n < 1) throw std::invalid_argument("bound: n must be positive");
  if (d < 0 || d > spec.dim()) throw std::invalid_argument("bound: d out of range");
  const double c = k.global_constant();
  double sum = 0.0;
  for (int j = 1; j <= d; ++j) {
    const double t = spec.tr_geq(j) / n;
    sum += std::max(std::sqrt(spec.lambda(j) * t), t);
  }
  BoundValue b{"global_expectation", c * sum, {}, true, {}, {}};
  base_params(b, n, d, k);
  b.params["C"] = c;
  return b;
}

BoundValue local_leq_bound(const Spectrum& spec, int n, int d, double mu, int r_idx, const BoundConstants& k) {
  check_split(spec, n, d);
  check_mu(spec, d, mu);
  if (r_idx < 0 || r_idx > d) throw std::invalid_argument("local_leq_bound: r out of range");
  const int p = spec.dim();
  const double c = k.split_constant();
  const double tr = spec.trace();
  const double next = spec.lambda(d + 1);
  double local = 0.0;
  for (int j = 1; j <= r_idx; ++j) {
    const double g = spec.lambda(j) - next;
    local += ratio((spec.lambda(j) - mu) * spec.lambda(j) * tr, n * g * g);
  }
  double crude = 0.0;
  for (int j = r_idx + 1; j <= std::min(d, r_idx + p - d); ++j) crude += spec.lambda(j) - mu;
  BoundValue b{"local_leq", c * local + crude, {}, true, {}, {}};
  base_params(b, n, d, k);
  b.params["mu"] = mu;
  b.params["r"] = r_idx;
  b.params["C"] = c;
  return b;
}

BoundValue local_gt_bound(const Spectrum& spec, int n, int d, double mu, int l_idx, const BoundConstants& k) {
  check_split(spec, n, d);
  check_mu(spec, d, mu);
  const int p = spec.dim();
  if (l_idx < d + 1 || l_idx > p + 1) throw std::out_of_range("local_gt_bound: l out of range");
  const double c = k.split_constant();
  const double tr = spec.trace();
  const double lam_d = spec.lambda(d);
  double local = 0.0;
  for (int j = l_idx; j <= p; ++j) {
    const double g = lam_d - spec.lambda(j);
    local += ratio((mu - spec.lambda(j)) * spec.lambda(j) * tr, n * g * g);
  }
  double crude = 0.0;
  for (int j = std::max(d + 1, l_idx - d); j <= l_idx - 1; ++j) crude += mu - spec.lambda(j);
  const double rem = (mu - spec.lambda(p)) * split_remainder_rate(n, k);
  BoundValue b{"local_gt", c * local + crude + rem, {}, true, {}, {}};
  base_params(b, n, d, k);
  b.params["mu"] = mu;
  b.params["l"] = l_idx;
  b.params["C"] = c;
  b.params["remainder"] = rem;
  set_condition(b, d, rank_condition_rhs(n, k));
  return b;
}

BoundPair minima_bound(const Spectrum& spec, int n, int d, const BoundConstants& k) {
  check_split(spec, n, d);
  const int p = spec.dim();
  const double c = k.split_constant();
  const double tr = spec.trace();
  const double lam_d = spec.lambda(d);
  const double next = spec.lambda(d + 1);
  double leq = 0.0;
  for (int j = 1; j <= d; ++j) {
    const double g = spec.lambda(j) - next;
    leq += std::min(ratio(c * spec.lambda(j) * tr, n * g), g);
  }
  double gt = 0.0;
  for (int j = d + 1; j <= p; ++j) {
    const double g = lam_d - spec.lambda(j);
    gt += std::min(ratio(c * spec.lambda(j) * tr, n * g), g);
  }
  const double rem = (lam_d - spec.lambda(p)) * split_remainder_rate(n, k);
  BoundPair out{{"minima_leq", leq, {}, true, {}, {}}, {"minima_gt", gt + rem, {}, true, {}, {}}};
  for (auto* b : {&out.first, &out.second}) {
    base_params(*b, n, d, k);
    b->params["C"] = c;
  }
  out.second.params["remainder"] = rem;
  set_condition(out.second, d, rank_condition_rhs(n, k));
  return out;
}

BoundPair local_global_bounds(const Spectrum& spec, int n, int d, const BoundConstants& k) {
  check_split(spec, n, d);
  const int p = spec.dim();
  const double c = k.split_constant();
  const double tr = spec.trace();
  const double lam_d = spec.lambda(d);
  const double next = spec.lambda(d + 1);
  double sum = 0.0;
  for (int j = 1; j <= d; ++j)
    if (spec.lambda(j) > next) sum += spec.lambda(j) * tr / (n * (spec.lambda(j) - next));
  for (int j = d + 1; j <= p; ++j)
    if (spec.lambda(j) < lam_d) sum += spec.lambda(j) * tr / (n * (lam_d - spec.lambda(j)));
  const double rem = lam_d * split_remainder_rate(n, k);
  double global = std::sqrt(c * d * spec.tr_gt(d) * tr / n);
  for (int j = 1; j <= d; ++j) global += std::sqrt(c * spec.lambda(j) * tr / n);

  BoundPair out{{"local_sum", c * sum + rem, {}, true, {}, {}}, {"global_sum", global, {}, true, {}, {}}};
  for (auto* b : {&out.first, &out.second}) {
    base_params(*b, n, d, k);
    b->params["C"] = c;
  }
  out.first.params["remainder"] = rem;
  set_condition(out.first, d, rank_condition_rhs(n, k));
  return out;
}

double weighted_condition_lhs(const Spectrum& spec, int s, double mu) {
  const double lam_s = spec.lambda(s);
  if (!(lam_s > mu)) return kInf;
  double sum = 0.0;
  for (int j = 1; j <= s; ++j) sum += spec.lambda(j) / (spec.lambda(j) - mu);
  return lam_s / (lam_s - mu) * sum;
}

int largest_admissible_s(const Spectrum& spec, int n, int d, const BoundConstants& k) {
  const double mu = spec.lambda(d + 1);
  for (int s = d; s >= 1; --s)
    if (weighted_condition_lhs(spec, s, mu) <= weighted_rhs(n, k)) return s;
  return 0;
}

double admissible_c1(const Spectrum& spec, int d) {
  const double spread = spec.lambda(d) - spec.lambda(spec.dim());
  if (spread == 0.0) return kInf;
  return (spec.lambda(d) - spec.lambda(d + 1)) / spread;
}

BoundValue weighted_bound(const Spectrum& spec, int n, int d, int s_idx, int r_idx, const BoundConstants& k) {
  check_split(spec, n, d);
  if (s_idx < 1 || s_idx > d || r_idx < 0 || r_idx > s_idx)
    throw std::invalid_argument("weighted_bound: need 1 <= s <= d and 0 <= r <= s");
  const double c = k.weighted_constant();
  const double tr = spec.trace();
  const double tail = spec.tr_gt(s_idx);
  const double next = spec.lambda(d + 1);
  const double lam_s = spec.lambda(s_idx);
  double local = 0.0, full = 0.0;
  for (int j = 1; j <= r_idx; ++j) {
    const double g = spec.lambda(j) - next;
    local += ratio(spec.lambda(j) * tail, n * g);
    full += ratio(spec.lambda(j) * tr, n * g);
  }
  double crude = 0.0;
  for (int j = r_idx + 1; j <= d; ++j) crude += spec.lambda(j) - next;
  const double expo = (lam_s - next) / (16.0 * k.C3 * lam_s);
  const double rem = full == 0.0 ? 0.0 : c * full * std::exp(-n * expo * expo);
  BoundValue b{"weighted", c * local + 2.0 * crude + rem, {}, true, {}, {}};
  base_params(b, n, d, k);
  b.params["s"] = s_idx;
  b.params["r"] = r_idx;
  b.params["C"] = c;
  b.params["remainder"] = rem;
  set_condition(b, weighted_condition_lhs(spec, s_idx, next), weighted_rhs(n, k));
  return b;
}

BoundPair weighted_pair_bounds(const Spectrum& spec, int n, int d, const BoundConstants& k) {
  check_split(spec, n, d);
  const int p = spec.dim();
  const double c = k.weighted_constant();
  const double tr = spec.trace();
  const double lam_d = spec.lambda(d);
  const double lam_p = spec.lambda(p);
  const double next = spec.lambda(d + 1);
  double c1 = 1.0;
  if (k.c1) {
    c1 = *k.c1;
  } else if (std::isfinite(admissible_c1(spec, d))) {
    c1 = admissible_c1(spec, d);
  }
  const double c1_lhs = c1 * (lam_d - lam_p);
  const double c1_rhs = lam_d - next;
  const bool c1_ok = c1 > 0.0 && c1_rhs >= c1_lhs;

  double gap_sum = 0.0, root_sum = 0.0;
  for (int j = 1; j <= d; ++j) {
    gap_sum += ratio(spec.lambda(j), spec.lambda(j) - next);
    root_sum += std::sqrt(spec.lambda(j));
  }
  const double local_rate = std::exp(-c1 * c1 * n * (lam_d - lam_p) * (lam_d - lam_p) / (c * lam_d * lam_d));
  const double local = c / (c1 * n) * (spec.tr_gt(d) + tr * local_rate) * gap_sum;

  const int s = largest_admissible_s(spec, n, d, k);
  double global_rate = 1.0;
  if (s > 0) {
    const double lam_s = spec.lambda(s);
    global_rate = std::exp(-c1 * c1 * n * (lam_s - lam_p) * (lam_s - lam_p) / (c * lam_s * lam_s));
  }
  const double global =
      c / (c1 * std::sqrt(double(n))) * (std::sqrt(spec.tr_gt(s)) + std::sqrt(tr) * global_rate) * root_sum;

  BoundPair out{{"weighted_local", local, {}, true, {}, {}}, {"weighted_global", global, {}, true, {}, {}}};
  for (auto* b : {&out.first, &out.second}) {
    base_params(*b, n, d, k);
    b->params["C"] = c;
    b->params["c1"] = c1;
    b->params["c1_condition_lhs"] = c1_lhs;
    b->params["c1_condition_rhs"] = c1_rhs;
    b->params["c1_condition_ok"] = c1_ok;
  }
  set_condition(out.first, weighted_condition_lhs(spec, d, next), weighted_rhs(n, k));
  out.first.condition_ok = out.first.condition_ok && c1_ok;
  out.second.params["s"] = s;
  out.second.condition_ok = c1_ok;
  return out;
}

BoundValue oracle_bound(const Spectrum& spec, int n, int d, int s_idx, const BoundConstants& k) {
  check_split(spec, n, d);
  if (s_idx < 1 || s_idx > d) throw std::invalid_argument("oracle_bound: need 1 <= s <= d");
  const double c = k.weighted_constant();
  const double lam_s = spec.lambda(s_idx);
  const double next = spec.lambda(d + 1);
  const double rem = c * spec.trace() * std::exp(-n * (lam_s - next) * (lam_s - next) / (c * lam_s * lam_s));
  BoundValue b{"oracle", c * spec.tr_gt(s_idx) + rem, {}, true, {}, {}};
  base_params(b, n, d, k);
  b.params["s"] = s_idx;
  b.params["C"] = c;
  b.params["remainder"] = rem;
  set_condition(b, weighted_condition_lhs(spec, s_idx, next), weighted_rhs(n, k));
  return b;
}

BoundPair spiked_bounds(double x, double kappa, int p, int d, int n, const BoundConstants& k) {
  if (!(x >= 0.0) || !(kappa >= 1.0)) throw std::invalid_argument("spiked_bounds: need x >= 0, kappa >= 1");
  if (d < 1 || d >= p || n < 1) throw std::invalid_argument("spiked_bounds: need 1 <= d < p and n >= 1");
  const double c = k.split_constant();
  const double dd = d, q = p - d;
  const double upper = std::min({ratio(c * kappa * (1.0 + kappa * x) * dd * q, n * x), dd * kappa * x, q * kappa * x}) +
                       kappa * x * split_remainder_rate(n, k);
  const double lower = k.c_lower * std::min({ratio((1.0 + x) * dd * q, n * x), dd * x, q * x});
  BoundPair out{{"spiked_upper", upper, {}, true, {}, {}}, {"spiked_lower", lower, {}, true, {}, {}}};
  for (auto* b : {&out.first, &out.second}) {
    base_params(*b, n, d, k);
    b->params["p"] = p;
    b->params["x"] = x;
    b->params["kappa"] = kappa;
  }
  out.first.params["C"] = c;
  out.second.params["c_lower"] = k.c_lower;
  set_condition(out.first, d, rank_condition_rhs(n, k));
  return out;
}

BoundValue best_local_leq(const Spectrum& spec, int n, int d, const BoundConstants& k) {
  const double mu = spec.lambda(d + 1);
  BoundValue best = local_leq_bound(spec, n, d, mu, 0, k);
  for (int r = 1; r <= d; ++r) {
    BoundValue cand = local_leq_bound(spec, n, d, mu, r, k);
    if (cand.value < best.value) best = std::move(cand);
  }
  best.name = "local_leq_best";
  return best;
}

}  // namespace pcarisk
