#include "helpers.hpp"

#include <doctest.h>

using namespace pcarisk;
using testing::projector_matrix;
using testing::random_model;

namespace {

Realization sampled(const CovModel& m, int n, int d, std::uint64_t seed) {
  return Realization(m, empirical_covariance(draw_gaussian_samples(m, n, seed)), d);
}

// Matrix-form second-order expansion of P_j Phat_{>d}, summed projector by projector.
Matrix second_order_oracle_leq(const Realization& r, int j) {
  const int p = r.p(), d = r.d();
  const Matrix dm = r.delta().matrix();
  const Matrix pj = r.pop_proj(j);
  Matrix out = Matrix::Zero(p, p);
  for (int k = d + 1; k <= p; ++k) out += pj * dm * r.pop_proj(k) / (r.lambda(j) - r.lambda(k));
  for (int m = 1; m <= d; ++m)
    for (int k = d + 1; k <= p; ++k)
      out += pj * dm * r.pop_proj(m) * dm * r.emp_proj(k) /
             ((r.lambda(j) - r.lambda_hat(k)) * (r.lambda(m) - r.lambda_hat(k)));
  for (int k = d + 1; k <= p; ++k)
    for (int m = 1; m <= d; ++m)
      out += pj * dm * r.pop_proj(k) * dm * r.emp_proj(m) /
             ((r.lambda(j) - r.lambda(k)) * (r.lambda_hat(m) - r.lambda(k)));
  for (int k = d + 1; k <= p; ++k)
    for (int l = d + 1; l <= p; ++l)
      out -= pj * dm * r.pop_proj(k) * dm * r.emp_proj(l) /
             ((r.lambda(j) - r.lambda_hat(l)) * (r.lambda(j) - r.lambda(k)));
  return out;
}

}  // namespace

TEST_CASE("interaction identity") {
  const CovModel m = make_custom_model(Spectrum({5.0, 3.0, 2.0, 1.5, 1.0}));
  const Realization exact(m, m.covariance(), 2);
  for (int j = 1; j <= 5; ++j)
    for (int k = 1; k <= 5; ++k) {
      const auto c = interaction_identity(exact, j, k);
      if (j != k) {
        CHECK(c.lhs == 0.0);
        CHECK(c.rhs == 0.0);
      } else {
        CHECK(c.degenerate);
      }
      CHECK(c.passed);
    }

  RngStream rng(5, 0);
  for (int t = 0; t < 10; ++t) {
    const CovModel rm = random_model(5, rng);
    const Realization r = sampled(rm, 12, 2, 50 + t);
    for (int j = 1; j <= 5; ++j)
      for (int k = 1; k <= 5; ++k) {
        const Matrix diff = (r.lambda(j) - r.lambda_hat(k)) * r.pop_proj(j) * r.emp_proj(k) -
                            r.pop_proj(j) * r.delta().matrix() * r.emp_proj(k);
        CHECK(diff.norm() <= 1e-9);
        CHECK(interaction_identity(r, j, k).abs_err <= 1e-9);
      }
  }
  CHECK_THROWS_AS(interaction_identity(exact, 0, 1), std::out_of_range);
}

TEST_CASE("degenerate denominators are flagged") {
  const CovModel m = make_custom_model(Spectrum({3.0, 2.0, 1.0}));
  EigenDecomposition emp{Vector(3), Matrix::Identity(3, 3)};
  emp.values << 3.5, 3.0, 0.5;
  const Realization r(m, emp, 1);
  CHECK(interaction_identity(r, 1, 2).degenerate);
  CHECK(!interaction_identity(r, 2, 2).degenerate);
  CHECK(overlap_expansion(r, Side::gt, 2).degenerate == false);
  const auto c = second_order_expansion(r, Side::leq, 1);
  CHECK(c.degenerate);
  CHECK(c.passed);
}

TEST_CASE("overlap expansion") {
  const CovModel m = make_custom_model(Spectrum({4.0, 3.0, 2.0, 1.0}));
  const Realization exact(m, m.covariance(), 2);
  const auto c0 = overlap_expansion(exact, Side::leq, 1);
  CHECK(c0.lhs == 0.0);
  CHECK(c0.rhs == 0.0);

  ModelParams sp;
  sp.x = 1.0;
  sp.d = 3;
  const CovModel spiked = make_model(ModelKind::spiked, sp, 8);
  const Realization r = sampled(spiked, 60, 3, 77);
  double total = 0.0;
  for (int j = 1; j <= 3; ++j) {
    const auto c = overlap_expansion(r, Side::leq, j);
    CHECK(!c.degenerate);
    CHECK(c.rel_err <= 1e-6);
    // direct overlap <P_j, Phat_{>d}> from projector matrices
    const double direct = (r.pop_proj(j) * projector_matrix(r.emp_frame(), 4, 8)).trace();
    CHECK(c.lhs == doctest::Approx(direct).epsilon(1e-10).scale(1.0));
    total += c.lhs;
  }
  CHECK(total == doctest::Approx(hs_distance_sq(r.pop_leq(), r.emp_leq()) / 2.0).epsilon(1e-9).scale(1.0));
  const auto g = overlap_expansion(r, Side::gt, 4);
  CHECK(g.rel_err <= 1e-6);
  CHECK_THROWS_AS(overlap_expansion(r, Side::gt, 3), std::out_of_range);
  CHECK_THROWS_AS(overlap_expansion(r, Side::leq, 4), std::out_of_range);
}

TEST_CASE("second-order expansion") {
  const CovModel m = make_custom_model(Spectrum({4.0, 2.0, 1.0}));
  const Realization exact(m, m.covariance(), 1);
  const auto c0 = second_order_expansion(exact, Side::leq, 1);
  CHECK(c0.lhs == 0.0);
  CHECK(c0.rhs == 0.0);

  const Realization r = sampled(m, 40, 1, 8);
  const auto c = second_order_expansion(r, Side::leq, 1);
  CHECK(!c.degenerate);
  CHECK(c.abs_err <= 1e-8 * r.lambda(1));
  const Matrix lhs = r.pop_proj(1) * projector_matrix(r.emp_frame(), 2, 3);
  const Matrix rhs = second_order_oracle_leq(r, 1);
  CHECK((lhs - rhs).norm() <= 1e-8 * r.lambda(1));
  CHECK(c.rhs == doctest::Approx(rhs.norm()).epsilon(1e-10));
  const auto g = second_order_expansion(r, Side::gt, 2);
  CHECK(g.abs_err <= 1e-8 * r.lambda(1));

  RngStream rng(9, 0);
  for (int t = 0; t < 20; ++t) {
    const CovModel rm = random_model(6, rng);
    const Realization rr = sampled(rm, 200, 2, 300 + t);
    for (int j = 1; j <= 2; ++j) {
      const auto cj = second_order_expansion(rr, Side::leq, j);
      if (cj.degenerate) continue;
      const Matrix l = rr.pop_proj(j) * projector_matrix(rr.emp_frame(), 3, 6);
      CHECK((l - second_order_oracle_leq(rr, j)).norm() <= 1e-7 * rr.lambda(1));
      CHECK(cj.passed);
    }
  }
}

TEST_CASE("spectral split identity and batch verification") {
  const CovModel m = make_custom_model(Spectrum({4.0, 2.0, 1.0, 0.5}));
  const Realization exact(m, m.covariance(), 2);
  const auto z = spectral_split_identity(exact, 1.5);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.passed);

  const Realization r = sampled(m, 25, 2, 3);
  for (double mu : {0.0, 1.0, 2.0, -7.3}) CHECK(spectral_split_identity(r, mu).passed);
  const std::vector<double> mus{0.0, 1.0};
  const auto all = verify_identities(r, mus);
  CHECK(all.size() == 16 + 4 + 4 + 2);
  for (const auto& c : all) CHECK_MESSAGE(c.passed, c.name);
}
