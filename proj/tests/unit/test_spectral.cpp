#include "helpers.hpp"

#include <doctest.h>

using namespace pcarisk;
using testing::power_iteration_norm;
using testing::random_symmetric;

TEST_CASE("SymMatrix symmetrizes exactly") {
  Matrix a(2, 2);
  a << 1.0, 0.1, 0.3, 2.0;
  const SymMatrix s(a);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(0.2));
}

TEST_CASE("sym_eig on the 2x2 analytic case") {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const auto e = sym_eig(SymMatrix(a));
  CHECK(e.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(std::abs(e.vectors(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(e.vectors(0, 0) * e.vectors(1, 0) > 0.0);
}

TEST_CASE("sym_eig on diagonal input keeps values and breaks ties stably") {
  const auto e = sym_eig(SymMatrix::diagonal(Vector::Map(std::vector<double>{2, 5, 2}.data(), 3)));
  CHECK(e.values(0) == 5.0);
  CHECK(e.values(1) == 2.0);
  CHECK(e.values(2) == 2.0);
  // equal eigenvalues keep the original column order
  CHECK(std::abs(e.vectors(0, 1)) == 1.0);
  CHECK(std::abs(e.vectors(2, 2)) == 1.0);
}

TEST_CASE("sym_eig reconstruction and orthonormality on random matrices") {
  RngStream rng(11, 0);
  for (int p : {1, 2, 6, 17, 40}) {
    const Matrix a = random_symmetric(p, rng);
    const auto e = sym_eig(SymMatrix(a));
    const Matrix v = e.vectors;
    const double scale = 1.0 + a.cwiseAbs().maxCoeff();
    CHECK((v * e.values.asDiagonal() * v.transpose() - a).cwiseAbs().maxCoeff() <= 1e-9 * scale);
    CHECK((v.transpose() * v - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() <= 1e-10);
    for (int i = 1; i < p; ++i) CHECK(e.values(i) <= e.values(i - 1));
    const Vector vals = sym_eigvals(SymMatrix(a));
    CHECK((vals - e.values).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("sym_eig rejects non-finite input") {
  Matrix a = Matrix::Identity(3, 3);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sym_eig(SymMatrix(a)), std::invalid_argument);
}

TEST_CASE("EigenSolverError carries the residual") {
  const EigenSolverError e("x", 0.5, 64);
  CHECK(e.residual() == 0.5);
  CHECK(e.sweeps() == 64);
}

TEST_CASE("build_projector") {
  const Matrix id = Matrix::Identity(3, 3);
  const std::vector<int> one{1};
  const Projector p1 = build_projector(id, one);
  CHECK(p1.rank() == 1);
  CHECK(p1.matrix()(0, 0) == 1.0);
  CHECK(p1.matrix().matrix().sum() == 1.0);
  const Projector all = build_projector(id, 1, 3);
  CHECK(all.rank() == 3);
  CHECK(all.matrix().matrix() == id);

  RngStream rng(5, 0);
  const Matrix frame = random_orthonormal_frame(6, rng);
  const std::vector<int> idx{1, 2};
  const Projector p = build_projector(frame, idx);
  const Matrix& pm = p.matrix().matrix();
  CHECK((pm * pm - pm).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(pm.trace() == doctest::Approx(2.0).epsilon(1e-9));

  const std::vector<int> bad{0};
  CHECK_THROWS_AS(build_projector(id, bad), std::out_of_range);
  const std::vector<int> dup{1, 1};
  CHECK_THROWS_AS(build_projector(id, dup), std::invalid_argument);
  Matrix skew = id;
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(build_projector(skew, one), std::invalid_argument);
  CHECK(build_projector(id, 1, 0).rank() == 0);
}

TEST_CASE("hs_inner and norms") {
  const SymMatrix id = SymMatrix::identity(4);
  CHECK(hs_inner(id, id) == 4.0);
  const Matrix e = Matrix::Identity(3, 3);
  const SymMatrix e1(Matrix(e.col(0) * e.col(0).transpose()));
  const SymMatrix e2(Matrix(e.col(1) * e.col(1).transpose()));
  CHECK(hs_inner(e1, e2) == 0.0);
  CHECK_THROWS_AS(hs_inner(id, e1), std::invalid_argument);

  RngStream rng(3, 0);
  const SymMatrix s(random_symmetric(7, rng));
  CHECK(hs_norm_sq(s) == doctest::Approx(hs_inner(s, s)).epsilon(1e-10));
  CHECK(hs_inner(s, SymMatrix::identity(7)) == doctest::Approx(s.matrix().trace()).epsilon(1e-12));
}

TEST_CASE("op_norm against power iteration") {
  CHECK(op_norm(SymMatrix::diagonal(Vector::Map(std::vector<double>{3, 1}.data(), 2))) == 3.0);
  CHECK(op_norm(SymMatrix::zero(4)) == 0.0);
  RngStream rng(21, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_symmetric(6, rng);
    CHECK(op_norm(SymMatrix(a)) == doctest::Approx(power_iteration_norm(a)).epsilon(1e-8));
  }
  Matrix rect(2, 3);
  rect << 3, 0, 0, 0, 1, 0;
  CHECK(op_norm(rect) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("projector overlap equals squared product norm and is bounded") {
  RngStream rng(8, 0);
  const Matrix f1 = random_orthonormal_frame(7, rng);
  const Matrix f2 = random_orthonormal_frame(7, rng);
  const Projector p = build_projector(f1, 1, 3);
  const Projector q = build_projector(f2, 1, 2);
  const double inner = hs_inner(p.matrix(), q.matrix());
  CHECK(inner == doctest::Approx((p.matrix().matrix() * q.matrix().matrix()).squaredNorm()).epsilon(1e-10));
  CHECK(inner >= 0.0);
  CHECK(inner <= 2.0 + 1e-12);
}
