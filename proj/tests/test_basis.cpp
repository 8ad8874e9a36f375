#include <doctest.h>

#include <iostream>
#include <sstream>

#include "gmc/basis.hpp"
#include "gmc/diagnostics.hpp"
#include "test_util.hpp"

using namespace gmc;

TEST_SUITE_BEGIN("basis");

TEST_CASE("entry basis smallest cases") {
  BasisSet one = make_entry_basis(1);
  CHECK(one.L() == 1);
  CHECK(one.element(0)(0, 0) == doctest::Approx(1.0));

  BasisSet two = make_entry_basis(2);
  CHECK(two.L() == 4);
  Eigen::MatrixXd gram = gram_matrix(two);
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("entry basis is uncorrelated") {
  CHECK(correlation_parameter(make_entry_basis(4)).mu <= 1e-12);
}

TEST_CASE("pair basis construction and errors") {
  CHECK_THROWS_AS(make_edg_basis(1), InvalidDimensionError);

  BasisSet smallest = make_edg_basis(2);
  CHECK(smallest.L() == 1);
  Eigen::MatrixXd expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  CHECK((smallest.element(0) - expected).norm() <= 1e-15);

  BasisSet b = make_edg_basis(10);
  CHECK(b.L() == 45);
  CHECK(correlation_parameter(b).mu == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("pair basis frame sum has the closed form") {
  const int n = 5;
  BasisSet b = make_edg_basis(n);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < b.L(); ++a) {
    Eigen::MatrixXd w = b.element(a);
    sum += w * w;  // elements are symmetric
  }
  Eigen::MatrixXd expected =
      (n * Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Ones(n, n)) /
      (2.0 * n);
  CHECK(((sum / n) - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("hankel basis shapes and orthogonality") {
  BasisSet trivial = make_hankel_basis(1, 1);
  CHECK(trivial.L() == 1);
  CHECK(trivial.element(0)(0, 0) == doctest::Approx(1.0));

  BasisSet square = make_hankel_basis(3, 3);
  CHECK(square.L() == 5);
  CHECK((gram_matrix(square) - Eigen::MatrixXd::Identity(5, 5)).norm() <= 1e-14);

  BasisSet rect = make_hankel_basis(2, 3);
  CHECK(rect.L() == 4);
  // direct inner-product oracle over the four elements
  for (int a = 0; a < 4; ++a)
    for (int b2 = a + 1; b2 < 4; ++b2)
      CHECK(std::abs(rect.W().col(a).dot(rect.W().col(b2))) <= 1e-15);
}

TEST_CASE("rank-one basis") {
  const int n = 3;
  std::vector<Eigen::VectorXd> standard;
  for (int i = 0; i < n; ++i)
    standard.push_back(Eigen::VectorXd::Unit(n, i));
  BasisSet diag = make_rank_one_basis(standard);
  CHECK((gram_matrix(diag) - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-14);

  std::vector<Eigen::VectorXd> pair = {Eigen::VectorXd::Unit(2, 0),
                                       Eigen::Vector2d(1, 1).normalized()};
  Eigen::MatrixXd gram = gram_matrix(make_rank_one_basis(pair));
  CHECK(gram(0, 1) == doctest::Approx(0.5));  // <e1 e1^T, v v^T> = 1/2

  std::vector<Eigen::VectorXd> with_zero = {Eigen::VectorXd::Unit(2, 0),
                                            Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS(make_rank_one_basis(with_zero), InvalidInputError);

  std::vector<Eigen::VectorXd> dependent = {Eigen::VectorXd::Unit(2, 0),
                                            2.0 * Eigen::VectorXd::Unit(2, 0)};
  CHECK_THROWS_AS(make_rank_one_basis(dependent), SingularBasisError);
}

TEST_CASE("rank-one correlation matches an eigen oracle") {
  const int n = 4;
  CounterRng rng(99);
  std::vector<Eigen::VectorXd> vectors;
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
    vectors.push_back(v.normalized());
  }
  BasisSet b = make_rank_one_basis(vectors);
  // brute-force eigen-decomposition of both frame sums
  Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < b.L(); ++a) {
    Eigen::MatrixXd w = b.element(a);
    s1 += w.transpose() * w;
    s2 += w * w.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(
      s1 / n - Eigen::MatrixXd::Identity(n, n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(
      s2 / n - Eigen::MatrixXd::Identity(n, n));
  const double expected = std::max(e1.eigenvalues().cwiseAbs().maxCoeff(),
                                   e2.eigenvalues().cwiseAbs().maxCoeff());
  CHECK(correlation_parameter(b).mu == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("weighted basis") {
  BasisSet base = make_entry_basis(2);
  BasisSet identity_weight =
      make_weighted_basis(Eigen::Vector2d(1.0, 1.0), base);
  CHECK((identity_weight.W() - base.W()).norm() <= 1e-15);

  BasisSet uniform = make_weighted_basis(Eigen::Vector2d(2.0, 2.0), base);
  CHECK((uniform.W() - base.W()).norm() <= 1e-15);

  BasisSet diagonal = make_weighted_basis(Eigen::Vector2d(1.0, 2.0), base);
  CHECK((gram_matrix(diagonal) - Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-14);
  CHECK(diagonal.weight_scales().size() == 4);

  CHECK_THROWS_AS(make_weighted_basis(Eigen::Vector2d(1.0, 0.0), base),
                  InvalidWeightsError);
}

TEST_CASE("validation report") {
  BasisValidation entry = validate_basis(make_entry_basis(3));
  CHECK(entry.max_norm_deviation <= 1e-15);
  CHECK(entry.rank == 9);
  CHECK(entry.full_rank);

  BasisValidation edg = validate_basis(make_edg_basis(4));
  CHECK(edg.rank == 6);
  CHECK(edg.constraints_ok);

  BasisSet dup = [] {
    Eigen::MatrixXd w(4, 2);
    w.col(0) = Eigen::Vector4d(1, 0, 0, 0);
    w.col(1) = Eigen::Vector4d(1, 0, 0, 0);
    return make_custom_basis(2, 2, w, SubspaceFlags{});
  }();
  BasisValidation degenerate = validate_basis(dup);
  CHECK_FALSE(degenerate.full_rank);
  CHECK(degenerate.rank == 1);
}

TEST_CASE("built-in families carry unit norms and declared structure") {
  for (int n : {4, 8, 12, 20}) {
    CHECK(validate_basis(make_entry_basis(n)).max_norm_deviation <= 1e-12);
    CHECK(validate_basis(make_edg_basis(n)).max_norm_deviation <= 1e-12);
    CHECK(validate_basis(make_hankel_basis(n, n)).max_norm_deviation <= 1e-12);
  }
  BasisSet edg = make_edg_basis(6);
  for (int a = 0; a < edg.L(); ++a) {
    Eigen::MatrixXd w = edg.element(a);
    CHECK((w - w.transpose()).norm() == 0.0);
    CHECK((w * Eigen::VectorXd::Ones(6)).norm() == 0.0);
  }
  for (int n : {4, 9, 16}) {
    CHECK((gram_matrix(make_entry_basis(n)) -
           Eigen::MatrixXd::Identity(n * n, n * n))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    CHECK((gram_matrix(make_hankel_basis(n, n)) -
           Eigen::MatrixXd::Identity(2 * n - 1, 2 * n - 1))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("complete orthonormal families satisfy the completeness relation") {
  for (int n : {3, 5}) {
    // a random rotation of the entry basis stays orthonormal and complete
    Eigen::MatrixXd g = test::random_matrix(n * n, n * n, 404 + n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    BasisSet rotated = make_custom_basis(n, n, q, SubspaceFlags{});
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < rotated.L(); ++a) {
      Eigen::MatrixXd w = rotated.element(a);
      s1 += w * w.transpose();
      s2 += w.transpose() * w;
    }
    CHECK((s1 - n * Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-10);
    CHECK((s2 - n * Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-10);
  }
}

TEST_CASE("textual round trip") {
  BasisSet edg = make_edg_basis(5);
  std::stringstream stream;
  save_basis(edg, stream);
  BasisSet loaded = load_basis(stream);
  CHECK(loaded.family() == BasisFamily::edg);
  CHECK(loaded.L() == edg.L());
  CHECK((loaded.W() - edg.W()).cwiseAbs().maxCoeff() <= 1e-15);

  Eigen::MatrixXd w = test::random_matrix(9, 4, 7);
  for (int a = 0; a < 4; ++a) w.col(a).normalize();
  BasisSet custom = make_custom_basis(3, 3, w, SubspaceFlags{});
  std::stringstream stream2;
  save_basis(custom, stream2);
  BasisSet loaded2 = load_basis(stream2);
  const double rel = (loaded2.W() - custom.W()).cwiseAbs().maxCoeff() /
                     custom.W().cwiseAbs().maxCoeff();
  CHECK(rel <= 1e-15);

  std::stringstream sink;
  CHECK_THROWS_AS(save_basis(make_hankel_basis(2, 3), sink), IoError);
}

TEST_SUITE_END();
