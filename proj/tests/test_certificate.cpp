#include <doctest.h>

#include <numeric>

#include "gmc/certificate.hpp"
#include "gmc/diagnostics.hpp"
#include "test_util.hpp"

using namespace gmc;

TEST_SUITE_BEGIN("certificate");

namespace {

SampleSet repeated_full_batches(int L, int batches) {
  SampleSet s;
  s.L = L;
  for (int b = 0; b < batches; ++b)
    for (int a = 0; a < L; ++a) s.indices.push_back(a);
  s.batch_sizes.assign(batches, L);
  return s;
}

SampleSet theorem_samples(const BasisSet& basis, const DualBasisData& dual,
                          const Eigen::MatrixXd& m, int r, double beta,
                          std::uint64_t seed, TheoremConstants* out_tc = nullptr) {
  const double mu = correlation_parameter(basis).mu;
  const double nu = coherence_profile(m, basis, dual).nu;
  TheoremConstants tc =
      sample_bound(basis.n(), r, nu, dual.spectrum(), mu, basis.L(), beta);
  if (out_tc) *out_tc = tc;
  return partition_omega(draw_omega(basis.L(), tc.m_total, seed), tc.l);
}

}  // namespace

TEST_CASE("eta of dual coefficients") {
  BasisSet entry = make_entry_basis(4);
  DualBasisData dual = dual_set(entry);
  CHECK(eta_max(Eigen::MatrixXd::Zero(4, 4), dual) == doctest::Approx(0.0));
  CHECK(eta_max(entry.element(0), dual) == doctest::Approx(1.0));

  const int n = 8;
  BasisSet edg = make_edg_basis(n);
  DualBasisData dual_edg = dual_set(edg);
  Eigen::MatrixXd m = test::random_centered_gram(n, 1, 33);
  Eigen::MatrixXd sgn = sign_matrix(m);
  const double nu = coherence_profile(m, edg, dual_edg).nu;
  const double inf = dual_edg.spectrum().hinv_inf_norm;
  const double eta = eta_max(sgn, dual_edg);
  CHECK(eta * eta <= inf * inf * nu * 1.0 / (static_cast<double>(n) * n) + 1e-10);
}

TEST_CASE("one full orthonormal batch kills the residual") {
  const int n = 6;
  BasisSet entry = make_entry_basis(n);
  DualBasisData dual = dual_set(entry);
  Eigen::MatrixXd m = test::random_rank_r(n, 2, 35);
  SampleSet s = repeated_full_batches(entry.L(), 3);
  CertificateReport report = golfing_build(m, entry, dual, s);
  CHECK(report.q_norms[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(report.q_norms[1] <= 1e-12);
  CHECK(report.q_norms_direct[1] <= 1e-12);
  CHECK(report.verdict);
  CHECK(report.cond1);
  CHECK(report.cond2);
  CHECK(report.lambda_min_ok);
}

TEST_CASE("theorem-scale golfing contracts and certifies") {
  const int n = 10, r = 1;
  BasisSet edg = make_edg_basis(n);
  DualBasisData dual = dual_set(edg);
  int certified = 0;
  int contracted = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd m = test::random_centered_gram(n, r, 7000 + t);
    SampleSet s = theorem_samples(edg, dual, m, r, 1.5, 7100 + t);
    CertificateReport report = golfing_build(m, edg, dual, s);
    if (report.verdict) ++certified;
    bool all_halved = true;
    for (std::size_t i = 1; i < report.q_norms.size(); ++i)
      all_halved = all_halved &&
                   report.q_norms[i] <= std::pow(0.5, static_cast<double>(i)) *
                                            std::sqrt(static_cast<double>(r));
    if (all_halved) ++contracted;
    CHECK(report.recursion_residual <= 1e-10);
  }
  CHECK(certified >= 18);
  CHECK(contracted >= 18);
}

TEST_CASE("degenerate runs stay graceful") {
  const int n = 5;
  BasisSet edg = make_edg_basis(n);
  DualBasisData dual = dual_set(edg);
  Eigen::MatrixXd m = test::random_centered_gram(n, 1, 39);

  SampleSet tiny = partition_omega(draw_omega(edg.L(), 1, 40), 1);
  CertificateReport report = golfing_build(m, edg, dual, tiny);
  CHECK(report.q_norms.size() == 2);

  SampleSet unpartitioned = draw_omega(edg.L(), 10, 41);
  CHECK_THROWS_AS(golfing_build(m, edg, dual, unpartitioned), PartitionError);
}

TEST_CASE("verdict evaluation") {
  BasisSet edg = make_edg_basis(6);
  DualBasisData dual = dual_set(edg);

  CertificateReport injected;  // Y with P_T Y = Sgn M exactly
  injected.cond1_lhs = 0.0;
  injected.cond2_lhs = 0.0;
  CertificateVerdict good = verify_dual_certificate(injected, dual, edg.L());
  CHECK(good.ok);

  CertificateReport zero;  // Y = 0 leaves the full sign matrix behind
  zero.cond1_lhs = 1.0;    // sqrt(r) at r = 1
  zero.cond2_lhs = 0.0;
  CertificateVerdict bad = verify_dual_certificate(zero, dual, edg.L());
  CHECK_FALSE(bad.cond1);
  CHECK_FALSE(bad.ok);
}

TEST_CASE("golfing output lies in the sampled span") {
  const int n = 8, r = 1;
  BasisSet edg = make_edg_basis(n);
  DualBasisData dual = dual_set(edg);
  Eigen::MatrixXd m = test::random_centered_gram(n, r, 43);
  SampleSet s = partition_omega(draw_omega(edg.L(), 120, 44), 4);
  CertificateReport report = golfing_build(m, edg, dual, s);

  // least-squares fit of Y onto span{w_a : a in Omega}
  std::vector<std::int32_t> uniq = s.indices;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  Eigen::MatrixXd cols(edg.W().rows(), uniq.size());
  for (std::size_t k = 0; k < uniq.size(); ++k) cols.col(k) = edg.W().col(uniq[k]);
  Eigen::VectorXd y = test::as_vector(report.Y);
  Eigen::VectorXd fitted = cols * cols.colPivHouseholderQr().solve(y);
  CHECK((y - fitted).norm() <= 1e-8 * y.norm());
}

TEST_CASE("eta trace is nonincreasing in median at theorem scale") {
  const int n = 10, r = 1;
  BasisSet edg = make_edg_basis(n);
  DualBasisData dual = dual_set(edg);
  std::vector<std::vector<double>> traces;
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd m = test::random_centered_gram(n, r, 8000 + t);
    SampleSet s = theorem_samples(edg, dual, m, r, 1.5, 8100 + t);
    traces.push_back(golfing_build(m, edg, dual, s).eta_trace);
  }
  const std::size_t steps = traces.front().size();
  auto median_at = [&](std::size_t i) {
    std::vector<double> column;
    for (const auto& trace : traces) column.push_back(trace[i]);
    std::sort(column.begin(), column.end());
    return 0.5 * (column[9] + column[10]);
  };
  for (std::size_t i = 1; i < steps; ++i)
    CHECK(median_at(i) <= median_at(i - 1) * (1.0 + 1e-12));
}

TEST_CASE("audit thresholds are recorded") {
  const int n = 6, r = 2;
  BasisSet edg = make_edg_basis(n);
  DualBasisData dual = dual_set(edg);
  Eigen::MatrixXd m = test::random_centered_gram(n, r, 47);
  SampleSet s = partition_omega(draw_omega(edg.L(), 60, 48), 3);
  CertificateReport report = golfing_build(m, edg, dual, s);
  CHECK(report.t2 == doctest::Approx(0.5));
  const double inf = dual.spectrum().hinv_inf_norm;
  CHECK(report.t3 ==
        doctest::Approx(std::min(2.0 * inf, 0.25) / std::sqrt(2.0)));
}

TEST_SUITE_END();
