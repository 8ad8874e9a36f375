#include "gmc/certificate.hpp"

#include <cmath>

#include "gmc/diagnostics.hpp"
#include "gmc/tangent.hpp"

namespace gmc {

double eta_max(const Eigen::MatrixXd& x, const DualBasisData& dual) {
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
  return (dual.Z().transpose() * xv).cwiseAbs().maxCoeff();
}

CertificateReport golfing_build(const Eigen::MatrixXd& m, const BasisSet& basis,
                                const DualBasisData& dual, const SampleSet& s,
                                double rank_tol) {
  if (s.batches() == 0)
    throw PartitionError("golfing needs a partitioned sample set");
  for (int size : s.batch_sizes)
    if (size == 0) throw PartitionError("golfing batches must be nonempty");
  if (m.rows() != basis.rows() || m.cols() != basis.cols())
    throw InvalidDimensionError("matrix shape does not match the basis");

  TangentSpace ts = tangent_space_of(m, rank_tol);
  const int r = ts.rank();
  const int L = basis.L();
  Eigen::MatrixXd sgn = ts.U() * ts.V().transpose();

  CertificateReport report;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  Eigen::MatrixXd q_rec = sgn;       // recursive sequence
  Eigen::MatrixXd q_direct = sgn;    // direct sequence, for the cross-check
  report.q_norms.push_back(q_rec.norm());
  report.q_norms_direct.push_back(q_direct.norm());
  report.eta_trace.push_back(eta_max(q_rec, dual));

  for (int i = 0; i < s.batches(); ++i) {
    auto batch = s.batch(i);
    y += sampling_adjoint_apply(basis, dual, batch, q_rec);
    // literal (P_T - P_T R*_i P_T) Q: the outer projection keeps the
    // iterate in T, so the contraction stays relative in magnitude
    q_rec = ts.project_T(q_rec - sampling_adjoint_apply(basis, dual, batch,
                                                        ts.project_T(q_rec)));
    q_direct = sgn - ts.project_T(y);
    report.recursion_residual =
        std::max(report.recursion_residual, (q_direct - q_rec).norm());
    report.q_norms.push_back(q_rec.norm());
    report.q_norms_direct.push_back(q_direct.norm());
    report.eta_trace.push_back(eta_max(q_rec, dual));
  }
  report.Y = y;

  const GramSpectrum& sp = dual.spectrum();
  report.cond1_lhs = (ts.project_T(y) - sgn).norm();
  report.cond1_rhs = 0.25 * std::sqrt(1.0 / (2.0 * L)) * sp.lambda_min_Hinv /
                     sp.lambda_max_Hinv;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(ts.project_Tperp(y));
  report.cond2_lhs = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  report.cond1 = report.cond1_lhs <= report.cond1_rhs;
  report.cond2 = report.cond2_lhs <= 0.5;
  report.verdict = report.cond1 && report.cond2;

  report.ptfpt_lambda_min = ptfpt_min_eig(ts, basis, s.all());
  report.half_lambda_min_H = 0.5 * sp.lambda_min_H;
  report.lambda_min_ok = report.ptfpt_lambda_min > report.half_lambda_min_H;

  const double mu = correlation_parameter(basis).mu;
  report.t2 = 0.5;
  report.t3 = std::min((mu + 1.0) * sp.hinv_inf_norm, 0.25) /
              std::sqrt(static_cast<double>(r));
  return report;
}

CertificateVerdict verify_dual_certificate(const CertificateReport& report,
                                           const DualBasisData& dual, int L) {
  CertificateVerdict verdict;
  const GramSpectrum& sp = dual.spectrum();
  verdict.cond1_lhs = report.cond1_lhs;
  verdict.cond1_rhs = 0.25 * std::sqrt(1.0 / (2.0 * L)) * sp.lambda_min_Hinv /
                      sp.lambda_max_Hinv;
  verdict.cond2_lhs = report.cond2_lhs;
  verdict.cond1 = verdict.cond1_lhs <= verdict.cond1_rhs;
  verdict.cond2 = verdict.cond2_lhs <= 0.5;
  verdict.ok = verdict.cond1 && verdict.cond2;
  return verdict;
}

}  // namespace gmc
