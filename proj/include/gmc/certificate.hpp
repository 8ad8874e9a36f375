#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gmc/basis.hpp"
#include "gmc/dual_basis.hpp"
#include "gmc/sampling.hpp"

namespace gmc {

/// Audit record of one golfing run. q_norms tracks the recursive residual
/// update Q_i = (P_T - P_T R*_i P_T) Q_{i-1}, which stays accurate in
/// relative terms; q_norms_direct tracks Q_i = Sgn M - P_T Y_i, whose
/// absolute floating-point floor is about 1e-16 * sqrt(r). Both are
/// reported and their agreement is cross-checked.
struct CertificateReport {
  Eigen::MatrixXd Y;
  std::vector<double> q_norms;         // i = 0..l, recursive sequence
  std::vector<double> q_norms_direct;  // i = 0..l, direct sequence
  std::vector<double> eta_trace;       // eta(Q_i), i = 0..l
  double recursion_residual = 0.0;     // max_i ||Q_i^dir - Q_i^rec||_F

  double cond1_lhs = 0.0;  // ||P_T Y - Sgn M||_F
  double cond1_rhs = 0.0;  // (1/4) sqrt(1/(2L)) lambda_min(Hinv)/lambda_max(Hinv)
  double cond2_lhs = 0.0;  // ||P_{T^perp} Y|| (operator norm, full SVD)
  bool cond1 = false;
  bool cond2 = false;

  double ptfpt_lambda_min = 0.0;
  double half_lambda_min_H = 0.0;
  bool lambda_min_ok = false;

  // per-step thresholds recorded for audit, not enforced
  double t2 = 0.5;
  double t3 = 0.0;  // min((mu+1) ||Hinv||_inf, 1/4) / sqrt(r)

  bool verdict = false;  // cond1 && cond2
};

/// Runs the golfing scheme Q_0 = Sgn M, Y_i = sum_{j<=i} R*_j Q_{j-1},
/// Q_i = Sgn M - P_T Y_i over the batches of `s`.
CertificateReport golfing_build(const Eigen::MatrixXd& m, const BasisSet& basis,
                                const DualBasisData& dual, const SampleSet& s,
                                double rank_tol = 1e-9);

struct CertificateVerdict {
  bool cond1 = false;
  bool cond2 = false;
  bool ok = false;
  double cond1_lhs = 0.0, cond1_rhs = 0.0, cond2_lhs = 0.0;
};

/// Re-evaluates the two dual-certificate conditions from a report.
CertificateVerdict verify_dual_certificate(const CertificateReport& report,
                                           const DualBasisData& dual, int L);

/// eta(X) = max_beta |<X, z_beta>|.
double eta_max(const Eigen::MatrixXd& x, const DualBasisData& dual);

}  // namespace gmc
