#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gmc/basis.hpp"
#include "gmc/dual_basis.hpp"
#include "gmc/tangent.hpp"

namespace gmc {

/// Correlation parameter: operator-norm distance of the frame sums
/// (1/n) sum_a w_a^T w_a and (1/n) sum_a w_a w_a^T from the identity.
/// For rectangular bases each side is normalized by the opposite
/// dimension, which reduces to 1/n in the square case.
struct CorrelationReport {
  double mu = 0.0;
  double lambda_max_wtw = 0.0;  // of sum_a w_a^T w_a
  double lambda_max_wwt = 0.0;  // of sum_a w_a w_a^T
  bool lambda_bound_holds = false;  // lambda_max <= (mu+1) * n
};
CorrelationReport correlation_parameter(const BasisSet& basis);

struct SimplifiedCoherenceCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double slack() const { return rhs - lhs; }
};

/// Coherence of a rank-r matrix with respect to a basis and its dual.
/// nu is the smallest value satisfying all three defining conditions;
/// the simplified checks are the derived closed-form bounds evaluated
/// at that nu.
struct CoherenceProfile {
  double nu_w = 0.0;      // max_a (n/r)      sum_b <P_T w_a, w_b>^2
  double nu_z = 0.0;      // max_a (n/(c_v r)) sum_b <P_T z_a, w_b>^2
  double nu_joint = 0.0;  // max_a (n^2/r)    <w_a, U V^T>^2
  double nu = 0.0;        // max of the three
  int rank = 0;
  SimplifiedCoherenceCheck simplified_w;      // ||P_T w_a||_F^2 bound
  SimplifiedCoherenceCheck simplified_z;      // ||P_T z_a||_F^2 bound
  SimplifiedCoherenceCheck simplified_joint;  // <z_a, U V^T>^2 bound
};
CoherenceProfile coherence_profile(const Eigen::MatrixXd& m, const BasisSet& basis,
                                   const DualBasisData& dual,
                                   double rank_tol = 1e-9);

/// C = max(lambda_max(H^{-1}) ||H^{-1}||_inf, c_v,
///         (mu+1) ||H^{-1}||_inf / min((mu+1)||H^{-1}||_inf, 1/4)^2).
/// The variant flag swaps the first argument for lambda_max(H^{-1})^3.
double theorem_constant_C(const GramSpectrum& spectrum, double mu,
                          bool theorem_statement_variant = false);

struct FailureProbabilities {
  double p1 = 0.0;
  std::vector<double> p2, p3, p4;  // one entry per batch
  double total = 0.0;              // p1 + sum_i (p2 + p3 + p4)
};

/// Closed-form failure probabilities evaluated at actual sample counts.
/// Each value is clamped to <= 1 for reporting.
FailureProbabilities failure_probabilities(int n, int L, int r, double nu,
                                           double mu, const GramSpectrum& spectrum,
                                           long long m,
                                           const std::vector<long long>& m_i);

/// Sample-complexity composition: batch count l, per-batch kappa_i and
/// m_i, the total m, and the closed-form bound value, together with the
/// failure probabilities at that composition.
struct TheoremConstants {
  int n = 0, r = 0, L = 0;
  double beta = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double C = 0.0;
  double l_real = 0.0;
  int l = 0;
  double kappa_i = 0.0;              // 48 (C nu + 1/(n r)) (beta log n + log 4l)
  std::vector<long long> m_i;        // ceil(kappa_i L r / n) per batch
  long long m_total = 0;             // sum of m_i
  double kappa = 0.0;                // m_total * n / (L r)
  double m_bound_real = 0.0;         // closed-form bound value
  long long m_bound = 0;             // rounded up
  GramSpectrum spectrum;
  FailureProbabilities probabilities;  // at (m_total, m_i)
};
TheoremConstants sample_bound(int n, int r, double nu, const GramSpectrum& spectrum,
                              double mu, int L, double beta,
                              bool theorem_statement_variant = false);

}  // namespace gmc
