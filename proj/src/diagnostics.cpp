#include "gmc/diagnostics.hpp"

#include <cmath>

namespace gmc {

namespace {

double operator_norm_sym(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

CorrelationReport correlation_parameter(const BasisSet& basis) {
  const int n1 = basis.rows();
  const int n2 = basis.cols();
  Eigen::MatrixXd sum_wwt = Eigen::MatrixXd::Zero(n1, n1);
  Eigen::MatrixXd sum_wtw = Eigen::MatrixXd::Zero(n2, n2);
  for (int a = 0; a < basis.L(); ++a) {
    Eigen::Map<const Eigen::MatrixXd> w(basis.W().col(a).data(), n1, n2);
    sum_wwt.noalias() += w * w.transpose();
    sum_wtw.noalias() += w.transpose() * w;
  }
  CorrelationReport report;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_wwt(sum_wwt);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_wtw(sum_wtw);
  report.lambda_max_wwt = eig_wwt.eigenvalues().maxCoeff();
  report.lambda_max_wtw = eig_wtw.eigenvalues().maxCoeff();
  // a complete orthonormal family sums to n2 I on the left and n1 I on
  // the right, so each side is normalized by the opposite dimension
  const double dev_wwt =
      operator_norm_sym(sum_wwt / n2 - Eigen::MatrixXd::Identity(n1, n1));
  const double dev_wtw =
      operator_norm_sym(sum_wtw / n1 - Eigen::MatrixXd::Identity(n2, n2));
  report.mu = std::max(dev_wwt, dev_wtw);
  const double bound = (report.mu + 1.0);
  report.lambda_bound_holds =
      report.lambda_max_wwt <= bound * n2 + 1e-8 &&
      report.lambda_max_wtw <= bound * n1 + 1e-8;
  return report;
}

CoherenceProfile coherence_profile(const Eigen::MatrixXd& m, const BasisSet& basis,
                                   const DualBasisData& dual, double rank_tol) {
  if (!basis.square())
    throw InvalidDimensionError("coherence profile is defined for square bases");
  const int n = basis.n();
  if (m.rows() != n || m.cols() != n)
    throw InvalidDimensionError("matrix shape does not match the basis");
  if (m.norm() == 0.0) throw ZeroMatrixError("coherence of the zero matrix is undefined");

  TangentSpace ts = tangent_space_of(m, rank_tol);
  const int r = ts.rank();
  const int L = basis.L();
  const double c_v = dual.spectrum().c_v;

  // columns of PW / PZ hold P_T applied to each basis / dual element
  Eigen::MatrixXd pw(basis.W().rows(), L);
  Eigen::MatrixXd pz(basis.W().rows(), L);
  for (int a = 0; a < L; ++a) {
    Eigen::Map<const Eigen::MatrixXd> w(basis.W().col(a).data(), n, n);
    Eigen::MatrixXd pt_w = ts.project_T(w);
    pw.col(a) = Eigen::Map<const Eigen::VectorXd>(pt_w.data(), pt_w.size());
    Eigen::Map<const Eigen::MatrixXd> z(dual.Z().col(a).data(), n, n);
    Eigen::MatrixXd pt_z = ts.project_T(z);
    pz.col(a) = Eigen::Map<const Eigen::VectorXd>(pt_z.data(), pt_z.size());
  }

  CoherenceProfile profile;
  profile.rank = r;
  Eigen::VectorXd row_w = (pw.transpose() * basis.W()).rowwise().squaredNorm();
  Eigen::VectorXd row_z = (pz.transpose() * basis.W()).rowwise().squaredNorm();
  profile.nu_w = row_w.maxCoeff() * n / r;
  profile.nu_z = row_z.maxCoeff() * n / (c_v * r);

  Eigen::MatrixXd sgn = ts.U() * ts.V().transpose();
  Eigen::Map<const Eigen::VectorXd> sgn_vec(sgn.data(), sgn.size());
  Eigen::VectorXd joint = basis.W().transpose() * sgn_vec;
  profile.nu_joint =
      joint.cwiseAbs2().maxCoeff() * static_cast<double>(n) * n / r;

  profile.nu = std::max({profile.nu_w, profile.nu_z, profile.nu_joint});

  const GramSpectrum& sp = dual.spectrum();
  const double nu_r_over_n = profile.nu * r / n;
  profile.simplified_w.lhs = pw.colwise().squaredNorm().maxCoeff();
  profile.simplified_w.rhs = sp.lambda_max_Hinv * nu_r_over_n;
  profile.simplified_w.holds = profile.simplified_w.lhs <= profile.simplified_w.rhs + 1e-12;

  profile.simplified_z.lhs = pz.colwise().squaredNorm().maxCoeff();
  profile.simplified_z.rhs =
      sp.hinv_inf_norm * sp.hinv_inf_norm * sp.lambda_max_Hinv * nu_r_over_n;
  profile.simplified_z.holds = profile.simplified_z.lhs <= profile.simplified_z.rhs + 1e-12;

  Eigen::VectorXd joint_z = dual.Z().transpose() * sgn_vec;
  profile.simplified_joint.lhs = joint_z.cwiseAbs2().maxCoeff();
  profile.simplified_joint.rhs =
      sp.hinv_inf_norm * sp.hinv_inf_norm * profile.nu * r / (static_cast<double>(n) * n);
  profile.simplified_joint.holds =
      profile.simplified_joint.lhs <= profile.simplified_joint.rhs + 1e-12;

  return profile;
}

double theorem_constant_C(const GramSpectrum& spectrum, double mu,
                          bool theorem_statement_variant) {
  const double inf = spectrum.hinv_inf_norm;
  const double lmax = spectrum.lambda_max_Hinv;
  const double first =
      theorem_statement_variant ? lmax * lmax * lmax : lmax * inf;
  const double y = (mu + 1.0) * inf;
  const double third = y / std::pow(std::min(y, 0.25), 2);
  return std::max({first, spectrum.c_v, third});
}

FailureProbabilities failure_probabilities(int n, int L, int r, double nu,
                                           double mu, const GramSpectrum& spectrum,
                                           long long m,
                                           const std::vector<long long>& m_i) {
  if (n < 1 || L < 1 || r < 1 || nu <= 0.0)
    throw InvalidInputError("failure probabilities need positive n, L, r, nu");
  FailureProbabilities probs;
  const double lr = static_cast<double>(L) * r;
  const double n_over_lr = n / lr;
  const double kappa = static_cast<double>(m) * n / lr;
  const double lmin_h = spectrum.lambda_min_H;
  const double a = spectrum.lambda_max_Hinv * spectrum.hinv_inf_norm;
  const double inf = spectrum.hinv_inf_norm;
  const double y = (mu + 1.0) * inf;
  const double clipped = std::min(y, 0.25);

  probs.p1 = std::min(1.0, n * std::exp(-lmin_h * lmin_h * kappa / (8.0 * nu)));
  probs.total = probs.p1;
  for (long long mi : m_i) {
    const double kappa_i = static_cast<double>(mi) * n / lr;
    const double p2 =
        std::min(1.0, std::exp(-kappa_i / (32.0 * (a * nu + n_over_lr)) + 0.25));
    const double p3 = std::min(
        1.0, 2.0 * n *
                 std::exp(-3.0 * clipped * clipped * kappa_i /
                          (8.0 * (mu + 1.0) * inf * inf * nu)));
    const double p4 = std::min(
        1.0, static_cast<double>(n) * n *
                 std::exp(-3.0 * kappa_i / (32.0 * (spectrum.c_v * nu + n_over_lr))));
    probs.p2.push_back(p2);
    probs.p3.push_back(p3);
    probs.p4.push_back(p4);
    probs.total += p2 + p3 + p4;
  }
  return probs;
}

TheoremConstants sample_bound(int n, int r, double nu, const GramSpectrum& spectrum,
                              double mu, int L, double beta,
                              bool theorem_statement_variant) {
  if (n < 1 || r < 1 || L < 1) throw InvalidInputError("n, r, L must be positive");
  if (nu <= 0.0) throw InvalidInputError("nu must be positive");
  if (beta <= 1.0) throw InvalidConfidenceError("beta must exceed 1");

  TheoremConstants tc;
  tc.n = n;
  tc.r = r;
  tc.L = L;
  tc.beta = beta;
  tc.mu = mu;
  tc.nu = nu;
  tc.spectrum = spectrum;
  tc.C = theorem_constant_C(spectrum, mu, theorem_statement_variant);

  const double ratio = spectrum.lambda_max_H / spectrum.lambda_min_H;
  tc.l_real = std::log2(4.0 * std::sqrt(2.0 * L) * ratio * std::sqrt(static_cast<double>(r)));
  tc.l = std::max(1, static_cast<int>(std::ceil(tc.l_real)));

  const double log_term_real = beta * std::log(n) + std::log(4.0 * tc.l_real);
  tc.m_bound_real = tc.l_real * n * r * 48.0 *
                    (tc.C * nu + static_cast<double>(n) / (static_cast<double>(L) * r)) *
                    log_term_real;
  tc.m_bound = static_cast<long long>(std::ceil(tc.m_bound_real));

  const double log_term = beta * std::log(n) + std::log(4.0 * tc.l);
  tc.kappa_i = 48.0 * (tc.C * nu + 1.0 / (static_cast<double>(n) * r)) * log_term;
  const long long mi = static_cast<long long>(
      std::ceil(tc.kappa_i * static_cast<double>(L) * r / n));
  tc.m_i.assign(tc.l, std::max<long long>(1, mi));
  tc.m_total = 0;
  for (long long v : tc.m_i) tc.m_total += v;
  tc.kappa = static_cast<double>(tc.m_total) * n / (static_cast<double>(L) * r);
  tc.probabilities =
      failure_probabilities(n, L, r, nu, mu, spectrum, tc.m_total, tc.m_i);
  return tc;
}

}  // namespace gmc
