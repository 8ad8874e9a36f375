#include "gmc/dual_basis.hpp"

#include <cmath>
#include <sstream>

namespace gmc {

namespace {
constexpr int kMaxDenseL = 20000;

void check_memory_guard(int L) {
  if (L > kMaxDenseL)
    throw MemoryGuardError("dense Gram matrix refused for L = " + std::to_string(L) +
                           " > " + std::to_string(kMaxDenseL));
}
}  // namespace

Eigen::MatrixXd gram_matrix(const BasisSet& basis) {
  check_memory_guard(basis.L());
  Eigen::MatrixXd h = basis.W().transpose() * basis.W();
  h = 0.5 * (h + h.transpose());
  return h;
}

DualBasisData dual_set(const BasisSet& basis, double condition_guard) {
  check_memory_guard(basis.L());
  Eigen::MatrixXd h = gram_matrix(basis);
  const int L = basis.L();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  const double cond = lambda_min > 0.0
                          ? lambda_max / lambda_min
                          : std::numeric_limits<double>::infinity();
  if (!(cond <= condition_guard)) {
    std::ostringstream msg;
    msg << "Gram matrix is singular or near-singular: condition number " << cond
        << " exceeds guard " << condition_guard;
    throw SingularBasisError(msg.str());
  }

  Eigen::MatrixXd h_inv;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() == Eigen::Success) {
    h_inv = llt.solve(Eigen::MatrixXd::Identity(L, L));
  } else {
    // eigenvalue floor keeps ill-conditioned custom bases diagnosable
    Eigen::VectorXd floored =
        eig.eigenvalues().cwiseMax(lambda_max / condition_guard);
    h_inv = eig.eigenvectors() * floored.cwiseInverse().asDiagonal() *
            eig.eigenvectors().transpose();
  }
  h_inv = 0.5 * (h_inv + h_inv.transpose());

  Eigen::MatrixXd z = basis.W() * h_inv;

  GramSpectrum spectrum;
  spectrum.lambda_min_H = lambda_min;
  spectrum.lambda_max_H = lambda_max;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_inv(h_inv);
  spectrum.lambda_min_Hinv = eig_inv.eigenvalues().minCoeff();
  spectrum.lambda_max_Hinv = eig_inv.eigenvalues().maxCoeff();
  spectrum.hinv_inf_norm = h_inv.cwiseAbs().rowwise().sum().maxCoeff();
  spectrum.c_v = spectrum.lambda_max_Hinv * spectrum.hinv_inf_norm;

  return DualBasisData(std::move(h), std::move(h_inv), std::move(z), spectrum, cond);
}

GramSpectrum gram_spectrum(const DualBasisData& dual) {
  GramSpectrum spectrum;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dual.H());
  spectrum.lambda_min_H = eig.eigenvalues().minCoeff();
  spectrum.lambda_max_H = eig.eigenvalues().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_inv(dual.H_inv());
  spectrum.lambda_min_Hinv = eig_inv.eigenvalues().minCoeff();
  spectrum.lambda_max_Hinv = eig_inv.eigenvalues().maxCoeff();
  spectrum.hinv_inf_norm = dual.H_inv().cwiseAbs().rowwise().sum().maxCoeff();
  spectrum.c_v = dual.spectrum().c_v > 0.0
                     ? dual.spectrum().c_v
                     : spectrum.lambda_max_Hinv * spectrum.hinv_inf_norm;
  return spectrum;
}

double biorthogonality_residual(const DualBasisData& dual, const BasisSet& basis) {
  Eigen::MatrixXd cross = dual.Z().transpose() * basis.W();
  cross -= Eigen::MatrixXd::Identity(cross.rows(), cross.cols());
  return cross.cwiseAbs().maxCoeff();
}

std::string spectrum_to_kv(const GramSpectrum& spectrum) {
  std::ostringstream out;
  out.precision(17);
  out << "lambda_min_H=" << spectrum.lambda_min_H
      << " lambda_max_H=" << spectrum.lambda_max_H
      << " lambda_min_Hinv=" << spectrum.lambda_min_Hinv
      << " lambda_max_Hinv=" << spectrum.lambda_max_Hinv
      << " hinv_inf_norm=" << spectrum.hinv_inf_norm
      << " c_v=" << spectrum.c_v;
  return out.str();
}

EdgSpectrumCheck edg_lambda_min_reference(const GramSpectrum& spectrum, int n) {
  EdgSpectrumCheck check;
  check.observed = spectrum.lambda_min_Hinv;
  check.reference = 1.0 / (8.0 * n);
  check.ratio = check.observed / check.reference;
  check.within_factor_two = check.ratio >= 0.5 && check.ratio <= 2.0;
  return check;
}

}  // namespace gmc
