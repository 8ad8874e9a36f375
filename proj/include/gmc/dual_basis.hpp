#pragma once

#include <Eigen/Dense>
#include <string>

#include "gmc/basis.hpp"

namespace gmc {

/// Spectral constants of the Gram matrix consumed by the sample-complexity
/// and failure-probability calculators.
struct GramSpectrum {
  double lambda_min_H = 0.0;
  double lambda_max_H = 0.0;
  double lambda_min_Hinv = 0.0;
  double lambda_max_Hinv = 0.0;
  double hinv_inf_norm = 0.0;  // max absolute row sum of H^{-1}
  double c_v = 0.0;            // >= lambda_max(H^{-1}) * ||H^{-1}||_inf
};

/// Gram matrix H = W^T W, its inverse, and the dual set Z = W H^{-1}
/// satisfying <z_alpha, w_beta> = delta_{alpha,beta}.
class DualBasisData {
 public:
  DualBasisData(Eigen::MatrixXd h, Eigen::MatrixXd h_inv, Eigen::MatrixXd z,
                GramSpectrum spectrum, double condition_number)
      : H_(std::move(h)),
        H_inv_(std::move(h_inv)),
        Z_(std::move(z)),
        spectrum_(spectrum),
        condition_number_(condition_number) {}

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::MatrixXd& H_inv() const { return H_inv_; }
  const Eigen::MatrixXd& Z() const { return Z_; }  // (rows*cols) x L
  int L() const { return static_cast<int>(H_.rows()); }
  const GramSpectrum& spectrum() const { return spectrum_; }
  double condition_number() const { return condition_number_; }

  /// Override c_v; the default is the smallest admissible value
  /// lambda_max(H^{-1}) * ||H^{-1}||_inf.
  void set_c_v(double c_v) { spectrum_.c_v = c_v; }

 private:
  Eigen::MatrixXd H_, H_inv_, Z_;
  GramSpectrum spectrum_;
  double condition_number_;
};

/// H_{alpha,beta} = <w_alpha, w_beta>; refuses L > 20000 (dense storage).
Eigen::MatrixXd gram_matrix(const BasisSet& basis);

/// Builds the dual set. Throws SingularBasisError naming the condition
/// number when cond(H) exceeds `condition_guard`.
DualBasisData dual_set(const BasisSet& basis, double condition_guard = 1e12);

/// Recomputes the spectral summary from the stored H and H^{-1}.
GramSpectrum gram_spectrum(const DualBasisData& dual);

/// max_{alpha,beta} |<z_alpha, w_beta> - delta_{alpha,beta}|.
double biorthogonality_residual(const DualBasisData& dual, const BasisSet& basis);

/// Flat key=value block for experiment CSV metadata.
std::string spectrum_to_kv(const GramSpectrum& spectrum);

/// Comparison of the observed lambda_min(H^{-1}) for the pair basis
/// against the 1/(8n) figure quoted from prior analyses. Logged, never
/// asserted: the quoted figure behaves as a lower bound in practice.
struct EdgSpectrumCheck {
  double observed = 0.0;
  double reference = 0.0;  // 1/(8n)
  double ratio = 0.0;
  bool within_factor_two = false;
};
EdgSpectrumCheck edg_lambda_min_reference(const GramSpectrum& spectrum, int n);

}  // namespace gmc
