#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gmc/basis.hpp"
#include "gmc/dual_basis.hpp"
#include "gmc/sampling.hpp"

namespace gmc {

struct SolverConfig {
  double feas_tol = 1e-8;
  double rel_change_tol = 1e-10;
  int max_iter = 5000;
  double rho = 1.0;           // consensus penalty
  bool adaptive_rho = true;   // residual-balancing updates
  double rank_tol = 1e-9;
};

/// Nuclear-norm minimization data: coefficients b_alpha = <M, w_alpha>
/// aligned one-to-one with samples.indices (duplicates carry equal b).
/// noise_level = 0 selects the equality-constrained program.
struct CompletionProblem {
  const BasisSet* basis = nullptr;
  const DualBasisData* dual = nullptr;
  SampleSet samples;
  Eigen::VectorXd measurements;
  double noise_level = 0.0;
  std::optional<Eigen::MatrixXd> truth;  // enables rel_err reporting
};

struct RecoveryReport {
  Eigen::MatrixXd X_hat;
  std::optional<double> rel_err_vs_truth;
  double constraint_residual = 0.0;  // max_a |<X,w_a> - b_a|, or delta slack
  double objective = 0.0;            // ||X_hat||_*
  int iterations = 0;
  bool converged = false;
  bool rank_deficient_constraints = false;
  bool undersampled = false;          // distinct measurements < dim T(X_hat)
  std::vector<double> merit_trace;    // fixed-point residual per iteration
};

/// Exact program: minimize ||X||_* subject to <X, w_a> = b_a over the
/// span of the basis (plus the PSD cone when declared). Operator
/// splitting: singular-value soft-thresholding alternating with
/// projection onto the affine constraint set, consensus-averaged.
RecoveryReport solve_exact(const CompletionProblem& problem,
                           const SolverConfig& config = {});

/// Noisy relaxation: ||R_Omega(X) - R_Omega(M)||_F <= noise_level.
/// Delegates to solve_exact when noise_level == 0.
RecoveryReport solve_noisy(const CompletionProblem& problem,
                           const SolverConfig& config = {});

/// Proximal operator of tau ||.||_*: soft-threshold the singular values.
Eigen::MatrixXd svt_prox(const Eigen::MatrixXd& x, double tau);

/// Gathered coefficients <M, w_a> for a in omega.
Eigen::VectorXd measure(const BasisSet& basis, const Eigen::MatrixXd& m,
                        std::span<const std::int32_t> omega);

}  // namespace gmc
