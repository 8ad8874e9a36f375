#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "gmc/errors.hpp"

namespace gmc {

enum class BasisFamily { entry, edg, hankel, rank_one, weighted, custom };

std::string to_string(BasisFamily family);
BasisFamily family_from_string(const std::string& name);

/// Linear/conic constraints that cut out the feasible set alongside the
/// span of the basis. PSD is conic and handled separately by the solver;
/// the two linear flags are metadata checked by validate_basis.
struct SubspaceFlags {
  bool symmetric = false;
  bool row_sum_zero = false;
  bool psd_cone = false;
};

/// A family of L unit-Frobenius-norm rows x cols matrices, stored as
/// column-major vectorizations in the columns of W (one column per
/// element). Vectorization order is column-major throughout the library.
class BasisSet {
 public:
  BasisSet(int rows, int cols, BasisFamily family, Eigen::MatrixXd w,
           SubspaceFlags flags, std::vector<double> weight_scales = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  /// Side length for square bases; most of the recovery theory is stated
  /// for square matrices.
  int n() const;

  int L() const { return static_cast<int>(W_.cols()); }
  BasisFamily family() const { return family_; }
  const Eigen::MatrixXd& W() const { return W_; }
  Eigen::MatrixXd element(int alpha) const;
  const SubspaceFlags& flags() const { return flags_; }

  /// Per-element renormalization factors recorded by make_weighted_basis;
  /// empty for other families.
  const std::vector<double>& weight_scales() const { return weight_scales_; }

  bool spans_proper_subspace() const {
    return L() < rows_ * cols_;
  }

 private:
  int rows_, cols_;
  BasisFamily family_;
  Eigen::MatrixXd W_;  // (rows*cols) x L
  SubspaceFlags flags_;
  std::vector<double> weight_scales_;
};

/// The n^2 matrices e_{i,j}; orthonormal and complete.
BasisSet make_entry_basis(int n);

/// w_{(a,b)} = (e_aa + e_bb - e_ab - e_ba)/2 over pairs a < b, enumerated
/// lexicographically. Spans the symmetric matrices with zero row sums.
BasisSet make_edg_basis(int n);

/// Unit-norm indicators of the anti-diagonals i + j = alpha + 1 of an
/// n1 x n2 matrix; L = n1 + n2 - 1, orthonormal.
BasisSet make_hankel_basis(int n1, int n2);

/// W_alpha = v_alpha v_alpha^T / ||v_alpha||^2 for the given vectors.
BasisSet make_rank_one_basis(const std::vector<Eigen::VectorXd>& vectors);

/// Family {D^{-1} w_alpha} renormalized to unit Frobenius norm, D the
/// positive diagonal given by `weights`. The renormalization factors
/// ||D^{-1} w_alpha||_F are recorded so measurements of the weighted
/// ground matrix D*M stay consistent with measurements of M.
BasisSet make_weighted_basis(const Eigen::VectorXd& weights,
                             const BasisSet& base);

BasisSet make_custom_basis(int rows, int cols, Eigen::MatrixXd w,
                           SubspaceFlags flags);

struct BasisValidation {
  double max_norm_deviation = 0.0;  // max_alpha | ||w_alpha||_F - 1 |
  int rank = 0;
  bool full_rank = false;
  double max_symmetry_residual = 0.0;
  double max_row_sum_residual = 0.0;
  double min_eigenvalue = 0.0;  // over elements, when psd flag declared
  bool constraints_ok = true;
};

/// Reports on the invariants of a basis set; never throws.
BasisValidation validate_basis(const BasisSet& basis);

/// Textual round-trip format for square bases: header "n L family",
/// then L lines of n^2 space-separated full-precision decimals.
void save_basis(const BasisSet& basis, std::ostream& out);
void save_basis(const BasisSet& basis, const std::string& path);
BasisSet load_basis(std::istream& in);
BasisSet load_basis(const std::string& path);

}  // namespace gmc
