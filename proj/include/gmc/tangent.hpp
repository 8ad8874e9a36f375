#pragma once

#include <Eigen/Dense>

#include "gmc/errors.hpp"

namespace gmc {

/// Tangent space of the rank-r matrices at M, spanned by
/// {U Theta^T + Theta V^T}. U and V carry the leading singular vectors;
/// P_T and Sgn M are invariant under their sign ambiguity.
class TangentSpace {
 public:
  TangentSpace(Eigen::MatrixXd u, Eigen::MatrixXd v);

  int rows() const { return static_cast<int>(U_.rows()); }
  int cols() const { return static_cast<int>(V_.rows()); }
  int rank() const { return static_cast<int>(U_.cols()); }
  int dim_T() const {
    const int r = rank();
    return r * (rows() + cols()) - r * r;
  }

  const Eigen::MatrixXd& U() const { return U_; }
  const Eigen::MatrixXd& V() const { return V_; }

  /// P_T X = P_U X + X P_V - P_U X P_V.
  Eigen::MatrixXd project_T(const Eigen::MatrixXd& x) const;

  /// P_{T^perp} X = X - P_T X = P_{U^perp} X P_{V^perp}.
  Eigen::MatrixXd project_Tperp(const Eigen::MatrixXd& x) const;

 private:
  Eigen::MatrixXd U_, V_;  // orthonormal columns, rows x r and cols x r
};

/// Rank detected as the number of singular values above
/// rank_tol * sigma_max.
TangentSpace tangent_space_of(const Eigen::MatrixXd& m, double rank_tol = 1e-9);

/// Explicit-rank variant for callers that know r.
TangentSpace tangent_space_of_rank(const Eigen::MatrixXd& m, int r);

/// Sgn M = U V^T over the retained rank; ||Sgn M||_F^2 = r.
Eigen::MatrixXd sign_matrix(const Eigen::MatrixXd& m, double rank_tol = 1e-9);

/// Orthonormal basis of T as vectorized columns: {u_i v_j^T} together
/// with {u_i q_k^T} and {p_k v_j^T} where p, q complete U, V to
/// orthonormal bases of the ambient sides. Deterministic.
Eigen::MatrixXd tangent_orthobasis(const TangentSpace& ts);

}  // namespace gmc
