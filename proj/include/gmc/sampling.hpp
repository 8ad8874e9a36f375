#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gmc/basis.hpp"
#include "gmc/dual_basis.hpp"
#include "gmc/tangent.hpp"

namespace gmc {

/// A multiset of basis indices drawn uniformly with replacement,
/// optionally partitioned into consecutive batches. Indices are 0-based
/// in memory; the textual format is 1-based.
struct SampleSet {
  int L = 0;
  std::uint64_t seed = 0;
  std::vector<std::int32_t> indices;
  std::vector<int> batch_sizes;  // empty until partitioned

  long long m() const { return static_cast<long long>(indices.size()); }
  int batches() const { return static_cast<int>(batch_sizes.size()); }
  std::span<const std::int32_t> all() const { return {indices.data(), indices.size()}; }
  std::span<const std::int32_t> batch(int i) const;

  int distinct_count() const;
  int max_multiplicity() const;
};

/// m i.i.d. uniform draws from {0..L-1}, reproducible from the seed.
SampleSet draw_omega(int L, long long m, std::uint64_t seed);

/// Order-preserving split into l consecutive batches. Default sizes use
/// the largest-first remainder rule; explicit sizes must sum to m.
SampleSet partition_omega(SampleSet s, int l, const std::vector<int>& sizes = {});

/// Multiplicity of each index in the window, as a dense length-L vector.
Eigen::VectorXd index_counts(std::span<const std::int32_t> omega, int L);

/// R_Omega X = (L/m) sum_{a in Omega} <X, w_a> z_a, multiplicities kept.
Eigen::MatrixXd sampling_apply(const BasisSet& basis, const DualBasisData& dual,
                               std::span<const std::int32_t> omega,
                               const Eigen::MatrixXd& x);

/// R*_Omega X = (L/m) sum_{a in Omega} <X, z_a> w_a.
Eigen::MatrixXd sampling_adjoint_apply(const BasisSet& basis,
                                       const DualBasisData& dual,
                                       std::span<const std::int32_t> omega,
                                       const Eigen::MatrixXd& x);

/// Restricted frame operator F X = (L/m) sum_{a in Omega} <X, w_a> w_a;
/// self-adjoint and positive semidefinite.
Eigen::MatrixXd frame_apply(const BasisSet& basis,
                            std::span<const std::int32_t> omega,
                            const Eigen::MatrixXd& x);

/// Minimum eigenvalue of P_T F P_T restricted to where it can act:
/// the span of an orthonormal basis of T, intersected with span(W) when
/// the basis spans a proper subspace (the frame operator is identically
/// zero on the orthogonal complement of span(W), so without the
/// intersection the minimum is trivially 0 for subspace bases).
double ptfpt_min_eig(const TangentSpace& ts, const BasisSet& basis,
                     std::span<const std::int32_t> omega, int dim_cap = 4000);

/// Textual format: header "seed m l", batch sizes when l > 0, then the
/// 1-based index list.
void save_sample_set(const SampleSet& s, std::ostream& out);
SampleSet load_sample_set(std::istream& in);

}  // namespace gmc
