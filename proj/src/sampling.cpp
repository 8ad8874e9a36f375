#include "gmc/sampling.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "gmc/rng.hpp"

namespace gmc {

std::span<const std::int32_t> SampleSet::batch(int i) const {
  if (i < 0 || i >= batches()) throw PartitionError("batch index out of range");
  std::size_t offset = 0;
  for (int k = 0; k < i; ++k) offset += static_cast<std::size_t>(batch_sizes[k]);
  return {indices.data() + offset, static_cast<std::size_t>(batch_sizes[i])};
}

int SampleSet::distinct_count() const {
  std::vector<char> seen(L, 0);
  int distinct = 0;
  for (std::int32_t idx : indices)
    if (!seen[idx]) {
      seen[idx] = 1;
      ++distinct;
    }
  return distinct;
}

int SampleSet::max_multiplicity() const {
  std::vector<int> counts(L, 0);
  int best = 0;
  for (std::int32_t idx : indices) best = std::max(best, ++counts[idx]);
  return best;
}

SampleSet draw_omega(int L, long long m, std::uint64_t seed) {
  if (L < 1) throw InvalidInputError("index range must be positive");
  if (m < 1) throw EmptySampleError("at least one draw is required");
  SampleSet s;
  s.L = L;
  s.seed = seed;
  s.indices.resize(static_cast<std::size_t>(m));
  CounterRng rng(seed);
  for (auto& idx : s.indices)
    idx = static_cast<std::int32_t>(rng.uniform_index(static_cast<std::uint64_t>(L)));
  return s;
}

SampleSet partition_omega(SampleSet s, int l, const std::vector<int>& sizes) {
  if (l < 1) throw PartitionError("batch count must be positive");
  const long long m = s.m();
  if (!sizes.empty()) {
    if (static_cast<int>(sizes.size()) != l)
      throw PartitionError("explicit sizes must provide one entry per batch");
    long long total = 0;
    for (int v : sizes) {
      if (v < 0) throw PartitionError("batch sizes must be nonnegative");
      total += v;
    }
    if (total != m) throw PartitionError("batch sizes must sum to m");
    s.batch_sizes = sizes;
    return s;
  }
  if (l > m) throw PartitionError("more batches than samples");
  const long long base = m / l;
  const long long extra = m % l;
  s.batch_sizes.resize(l);
  for (int i = 0; i < l; ++i)
    s.batch_sizes[i] = static_cast<int>(base + (i < extra ? 1 : 0));
  return s;
}

Eigen::VectorXd index_counts(std::span<const std::int32_t> omega, int L) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(L);
  for (std::int32_t idx : omega) counts[idx] += 1.0;
  return counts;
}

namespace {

void check_window(std::span<const std::int32_t> omega) {
  if (omega.empty()) throw EmptySampleError("sample window is empty");
}

/// (L/m) * emit * diag(counts) * read^T * vec(X), shared by all three
/// operators: `read` supplies the analysis elements, `emit` the synthesis
/// elements. Cost O(m + L n^2) independent of multiplicities.
Eigen::MatrixXd weighted_frame_sum(const Eigen::MatrixXd& read,
                                   const Eigen::MatrixXd& emit, int L,
                                   std::span<const std::int32_t> omega,
                                   const Eigen::MatrixXd& x, int rows, int cols) {
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
  Eigen::VectorXd coeffs = read.transpose() * xv;
  Eigen::VectorXd counts = index_counts(omega, L);
  coeffs.array() *= counts.array();
  const double scale = static_cast<double>(L) / static_cast<double>(omega.size());
  Eigen::VectorXd out = scale * (emit * coeffs);
  return Eigen::Map<const Eigen::MatrixXd>(out.data(), rows, cols);
}

}  // namespace

Eigen::MatrixXd sampling_apply(const BasisSet& basis, const DualBasisData& dual,
                               std::span<const std::int32_t> omega,
                               const Eigen::MatrixXd& x) {
  check_window(omega);
  if (x.rows() != basis.rows() || x.cols() != basis.cols())
    throw InvalidDimensionError("matrix shape does not match the basis");
  return weighted_frame_sum(basis.W(), dual.Z(), basis.L(), omega, x, basis.rows(),
                            basis.cols());
}

Eigen::MatrixXd sampling_adjoint_apply(const BasisSet& basis,
                                       const DualBasisData& dual,
                                       std::span<const std::int32_t> omega,
                                       const Eigen::MatrixXd& x) {
  check_window(omega);
  if (x.rows() != basis.rows() || x.cols() != basis.cols())
    throw InvalidDimensionError("matrix shape does not match the basis");
  return weighted_frame_sum(dual.Z(), basis.W(), basis.L(), omega, x, basis.rows(),
                            basis.cols());
}

Eigen::MatrixXd frame_apply(const BasisSet& basis,
                            std::span<const std::int32_t> omega,
                            const Eigen::MatrixXd& x) {
  check_window(omega);
  if (x.rows() != basis.rows() || x.cols() != basis.cols())
    throw InvalidDimensionError("matrix shape does not match the basis");
  return weighted_frame_sum(basis.W(), basis.W(), basis.L(), omega, x, basis.rows(),
                            basis.cols());
}

double ptfpt_min_eig(const TangentSpace& ts, const BasisSet& basis,
                     std::span<const std::int32_t> omega, int dim_cap) {
  check_window(omega);
  if (ts.rows() != basis.rows() || ts.cols() != basis.cols())
    throw InvalidDimensionError("tangent space shape does not match the basis");
  if (ts.dim_T() > dim_cap)
    throw DimensionCapError("dim T = " + std::to_string(ts.dim_T()) +
                            " exceeds the cap " + std::to_string(dim_cap));

  Eigen::MatrixXd t_basis = tangent_orthobasis(ts);
  if (basis.spans_proper_subspace()) {
    // principal vectors at angle 0 between T and span(W)
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.W());
    Eigen::MatrixXd q_span =
        qr.householderQ() * Eigen::MatrixXd::Identity(basis.W().rows(), basis.L());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(t_basis.transpose() * q_span,
                                       Eigen::ComputeThinU);
    int keep = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) >= 1.0 - 1e-8) ++keep;
    if (keep == 0) return 0.0;
    t_basis = t_basis * svd.matrixU().leftCols(keep);
  }

  Eigen::MatrixXd inner = t_basis.transpose() * basis.W();  // d x L
  Eigen::VectorXd counts = index_counts(omega, basis.L());
  const double scale = static_cast<double>(basis.L()) / static_cast<double>(omega.size());
  Eigen::MatrixXd gram =
      scale * inner * counts.asDiagonal() * inner.transpose();
  gram = 0.5 * (gram + gram.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  return eig.eigenvalues().minCoeff();
}

void save_sample_set(const SampleSet& s, std::ostream& out) {
  out << s.seed << ' ' << s.m() << ' ' << s.batches() << '\n';
  if (s.batches() > 0) {
    for (int i = 0; i < s.batches(); ++i) {
      if (i) out << ' ';
      out << s.batch_sizes[i];
    }
    out << '\n';
  }
  for (std::size_t k = 0; k < s.indices.size(); ++k) {
    if (k) out << (k % 16 == 0 ? '\n' : ' ');
    out << s.indices[k] + 1;  // 1-based on disk
  }
  out << '\n';
}

SampleSet load_sample_set(std::istream& in) {
  SampleSet s;
  long long m = 0;
  int l = 0;
  if (!(in >> s.seed >> m >> l)) throw IoError("malformed sample-set header");
  if (m < 1) throw IoError("sample set must be nonempty");
  if (l > 0) {
    s.batch_sizes.resize(l);
    long long total = 0;
    for (int i = 0; i < l; ++i) {
      if (!(in >> s.batch_sizes[i])) throw IoError("sample-set batch sizes truncated");
      total += s.batch_sizes[i];
    }
    if (total != m) throw IoError("sample-set batch sizes do not sum to m");
  }
  s.indices.resize(static_cast<std::size_t>(m));
  std::int32_t max_index = 0;
  for (auto& idx : s.indices) {
    long long value = 0;
    if (!(in >> value)) throw IoError("sample-set index list truncated");
    if (value < 1) throw IoError("sample-set indices must be >= 1");
    idx = static_cast<std::int32_t>(value - 1);
    max_index = std::max(max_index, idx);
  }
  s.L = max_index + 1;
  return s;
}

}  // namespace gmc
