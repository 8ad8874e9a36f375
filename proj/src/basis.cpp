#include "gmc/basis.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace gmc {

std::string to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::entry: return "entry";
    case BasisFamily::edg: return "edg";
    case BasisFamily::hankel: return "hankel";
    case BasisFamily::rank_one: return "rank_one";
    case BasisFamily::weighted: return "weighted";
    case BasisFamily::custom: return "custom";
  }
  return "custom";
}

BasisFamily family_from_string(const std::string& name) {
  if (name == "entry") return BasisFamily::entry;
  if (name == "edg") return BasisFamily::edg;
  if (name == "hankel") return BasisFamily::hankel;
  if (name == "rank_one") return BasisFamily::rank_one;
  if (name == "weighted") return BasisFamily::weighted;
  if (name == "custom") return BasisFamily::custom;
  throw InvalidInputError("unknown basis family: " + name);
}

BasisSet::BasisSet(int rows, int cols, BasisFamily family, Eigen::MatrixXd w,
                   SubspaceFlags flags, std::vector<double> weight_scales)
    : rows_(rows),
      cols_(cols),
      family_(family),
      W_(std::move(w)),
      flags_(flags),
      weight_scales_(std::move(weight_scales)) {
  if (rows_ < 1 || cols_ < 1)
    throw InvalidDimensionError("basis shape must be positive");
  if (W_.rows() != static_cast<Eigen::Index>(rows_) * cols_)
    throw InvalidDimensionError("vectorized element length does not match shape");
  if (W_.cols() < 1) throw InvalidInputError("basis must contain at least one element");
  if (W_.cols() > W_.rows())
    throw InvalidInputError("more elements than the ambient dimension allows");
}

int BasisSet::n() const {
  if (!square())
    throw InvalidDimensionError("square side requested for a rectangular basis");
  return rows_;
}

Eigen::MatrixXd BasisSet::element(int alpha) const {
  return Eigen::Map<const Eigen::MatrixXd>(W_.col(alpha).data(), rows_, cols_);
}

BasisSet make_entry_basis(int n) {
  if (n < 1) throw InvalidDimensionError("entry basis needs n >= 1");
  const int nn = n * n;
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(nn, nn);
  return BasisSet(n, n, BasisFamily::entry, std::move(w), SubspaceFlags{});
}

BasisSet make_edg_basis(int n) {
  if (n < 2) throw InvalidDimensionError("pair basis needs n >= 2");
  const int L = n * (n - 1) / 2;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n * n, L);
  int col = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b, ++col) {
      // column-major vec: entry (i,j) lives at j*n + i
      w(a * n + a, col) = 0.5;
      w(b * n + b, col) = 0.5;
      w(b * n + a, col) = -0.5;
      w(a * n + b, col) = -0.5;
    }
  }
  SubspaceFlags flags;
  flags.symmetric = true;
  flags.row_sum_zero = true;
  flags.psd_cone = true;
  return BasisSet(n, n, BasisFamily::edg, std::move(w), flags);
}

BasisSet make_hankel_basis(int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw InvalidDimensionError("hankel basis needs n1, n2 >= 1");
  const int L = n1 + n2 - 1;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n1) * n2, L);
  for (int a = 0; a < L; ++a) {
    int count = 0;
    for (int i = 0; i < n1; ++i) {
      const int j = a - i;
      if (j >= 0 && j < n2) ++count;
    }
    const double value = 1.0 / std::sqrt(static_cast<double>(count));
    for (int i = 0; i < n1; ++i) {
      const int j = a - i;
      if (j >= 0 && j < n2) w(static_cast<Eigen::Index>(j) * n1 + i, a) = value;
    }
  }
  return BasisSet(n1, n2, BasisFamily::hankel, std::move(w), SubspaceFlags{});
}

BasisSet make_rank_one_basis(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) throw InvalidInputError("rank-one basis needs at least one vector");
  const Eigen::Index n = vectors.front().size();
  const int L = static_cast<int>(vectors.size());
  Eigen::MatrixXd w(n * n, L);
  for (int a = 0; a < L; ++a) {
    const Eigen::VectorXd& v = vectors[a];
    if (v.size() != n) throw InvalidDimensionError("rank-one vectors must share a length");
    const double norm2 = v.squaredNorm();
    if (norm2 <= 0.0) throw InvalidInputError("rank-one basis vector is zero");
    Eigen::MatrixXd outer = (v * v.transpose()) / norm2;  // unit Frobenius norm
    w.col(a) = Eigen::Map<const Eigen::VectorXd>(outer.data(), n * n);
  }
  // reject linearly dependent families up front
  Eigen::MatrixXd gram = w.transpose() * w;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.eigenvalues().minCoeff() < 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()))
    throw SingularBasisError("rank-one family is linearly dependent");
  SubspaceFlags flags;
  flags.symmetric = true;
  flags.psd_cone = true;
  return BasisSet(static_cast<int>(n), static_cast<int>(n), BasisFamily::rank_one,
                  std::move(w), flags);
}

BasisSet make_weighted_basis(const Eigen::VectorXd& weights, const BasisSet& base) {
  if (weights.size() != base.rows())
    throw InvalidDimensionError("weight vector length must match the matrix side");
  if (!base.square())
    throw InvalidDimensionError("weighted families are defined for square bases");
  if ((weights.array() <= 0.0).any())
    throw InvalidWeightsError("diagonal weights must be strictly positive");
  const int n = base.rows();
  const int L = base.L();
  Eigen::VectorXd inv = weights.cwiseInverse();
  Eigen::MatrixXd w(base.W().rows(), L);
  std::vector<double> scales(L);
  for (int a = 0; a < L; ++a) {
    Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(base.W().col(a).data(), n, n);
    Eigen::MatrixXd scaled = inv.asDiagonal() * m;  // D^{-1} w_alpha
    const double norm = scaled.norm();
    scales[a] = norm;
    scaled /= norm;
    w.col(a) = Eigen::Map<const Eigen::VectorXd>(scaled.data(), n * n);
  }
  // D^{-1} destroys symmetry/PSD of the elements unless D is scalar, and the
  // weighted program minimizes over Y = D X without a cone constraint.
  return BasisSet(n, n, BasisFamily::weighted, std::move(w), SubspaceFlags{},
                  std::move(scales));
}

BasisSet make_custom_basis(int rows, int cols, Eigen::MatrixXd w, SubspaceFlags flags) {
  return BasisSet(rows, cols, BasisFamily::custom, std::move(w), flags);
}

BasisValidation validate_basis(const BasisSet& basis) {
  BasisValidation report;
  const Eigen::MatrixXd& w = basis.W();
  report.max_norm_deviation = (w.colwise().norm().array() - 1.0).abs().maxCoeff();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w);
  qr.setThreshold(1e-10);
  report.rank = static_cast<int>(qr.rank());
  report.full_rank = report.rank == basis.L();

  const int rows = basis.rows();
  const int cols = basis.cols();
  double min_eig = std::numeric_limits<double>::infinity();
  for (int a = 0; a < basis.L(); ++a) {
    Eigen::MatrixXd m = basis.element(a);
    if (basis.flags().symmetric && rows == cols)
      report.max_symmetry_residual =
          std::max(report.max_symmetry_residual, (m - m.transpose()).norm());
    if (basis.flags().row_sum_zero)
      report.max_row_sum_residual = std::max(
          report.max_row_sum_residual, (m * Eigen::VectorXd::Ones(cols)).norm());
    if (basis.flags().psd_cone && rows == cols) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
      min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }
  }
  if (basis.flags().psd_cone && basis.L() > 0 && rows == cols)
    report.min_eigenvalue = min_eig;
  report.constraints_ok = report.max_symmetry_residual <= 1e-12 &&
                          report.max_row_sum_residual <= 1e-12 &&
                          (!basis.flags().psd_cone || report.min_eigenvalue >= -1e-12);
  return report;
}

void save_basis(const BasisSet& basis, std::ostream& out) {
  if (!basis.square())
    throw IoError("the textual basis format covers square bases only");
  out << basis.n() << ' ' << basis.L() << ' ' << to_string(basis.family()) << '\n';
  out << std::setprecision(17);
  for (int a = 0; a < basis.L(); ++a) {
    for (Eigen::Index k = 0; k < basis.W().rows(); ++k) {
      if (k) out << ' ';
      out << basis.W()(k, a);
    }
    out << '\n';
  }
}

void save_basis(const BasisSet& basis, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  save_basis(basis, out);
}

BasisSet load_basis(std::istream& in) {
  int n = 0, L = 0;
  std::string family_name;
  if (!(in >> n >> L >> family_name))
    throw IoError("malformed basis header; expected 'n L family'");
  if (n < 1 || L < 1) throw IoError("basis header has nonpositive dimensions");
  const BasisFamily family = family_from_string(family_name);
  Eigen::MatrixXd w(static_cast<Eigen::Index>(n) * n, L);
  for (int a = 0; a < L; ++a)
    for (Eigen::Index k = 0; k < w.rows(); ++k)
      if (!(in >> w(k, a))) throw IoError("basis file ended early");
  SubspaceFlags flags;
  if (family == BasisFamily::edg) {
    flags.symmetric = true;
    flags.row_sum_zero = true;
    flags.psd_cone = true;
  } else if (family == BasisFamily::rank_one) {
    flags.symmetric = true;
    flags.psd_cone = true;
  }
  return BasisSet(n, n, family, std::move(w), flags);
}

BasisSet load_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return load_basis(in);
}

}  // namespace gmc
