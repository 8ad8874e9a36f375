#include "gmc/tangent.hpp"

namespace gmc {

namespace {

Eigen::BDCSVD<Eigen::MatrixXd> svd_of(const Eigen::MatrixXd& m) {
  if (m.size() == 0 || m.norm() == 0.0)
    throw ZeroMatrixError("tangent space of the zero matrix is undefined");
  return Eigen::BDCSVD<Eigen::MatrixXd>(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

/// Columns of an orthonormal completion of B (rows x r) to the full space.
Eigen::MatrixXd orthonormal_completion(const Eigen::MatrixXd& b) {
  const Eigen::Index n = b.rows();
  const Eigen::Index r = b.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - r);
}

}  // namespace

TangentSpace::TangentSpace(Eigen::MatrixXd u, Eigen::MatrixXd v)
    : U_(std::move(u)), V_(std::move(v)) {
  if (U_.cols() != V_.cols())
    throw InvalidDimensionError("U and V must have the same rank");
  if (U_.cols() < 1) throw InvalidInputError("rank must be at least 1");
}

Eigen::MatrixXd TangentSpace::project_T(const Eigen::MatrixXd& x) const {
  if (x.rows() != rows() || x.cols() != cols())
    throw InvalidDimensionError("matrix shape does not match the tangent space");
  Eigen::MatrixXd ux = U_ * (U_.transpose() * x);     // P_U X
  Eigen::MatrixXd xv = (x * V_) * V_.transpose();     // X P_V
  Eigen::MatrixXd uxv = ux * V_ * V_.transpose();     // P_U X P_V
  return ux + xv - uxv;
}

Eigen::MatrixXd TangentSpace::project_Tperp(const Eigen::MatrixXd& x) const {
  return x - project_T(x);
}

TangentSpace tangent_space_of(const Eigen::MatrixXd& m, double rank_tol) {
  auto svd = svd_of(m);
  const double cutoff = rank_tol * svd.singularValues()(0);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cutoff) ++r;
  if (r == 0) throw ZeroMatrixError("matrix is numerically zero at this tolerance");
  return TangentSpace(svd.matrixU().leftCols(r), svd.matrixV().leftCols(r));
}

TangentSpace tangent_space_of_rank(const Eigen::MatrixXd& m, int r) {
  auto svd = svd_of(m);
  if (r < 1 || r > svd.singularValues().size())
    throw InvalidInputError("requested rank is out of range");
  return TangentSpace(svd.matrixU().leftCols(r), svd.matrixV().leftCols(r));
}

Eigen::MatrixXd sign_matrix(const Eigen::MatrixXd& m, double rank_tol) {
  auto svd = svd_of(m);
  const double cutoff = rank_tol * svd.singularValues()(0);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cutoff) ++r;
  if (r == 0) throw ZeroMatrixError("matrix is numerically zero at this tolerance");
  return svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).transpose();
}

Eigen::MatrixXd tangent_orthobasis(const TangentSpace& ts) {
  const int n1 = ts.rows();
  const int n2 = ts.cols();
  const int r = ts.rank();
  const Eigen::MatrixXd& u = ts.U();
  const Eigen::MatrixXd& v = ts.V();
  Eigen::MatrixXd p = orthonormal_completion(u);  // n1 x (n1-r)
  Eigen::MatrixXd q = orthonormal_completion(v);  // n2 x (n2-r)

  const int d = ts.dim_T();
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n1) * n2, d);
  int col = 0;
  auto push = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::MatrixXd outer = a * b.transpose();
    basis.col(col++) = Eigen::Map<const Eigen::VectorXd>(outer.data(), outer.size());
  };
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) push(u.col(i), v.col(j));
    for (int k = 0; k < n2 - r; ++k) push(u.col(i), q.col(k));
  }
  for (int k = 0; k < n1 - r; ++k)
    for (int j = 0; j < r; ++j) push(p.col(k), v.col(j));
  return basis;
}

}  // namespace gmc
