#include "gmc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace gmc {

Eigen::MatrixXd svt_prox(const Eigen::MatrixXd& x, double tau) {
  if (tau <= 0.0) throw InvalidInputError("soft-threshold level must be positive");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = (svd.singularValues().array() - tau).max(0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

Eigen::VectorXd measure(const BasisSet& basis, const Eigen::MatrixXd& m,
                        std::span<const std::int32_t> omega) {
  if (m.rows() != basis.rows() || m.cols() != basis.cols())
    throw InvalidDimensionError("matrix shape does not match the basis");
  Eigen::Map<const Eigen::VectorXd> mv(m.data(), m.size());
  Eigen::VectorXd all = basis.W().transpose() * mv;
  Eigen::VectorXd out(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) out[k] = all[omega[k]];
  return out;
}

namespace {

using ProxFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double rho)>;

struct Dedup {
  std::vector<std::int32_t> indices;
  Eigen::VectorXd values;
};

Dedup deduplicate(const SampleSet& samples, const Eigen::VectorXd& b) {
  if (static_cast<long long>(b.size()) != samples.m())
    throw InvalidDimensionError("measurement count does not match the sample set");
  std::map<std::int32_t, double> first;
  for (long long k = 0; k < samples.m(); ++k) {
    const std::int32_t idx = samples.indices[static_cast<std::size_t>(k)];
    auto [it, inserted] = first.emplace(idx, b[k]);
    if (!inserted) {
      const double tol = 1e-9 * std::max(1.0, std::abs(it->second));
      if (std::abs(it->second - b[k]) > tol)
        throw InfeasibleProblemError(
            "duplicated index " + std::to_string(idx + 1) +
            " carries inconsistent measurements");
    }
  }
  Dedup d;
  d.indices.reserve(first.size());
  d.values.resize(static_cast<Eigen::Index>(first.size()));
  Eigen::Index k = 0;
  for (const auto& [idx, value] : first) {
    d.indices.push_back(idx);
    d.values[k++] = value;
  }
  return d;
}

/// Min-norm projection onto {x : A x = b} through a thin SVD of A;
/// tolerates rank deficiency and reports it.
struct AffineProjector {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd U, V;
  Eigen::VectorXd sigma;
  bool rank_deficient = false;

  AffineProjector(Eigen::MatrixXd a_in, Eigen::VectorXd b_in)
      : A(std::move(a_in)), b(std::move(b_in)) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff = svd.singularValues().size()
                              ? 1e-12 * svd.singularValues()(0)
                              : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > cutoff) ++rank;
    rank_deficient = rank < A.rows();
    U = svd.matrixU().leftCols(rank);
    V = svd.matrixV().leftCols(rank);
    sigma = svd.singularValues().head(rank);
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd residual = A * x - b;
    return x - V * ((U.transpose() * residual).array() / sigma.array()).matrix();
  }
};

Eigen::VectorXd psd_project(const Eigen::VectorXd& x, int n) {
  Eigen::Map<const Eigen::MatrixXd> xm(x.data(), n, n);
  Eigen::MatrixXd sym = 0.5 * (xm + xm.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::MatrixXd clipped = eig.eigenvectors() *
                            eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
                            eig.eigenvectors().transpose();
  return Eigen::Map<const Eigen::VectorXd>(clipped.data(), clipped.size());
}

/// Projection onto {x : ||Q x - q|| <= delta} via the secular equation of
/// the Tikhonov path x(lam) = argmin ||x - v||^2 + lam ||Q x - q||^2.
struct BallProjector {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
  Eigen::MatrixXd U, V;
  Eigen::VectorXd sigma;
  double delta;

  BallProjector(Eigen::MatrixXd q_in, Eigen::VectorXd rhs, double delta_in)
      : Q(std::move(q_in)), q(std::move(rhs)), delta(delta_in) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff = svd.singularValues().size()
                              ? 1e-13 * svd.singularValues()(0)
                              : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > cutoff) ++rank;
    U = svd.matrixU().leftCols(rank);
    V = svd.matrixV().leftCols(rank);
    sigma = svd.singularValues().head(rank);
    const double unreachable = (q - U * (U.transpose() * q)).norm();
    if (unreachable > delta)
      throw InfeasibleProblemError("noise ball does not intersect the search space");
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const {
    Eigen::VectorXd residual = Q * v - q;
    const double r0 = residual.norm();
    if (r0 <= delta) return v;
    Eigen::VectorXd e0 = U.transpose() * residual;
    const double outside2 = residual.squaredNorm() - e0.squaredNorm();
    auto r2 = [&](double lam) {
      double acc = outside2;
      for (Eigen::Index i = 0; i < e0.size(); ++i) {
        const double den = 1.0 + lam * sigma[i] * sigma[i];
        acc += e0[i] * e0[i] / (den * den);
      }
      return acc;
    };
    double lo = 0.0, hi = 1.0;
    while (r2(hi) > delta * delta && hi < 1e18) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (r2(mid) > delta * delta)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    }
    const double lam = hi;
    Eigen::VectorXd shrink(e0.size());
    for (Eigen::Index i = 0; i < e0.size(); ++i)
      shrink[i] = lam * sigma[i] * e0[i] / (1.0 + lam * sigma[i] * sigma[i]);
    return v - V * shrink;
  }
};

struct ConsensusResult {
  Eigen::VectorXd z;
  int iterations = 0;
  bool converged = false;
  std::vector<double> merit_trace;
};

/// Consensus ADMM over proximable blocks; block 0 is the nuclear prox.
ConsensusResult run_consensus(const std::vector<ProxFn>& blocks,
                              const Eigen::VectorXd& z0, const SolverConfig& cfg,
                              const std::function<double(const Eigen::VectorXd&)>&
                                  feasibility_gap) {
  const int nb = static_cast<int>(blocks.size());
  const Eigen::Index size = z0.size();
  double rho = cfg.rho;
  Eigen::VectorXd z = z0;
  std::vector<Eigen::VectorXd> x(nb, Eigen::VectorXd::Zero(size));
  std::vector<Eigen::VectorXd> u(nb, Eigen::VectorXd::Zero(size));
  std::vector<Eigen::VectorXd> w_prev(nb, z);

  ConsensusResult result;
  result.merit_trace.reserve(cfg.max_iter);
  int stalled = 0;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    for (int b = 0; b < nb; ++b) x[b] = blocks[b](z - u[b], rho);
    Eigen::VectorXd z_old = z;
    z.setZero();
    for (int b = 0; b < nb; ++b) z += x[b] + u[b];
    z /= nb;
    for (int b = 0; b < nb; ++b) u[b] += x[b] - z;

    double merit2 = 0.0;
    double primal2 = 0.0;
    for (int b = 0; b < nb; ++b) {
      Eigen::VectorXd w = z - u[b];
      merit2 += (w - w_prev[b]).squaredNorm();
      w_prev[b] = w;
      primal2 += (x[b] - z).squaredNorm();
    }
    const double merit = std::sqrt(merit2);
    result.merit_trace.push_back(merit);
    const double primal = std::sqrt(primal2);
    const double dual = rho * std::sqrt(static_cast<double>(nb)) * (z - z_old).norm();
    const double scale = std::max(1.0, z.norm());
    result.iterations = iter;

    const bool feasible = feasibility_gap(z) <= cfg.feas_tol;
    if (feasible && primal <= cfg.feas_tol * scale && dual <= cfg.feas_tol * scale) {
      result.converged = true;
      break;
    }
    // a fixed point requires the whole (Z, U) state to stop moving
    if (merit <= cfg.rel_change_tol * scale) {
      if (++stalled >= 3) {
        result.converged = feasible;
        break;
      }
    } else {
      stalled = 0;
    }

    if (cfg.adaptive_rho && iter <= 1000 && iter % 25 == 0) {
      if (primal > 10.0 * dual && rho < 1e3) {
        rho *= 2.0;
        for (auto& ub : u) ub *= 0.5;
      } else if (dual > 10.0 * primal && rho > 1e-3) {
        rho *= 0.5;
        for (auto& ub : u) ub *= 2.0;
      }
    }
  }
  result.z = z;
  return result;
}

void finalize_report(RecoveryReport& report, const CompletionProblem& problem,
                     const SolverConfig& cfg, const Eigen::VectorXd& z,
                     int dedup_count) {
  const BasisSet& basis = *problem.basis;
  report.X_hat =
      Eigen::Map<const Eigen::MatrixXd>(z.data(), basis.rows(), basis.cols());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(report.X_hat);
  report.objective = svd.singularValues().sum();
  if (problem.truth) {
    const double denom = problem.truth->norm();
    report.rel_err_vs_truth =
        denom > 0.0 ? (report.X_hat - *problem.truth).norm() / denom
                    : (report.X_hat).norm();
  }
  const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cfg.rank_tol * top) ++rank;
  if (rank > 0) {
    const int dim_t = rank * (basis.rows() + basis.cols()) - rank * rank;
    report.undersampled = dedup_count < dim_t;
  }
}

}  // namespace

RecoveryReport solve_exact(const CompletionProblem& problem,
                           const SolverConfig& config) {
  const BasisSet& basis = *problem.basis;
  const Eigen::Index size = basis.W().rows();
  if (problem.samples.m() < 1) throw EmptySampleError("no measurements supplied");
  Dedup dedup = deduplicate(problem.samples, problem.measurements);

  // constraint rows: deduplicated measurements, then the orthogonal
  // complement of span(W) when the basis spans a proper subspace
  const int k_meas = static_cast<int>(dedup.indices.size());
  int k_span = 0;
  Eigen::MatrixXd span_comp;
  if (basis.spans_proper_subspace()) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.W());
    Eigen::MatrixXd qfull = qr.householderQ();
    span_comp = qfull.rightCols(size - basis.L());
    k_span = static_cast<int>(span_comp.cols());
  }
  Eigen::MatrixXd a(k_meas + k_span, size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k_meas + k_span);
  for (int k = 0; k < k_meas; ++k) {
    a.row(k) = basis.W().col(dedup.indices[k]).transpose();
    rhs[k] = dedup.values[k];
  }
  if (k_span > 0) a.bottomRows(k_span) = span_comp.transpose();

  AffineProjector affine(std::move(a), std::move(rhs));

  std::vector<ProxFn> blocks;
  blocks.emplace_back([&basis](const Eigen::VectorXd& v, double rho) {
    Eigen::Map<const Eigen::MatrixXd> vm(v.data(), basis.rows(), basis.cols());
    Eigen::MatrixXd out = svt_prox(vm, 1.0 / rho);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(out.data(), out.size()));
  });
  blocks.emplace_back(
      [&affine](const Eigen::VectorXd& v, double) { return affine(v); });
  if (basis.flags().psd_cone && basis.square()) {
    const int n = basis.n();
    blocks.emplace_back(
        [n](const Eigen::VectorXd& v, double) { return psd_project(v, n); });
  }

  Eigen::MatrixXd w_meas(k_meas, size);
  for (int k = 0; k < k_meas; ++k)
    w_meas.row(k) = basis.W().col(dedup.indices[k]).transpose();
  const Eigen::VectorXd meas_rhs = dedup.values;
  auto gap = [&](const Eigen::VectorXd& z) {
    return (w_meas * z - meas_rhs).cwiseAbs().maxCoeff();
  };

  ConsensusResult res =
      run_consensus(blocks, affine(Eigen::VectorXd::Zero(size)), config, gap);

  RecoveryReport report;
  report.iterations = res.iterations;
  report.converged = res.converged;
  report.rank_deficient_constraints = affine.rank_deficient;
  report.merit_trace = std::move(res.merit_trace);
  report.constraint_residual = gap(res.z);
  finalize_report(report, problem, config, res.z, k_meas);
  return report;
}

RecoveryReport solve_noisy(const CompletionProblem& problem,
                           const SolverConfig& config) {
  if (problem.noise_level < 0.0)
    throw InvalidInputError("noise level must be nonnegative");
  if (problem.noise_level == 0.0) return solve_exact(problem, config);
  const BasisSet& basis = *problem.basis;
  const DualBasisData& dual = *problem.dual;
  const Eigen::Index size = basis.W().rows();
  const long long m = problem.samples.m();
  if (m < 1) throw EmptySampleError("no measurements supplied");
  if (m > 20000) throw MemoryGuardError("noisy program refused for m > 20000");
  if (static_cast<long long>(problem.measurements.size()) != m)
    throw InvalidDimensionError("measurement count does not match the sample set");

  // ellipsoid metric: ||R_Omega(X) - b-expansion||_F^2
  //   = (L/m)^2 e^T G e with G_{jk} = Hinv(omega_j, omega_k)
  Eigen::MatrixXd g(m, m);
  for (long long j = 0; j < m; ++j)
    for (long long k = 0; k < m; ++k)
      g(j, k) = dual.H_inv()(problem.samples.indices[j], problem.samples.indices[k]);
  g = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  Eigen::VectorXd sqrt_eigs = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double scale = static_cast<double>(basis.L()) / static_cast<double>(m);
  Eigen::MatrixXd g_sqrt =
      scale * eig.eigenvectors() * sqrt_eigs.asDiagonal() * eig.eigenvectors().transpose();

  Eigen::MatrixXd a_mult(m, size);
  for (long long k = 0; k < m; ++k)
    a_mult.row(k) = basis.W().col(problem.samples.indices[k]).transpose();
  BallProjector ball(g_sqrt * a_mult, g_sqrt * problem.measurements,
                     problem.noise_level);

  std::vector<ProxFn> blocks;
  blocks.emplace_back([&basis](const Eigen::VectorXd& v, double rho) {
    Eigen::Map<const Eigen::MatrixXd> vm(v.data(), basis.rows(), basis.cols());
    Eigen::MatrixXd out = svt_prox(vm, 1.0 / rho);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(out.data(), out.size()));
  });
  blocks.emplace_back([&ball](const Eigen::VectorXd& v, double) { return ball(v); });
  Eigen::MatrixXd q_span;
  if (basis.spans_proper_subspace()) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.W());
    q_span = qr.householderQ() * Eigen::MatrixXd::Identity(size, basis.L());
    blocks.emplace_back([&q_span](const Eigen::VectorXd& v, double) {
      return Eigen::VectorXd(q_span * (q_span.transpose() * v));
    });
  }
  if (basis.flags().psd_cone && basis.square()) {
    const int n = basis.n();
    blocks.emplace_back(
        [n](const Eigen::VectorXd& v, double) { return psd_project(v, n); });
  }

  auto gap = [&](const Eigen::VectorXd& z) {
    const double violation =
        (g_sqrt * (a_mult * z - problem.measurements)).norm() - problem.noise_level;
    return std::max(0.0, violation);
  };

  ConsensusResult res =
      run_consensus(blocks, Eigen::VectorXd::Zero(size), config, gap);

  RecoveryReport report;
  report.iterations = res.iterations;
  report.converged = res.converged;
  report.merit_trace = std::move(res.merit_trace);
  report.constraint_residual = gap(res.z);
  finalize_report(report, problem, config, res.z,
                  problem.samples.distinct_count());
  return report;
}

}  // namespace gmc
