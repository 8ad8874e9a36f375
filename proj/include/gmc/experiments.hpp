#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmc/basis.hpp"
#include "gmc/diagnostics.hpp"
#include "gmc/solver.hpp"

namespace gmc {

/// Flat key=value configuration for the experiment harness. Grids are
/// comma-separated lists; CLI flag overrides win over file values.
struct ExperimentConfig {
  BasisFamily family = BasisFamily::entry;
  std::vector<int> n_grid = {20};
  std::vector<int> r_grid = {2};
  std::vector<long long> m_grid;      // absolute sample counts
  std::vector<double> m_factors;      // m = ceil(c * n * r * ceil(log n)^2)
  int trials = 20;
  std::uint64_t seed = 1;
  double beta = 1.5;
  double success_tol = 1e-4;
  std::string out_path = "out.csv";
  SolverConfig solver;
  int rank_one_factor = 3;            // L = factor * n vectors
  std::vector<double> weights;        // weighted family; default 1..n scaled
  int threads = 1;
  std::optional<long long> audit_m;   // audit override; default Theorem-driven
  std::optional<int> audit_l;
};

ExperimentConfig load_config(const std::string& path);
void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value);

/// Deterministic basis for a family at side n (seed feeds the rank-one
/// vector draw; the other families are deterministic outright).
BasisSet make_family_basis(BasisFamily family, int n,
                           const ExperimentConfig& config);

/// Planted rank-r ground truth lying in the span of the family.
Eigen::MatrixXd plant_truth(BasisFamily family, const BasisSet& basis, int r,
                            std::uint64_t seed);

struct PhaseCell {
  int n = 0, r = 0;
  long long m = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double median_rel_err = 0.0;
};

struct PhaseSummary {
  std::vector<PhaseCell> cells;
  std::string csv_path;
};

/// Phase-transition sweep; one CSV row per (n, r, m, trial) plus a
/// summary row per cell. Byte-identical output for identical config.
PhaseSummary run_phase_transition(const ExperimentConfig& config);

struct EdgDemoResult {
  double rel_err = 0.0;
  int iterations = 0;
  bool converged = false;
  long long m = 0;
  std::string csv_path;
};

/// End-to-end distance-geometry demo: plants n points in R^r, samples m
/// distinct squared distances (m is clamped to the pair count), recovers
/// the Gram matrix.
EdgDemoResult run_edg_demo(int n, int r, long long m, std::uint64_t seed,
                           const std::string& out_path,
                           const SolverConfig& solver = {});

struct AuditSummary {
  int trials = 0;
  int verdict_true = 0;
  int lambda_ok = 0;
  double empirical_failure_rate = 0.0;
  double mean_analytic_total_p = 0.0;
  std::string csv_path;
};

/// Golfing-certificate audit: per-trial certificate rows with the
/// analytic failure-probability bounds alongside empirical verdicts.
AuditSummary run_certificate_audit(const ExperimentConfig& config);

/// Text block with mu, Gram spectrum, and (optionally) the coherence
/// profile of a matrix against the basis.
std::string diagnose_report(const BasisSet& basis, const Eigen::MatrixXd* m,
                            double rank_tol = 1e-9);

/// Text block with the sample-complexity composition and the failure
/// probabilities checked against their per-batch target.
std::string bound_report(const TheoremConstants& tc);

}  // namespace gmc
