#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "gmc/certificate.hpp"
#include "gmc/experiments.hpp"
#include "gmc/rng.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> trials;
  std::optional<double> beta;
  std::optional<std::string> family;
  std::optional<std::string> n_list, r_list, m_list, m_factors;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file");
  cmd->add_option("--seed", flags.seed, "master RNG seed");
  cmd->add_option("--out", flags.out, "output CSV path");
  cmd->add_option("--trials", flags.trials, "trials per cell");
  cmd->add_option("--beta", flags.beta, "confidence exponent (> 1)");
  cmd->add_option("--family", flags.family, "entry|edg|hankel|rank_one|weighted");
  cmd->add_option("--n", flags.n_list, "comma-separated n grid");
  cmd->add_option("--r", flags.r_list, "comma-separated r grid");
  cmd->add_option("--m", flags.m_list, "comma-separated absolute m grid");
  cmd->add_option("--m-factors", flags.m_factors,
                  "m = c * n * r * ceil(log n)^2 for each factor c");
  cmd->add_option("--threads", flags.threads, "trial-level worker threads");
}

gmc::ExperimentConfig build_config(const CommonFlags& flags) {
  gmc::ExperimentConfig config;
  if (!flags.config_path.empty()) config = gmc::load_config(flags.config_path);
  if (flags.family) gmc::apply_override(config, "family", *flags.family);
  if (flags.n_list) gmc::apply_override(config, "n", *flags.n_list);
  if (flags.r_list) gmc::apply_override(config, "r", *flags.r_list);
  if (flags.m_list) gmc::apply_override(config, "m", *flags.m_list);
  if (flags.m_factors) gmc::apply_override(config, "m_factors", *flags.m_factors);
  if (flags.trials) config.trials = *flags.trials;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.beta) config.beta = *flags.beta;
  if (flags.out) config.out_path = *flags.out;
  if (flags.threads) config.threads = *flags.threads;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-rank matrix completion from basis coefficients"};
  app.require_subcommand(1);

  CommonFlags phase_flags;
  CLI::App* phase = app.add_subcommand("phase", "phase-transition sweep");
  add_common(phase, phase_flags);

  CLI::App* edg = app.add_subcommand("edg", "distance-geometry demo");
  int edg_n = 20, edg_r = 2;
  long long edg_m = 0;
  double edg_m_factor = 6.0;
  std::uint64_t edg_seed = 1;
  std::string edg_out = "edg.csv";
  edg->add_option("--n", edg_n, "number of points");
  edg->add_option("--r", edg_r, "embedding dimension");
  edg->add_option("--m", edg_m, "sampled pair count (0 = use --m-factor)");
  edg->add_option("--m-factor", edg_m_factor, "m = c * n * r * ceil(log n)^2");
  edg->add_option("--seed", edg_seed, "RNG seed");
  edg->add_option("--out", edg_out, "output CSV path");

  CommonFlags audit_flags;
  CLI::App* audit = app.add_subcommand("audit", "golfing-certificate audit");
  add_common(audit, audit_flags);
  std::optional<long long> audit_m;
  std::optional<int> audit_l;
  audit->add_option("--audit-m", audit_m, "override the sample count");
  audit->add_option("--audit-l", audit_l, "override the batch count");

  CLI::App* diagnose = app.add_subcommand("diagnose", "basis/matrix diagnostics");
  std::string diag_family = "entry";
  int diag_n = 10, diag_n2 = 0, diag_rank = 0;
  std::uint64_t diag_seed = 1;
  std::string diag_basis_file;
  diagnose->add_option("--family", diag_family, "built-in family");
  diagnose->add_option("--n", diag_n, "matrix side");
  diagnose->add_option("--n2", diag_n2, "second side (hankel)");
  diagnose->add_option("--rank", diag_rank,
                       "also profile a planted rank-r matrix");
  diagnose->add_option("--seed", diag_seed, "seed for the planted matrix");
  diagnose->add_option("--basis", diag_basis_file, "load basis from file");

  CLI::App* bound = app.add_subcommand("bound", "sample-complexity calculator");
  std::string bound_family = "edg";
  int bound_n = 10, bound_r = 1;
  double bound_nu = 0.0, bound_beta = 1.5;
  std::uint64_t bound_seed = 1;
  bool bound_variant = false;
  bound->add_option("--family", bound_family, "built-in family");
  bound->add_option("--n", bound_n, "matrix side");
  bound->add_option("--r", bound_r, "rank");
  bound->add_option("--nu", bound_nu, "coherence (0 = from a planted matrix)");
  bound->add_option("--beta", bound_beta, "confidence exponent");
  bound->add_option("--seed", bound_seed, "seed for the planted matrix");
  bound->add_flag("--theorem-variant", bound_variant,
                  "use the lambda_max(Hinv)^3 form of C");

  CLI11_PARSE(app, argc, argv);

  try {
    if (phase->parsed()) {
      gmc::ExperimentConfig config = build_config(phase_flags);
      gmc::PhaseSummary summary = gmc::run_phase_transition(config);
      for (const auto& cell : summary.cells)
        std::cout << "n=" << cell.n << " r=" << cell.r << " m=" << cell.m
                  << " success_rate=" << cell.success_rate
                  << " median_rel_err=" << cell.median_rel_err << '\n';
      std::cout << "wrote " << summary.csv_path << '\n';
    } else if (edg->parsed()) {
      if (edg_m == 0) {
        const double logn = std::ceil(std::log(static_cast<double>(edg_n)));
        edg_m = static_cast<long long>(
            std::ceil(edg_m_factor * edg_n * edg_r * logn * logn));
      }
      gmc::EdgDemoResult result =
          gmc::run_edg_demo(edg_n, edg_r, edg_m, edg_seed, edg_out);
      std::cout << "n=" << edg_n << " r=" << edg_r << " m=" << result.m
                << " rel_err=" << result.rel_err
                << " iterations=" << result.iterations
                << " converged=" << result.converged << '\n';
      std::cout << "wrote " << result.csv_path << '\n';
    } else if (audit->parsed()) {
      gmc::ExperimentConfig config = build_config(audit_flags);
      if (audit_m) config.audit_m = *audit_m;
      if (audit_l) config.audit_l = *audit_l;
      gmc::AuditSummary summary = gmc::run_certificate_audit(config);
      std::cout << "trials=" << summary.trials
                << " verdict_true=" << summary.verdict_true
                << " lambda_ok=" << summary.lambda_ok
                << " empirical_failure_rate=" << summary.empirical_failure_rate
                << " mean_analytic_total_p=" << summary.mean_analytic_total_p
                << '\n';
      std::cout << "wrote " << summary.csv_path << '\n';
    } else if (diagnose->parsed()) {
      gmc::ExperimentConfig config;
      config.seed = diag_seed;
      gmc::BasisSet basis =
          !diag_basis_file.empty()
              ? gmc::load_basis(diag_basis_file)
              : (diag_family == "hankel" && diag_n2 > 0
                     ? gmc::make_hankel_basis(diag_n, diag_n2)
                     : gmc::make_family_basis(gmc::family_from_string(diag_family),
                                              diag_n, config));
      if (diag_rank > 0 && basis.square()) {
        Eigen::MatrixXd truth =
            gmc::plant_truth(basis.family(), basis, diag_rank, diag_seed);
        std::cout << gmc::diagnose_report(basis, &truth);
      } else {
        std::cout << gmc::diagnose_report(basis, nullptr);
      }
    } else if (bound->parsed()) {
      gmc::ExperimentConfig config;
      config.seed = bound_seed;
      gmc::BasisSet basis = gmc::make_family_basis(
          gmc::family_from_string(bound_family), bound_n, config);
      gmc::DualBasisData dual = gmc::dual_set(basis);
      double nu = bound_nu;
      if (nu <= 0.0) {
        Eigen::MatrixXd truth =
            gmc::plant_truth(basis.family(), basis, bound_r, bound_seed);
        nu = gmc::coherence_profile(truth, basis, dual).nu;
      }
      const double mu = gmc::correlation_parameter(basis).mu;
      gmc::TheoremConstants tc =
          gmc::sample_bound(bound_n, bound_r, nu, dual.spectrum(), mu, basis.L(),
                            bound_beta, bound_variant);
      std::cout << gmc::bound_report(tc);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}
