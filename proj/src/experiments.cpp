#include "gmc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>
#include <sstream>

#include "gmc/certificate.hpp"
#include "gmc/rng.hpp"

namespace gmc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& value, Parse parse) {
  std::vector<T> out;
  std::stringstream stream(value);
  std::string token;
  while (std::getline(stream, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(parse(token));
  }
  return out;
}

std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string join_semicolon(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += fmt(values[i]);
  }
  return out;
}

long long m_from_factor(double c, int n, int r) {
  const double log_n = std::ceil(std::log(static_cast<double>(n)));
  return static_cast<long long>(std::ceil(c * n * r * log_n * log_n));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t half = values.size() / 2;
  return values.size() % 2 ? values[half]
                           : 0.5 * (values[half - 1] + values[half]);
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  ExperimentConfig config;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("config line without '=': " + line);
    apply_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value) {
  auto to_int = [](const std::string& s) { return std::stoi(s); };
  auto to_ll = [](const std::string& s) { return std::stoll(s); };
  auto to_double = [](const std::string& s) { return std::stod(s); };
  if (key == "family") {
    config.family = family_from_string(value);
  } else if (key == "n") {
    config.n_grid = parse_list<int>(value, to_int);
  } else if (key == "r") {
    config.r_grid = parse_list<int>(value, to_int);
  } else if (key == "m") {
    config.m_grid = parse_list<long long>(value, to_ll);
  } else if (key == "m_factors") {
    config.m_factors = parse_list<double>(value, to_double);
  } else if (key == "trials") {
    config.trials = to_int(value);
  } else if (key == "seed") {
    config.seed = std::stoull(value);
  } else if (key == "beta") {
    config.beta = to_double(value);
  } else if (key == "success_tol") {
    config.success_tol = to_double(value);
  } else if (key == "out") {
    config.out_path = value;
  } else if (key == "threads") {
    config.threads = to_int(value);
  } else if (key == "rank_one_factor") {
    config.rank_one_factor = to_int(value);
  } else if (key == "weights") {
    config.weights = parse_list<double>(value, to_double);
  } else if (key == "audit.m") {
    config.audit_m = to_ll(value);
  } else if (key == "audit.l") {
    config.audit_l = to_int(value);
  } else if (key == "solver.feas_tol") {
    config.solver.feas_tol = to_double(value);
  } else if (key == "solver.rel_change_tol") {
    config.solver.rel_change_tol = to_double(value);
  } else if (key == "solver.max_iter") {
    config.solver.max_iter = to_int(value);
  } else if (key == "solver.rho") {
    config.solver.rho = to_double(value);
  } else if (key == "solver.adaptive_rho") {
    config.solver.adaptive_rho = value == "1" || value == "true";
  } else if (key == "solver.rank_tol") {
    config.solver.rank_tol = to_double(value);
  } else {
    throw IoError("unknown config key: " + key);
  }
}

BasisSet make_family_basis(BasisFamily family, int n,
                           const ExperimentConfig& config) {
  switch (family) {
    case BasisFamily::entry:
      return make_entry_basis(n);
    case BasisFamily::edg:
      return make_edg_basis(n);
    case BasisFamily::hankel:
      return make_hankel_basis(n, n);
    case BasisFamily::rank_one: {
      CounterRng rng(config.seed, 0xBA515ull);
      const int count = std::min(n * n, config.rank_one_factor * n);
      std::vector<Eigen::VectorXd> vectors;
      vectors.reserve(count);
      for (int k = 0; k < count; ++k) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
        vectors.push_back(v.normalized());
      }
      return make_rank_one_basis(vectors);
    }
    case BasisFamily::weighted: {
      Eigen::VectorXd weights(n);
      if (!config.weights.empty()) {
        if (static_cast<int>(config.weights.size()) != n)
          throw InvalidWeightsError("weights list must have n entries");
        for (int i = 0; i < n; ++i) weights[i] = config.weights[i];
      } else {
        for (int i = 0; i < n; ++i) weights[i] = 1.0 + i / static_cast<double>(n);
      }
      return make_weighted_basis(weights, make_entry_basis(n));
    }
    case BasisFamily::custom:
      throw InvalidInputError("custom bases enter through files, not the harness");
  }
  throw InvalidInputError("unhandled family");
}

Eigen::MatrixXd plant_truth(BasisFamily family, const BasisSet& basis, int r,
                            std::uint64_t seed) {
  CounterRng rng(seed, 0x7A77ull);
  const int n = basis.rows();
  switch (family) {
    case BasisFamily::entry:
    case BasisFamily::custom: {
      Eigen::MatrixXd a(n, r), b(basis.cols(), r);
      for (int j = 0; j < r; ++j) {
        for (int i = 0; i < n; ++i) a(i, j) = rng.next_gaussian();
        for (int i = 0; i < basis.cols(); ++i) b(i, j) = rng.next_gaussian();
      }
      return a * b.transpose();
    }
    case BasisFamily::weighted: {
      Eigen::MatrixXd a(n, r), b(n, r);
      for (int j = 0; j < r; ++j) {
        for (int i = 0; i < n; ++i) a(i, j) = rng.next_gaussian();
        for (int i = 0; i < n; ++i) b(i, j) = rng.next_gaussian();
      }
      return a * b.transpose();
    }
    case BasisFamily::edg: {
      Eigen::MatrixXd points(n, r);
      for (int j = 0; j < r; ++j)
        for (int i = 0; i < n; ++i) points(i, j) = rng.next_gaussian();
      points.rowwise() -= points.colwise().mean();
      return points * points.transpose();
    }
    case BasisFamily::hankel: {
      // Hankel lift of a sum of r decaying exponentials has rank r
      const int len = 2 * n - 1;
      Eigen::VectorXd signal = Eigen::VectorXd::Zero(len);
      for (int k = 0; k < r; ++k) {
        const double pole = 0.55 + 0.4 * rng.next_double();
        const double coeff = 0.5 + rng.next_double();
        const double sign = rng.next_double() < 0.5 ? -1.0 : 1.0;
        double power = 1.0;
        for (int t = 0; t < len; ++t) {
          signal[t] += sign * coeff * power;
          power *= pole;
        }
      }
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = signal[i + j];
      return m;
    }
    case BasisFamily::rank_one: {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      std::vector<int> chosen;
      while (static_cast<int>(chosen.size()) < std::min(r, basis.L())) {
        const int pick = static_cast<int>(rng.uniform_index(basis.L()));
        if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end())
          chosen.push_back(pick);
      }
      for (int idx : chosen) {
        const double coeff = 0.5 + rng.next_double();
        m += coeff * basis.element(idx);
      }
      return m;
    }
  }
  throw InvalidInputError("unhandled family");
}

namespace {

struct TrialRow {
  std::uint64_t seed = 0;
  double rel_err = 0.0;
  bool success = false;
  int iterations = 0;
  bool converged = false;
  double nu = 0.0;
};

TrialRow run_phase_trial(const ExperimentConfig& config, const BasisSet& basis,
                         const DualBasisData& dual, int r, long long m,
                         std::uint64_t trial_seed) {
  TrialRow row;
  row.seed = trial_seed;
  Eigen::MatrixXd truth = plant_truth(config.family, basis, r, trial_seed);
  CoherenceProfile profile = coherence_profile(truth, basis, dual);
  row.nu = profile.nu;

  CompletionProblem problem;
  problem.basis = &basis;
  problem.dual = &dual;
  problem.samples = draw_omega(basis.L(), m, trial_seed);
  problem.measurements = measure(basis, truth, problem.samples.all());
  problem.truth = truth;
  RecoveryReport report = solve_exact(problem, config.solver);
  row.rel_err = report.rel_err_vs_truth.value_or(1.0);
  row.success = row.rel_err <= config.success_tol;
  row.iterations = report.iterations;
  row.converged = report.converged;
  return row;
}

std::vector<TrialRow> run_trials_parallel(
    const ExperimentConfig& config,
    const std::function<TrialRow(int trial, std::uint64_t seed)>& body,
    std::uint64_t cell_key) {
  CounterRng seeder(config.seed, cell_key);
  std::vector<std::uint64_t> seeds(config.trials);
  for (int t = 0; t < config.trials; ++t) seeds[t] = seeder.derive_seed(t);
  std::vector<TrialRow> rows(config.trials);
  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    for (int t = 0; t < config.trials; ++t) rows[t] = body(t, seeds[t]);
    return rows;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1))
      rows[t] = body(t, seeds[t]);
  };
  std::vector<std::future<void>> futures;
  for (int w = 0; w < threads; ++w)
    futures.push_back(std::async(std::launch::async, worker));
  for (auto& f : futures) f.get();
  return rows;
}

}  // namespace

PhaseSummary run_phase_transition(const ExperimentConfig& config) {
  if (config.trials < 1) throw InvalidInputError("trials must be >= 1");
  std::ofstream out(config.out_path, std::ios::binary);
  if (!out) throw IoError("cannot open output CSV: " + config.out_path);
  out << "schema,row_type,family,n,r,m,trial,seed,rel_err,success,iterations,"
         "converged,mu,nu,lambda_min_H,lambda_max_H,lambda_max_Hinv,"
         "hinv_inf_norm,c_v\n";

  PhaseSummary summary;
  summary.csv_path = config.out_path;
  std::uint64_t cell_key = 0;
  for (int n : config.n_grid) {
    BasisSet basis = make_family_basis(config.family, n, config);
    DualBasisData dual = dual_set(basis);
    const double mu = correlation_parameter(basis).mu;
    const GramSpectrum& sp = dual.spectrum();
    for (int r : config.r_grid) {
      std::vector<long long> ms = config.m_grid;
      for (double c : config.m_factors) ms.push_back(m_from_factor(c, n, r));
      if (ms.empty()) throw InvalidInputError("no m grid supplied");
      for (long long m : ms) {
        ++cell_key;
        auto rows = run_trials_parallel(
            config,
            [&](int, std::uint64_t seed) {
              return run_phase_trial(config, basis, dual, r, m, seed);
            },
            cell_key);
        PhaseCell cell;
        cell.n = n;
        cell.r = r;
        cell.m = m;
        cell.trials = config.trials;
        std::vector<double> errs;
        for (int t = 0; t < config.trials; ++t) {
          const TrialRow& row = rows[t];
          out << "pt1,trial," << to_string(config.family) << ',' << n << ',' << r
              << ',' << m << ',' << t << ',' << row.seed << ',' << fmt(row.rel_err)
              << ',' << (row.success ? 1 : 0) << ',' << row.iterations << ','
              << (row.converged ? 1 : 0) << ',' << fmt(mu) << ',' << fmt(row.nu)
              << ',' << fmt(sp.lambda_min_H) << ',' << fmt(sp.lambda_max_H) << ','
              << fmt(sp.lambda_max_Hinv) << ',' << fmt(sp.hinv_inf_norm) << ','
              << fmt(sp.c_v) << '\n';
          cell.successes += row.success ? 1 : 0;
          errs.push_back(row.rel_err);
        }
        cell.success_rate = cell.successes / static_cast<double>(cell.trials);
        cell.median_rel_err = median(errs);
        out << "pt1,cell," << to_string(config.family) << ',' << n << ',' << r
            << ',' << m << ',' << cell.trials << ',' << config.seed << ','
            << fmt(cell.median_rel_err) << ',' << fmt(cell.success_rate) << ",0,0,"
            << fmt(mu) << ",0," << fmt(sp.lambda_min_H) << ','
            << fmt(sp.lambda_max_H) << ',' << fmt(sp.lambda_max_Hinv) << ','
            << fmt(sp.hinv_inf_norm) << ',' << fmt(sp.c_v) << '\n';
        summary.cells.push_back(cell);
      }
    }
  }
  return summary;
}

EdgDemoResult run_edg_demo(int n, int r, long long m, std::uint64_t seed,
                           const std::string& out_path,
                           const SolverConfig& solver) {
  if (n < r + 1) throw InvalidInputError("demo needs n >= r + 1");
  if (m < 1) throw EmptySampleError("demo needs at least one pair");
  BasisSet basis = make_edg_basis(n);
  DualBasisData dual = dual_set(basis);

  CounterRng rng(seed, 0xED6ull);
  Eigen::MatrixXd points(n, r);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < n; ++i) points(i, j) = rng.next_gaussian();
  points.rowwise() -= points.colwise().mean();
  Eigen::MatrixXd gram = points * points.transpose();

  // each pairwise distance is observed at most once: a partial
  // Fisher-Yates shuffle picks m distinct pairs
  m = std::min<long long>(m, basis.L());
  std::vector<std::int32_t> deck(basis.L());
  std::iota(deck.begin(), deck.end(), 0);
  for (long long k = 0; k < m; ++k) {
    const auto swap_with =
        k + static_cast<long long>(rng.uniform_index(deck.size() - k));
    std::swap(deck[k], deck[swap_with]);
  }
  deck.resize(static_cast<std::size_t>(m));

  // <X, w_(a,b)> = (X_aa + X_bb - 2 X_ab)/2 = half the squared distance
  CompletionProblem problem;
  problem.basis = &basis;
  problem.dual = &dual;
  problem.samples.L = basis.L();
  problem.samples.seed = seed;
  problem.samples.indices = std::move(deck);
  problem.measurements = measure(basis, gram, problem.samples.all());
  problem.truth = gram;
  RecoveryReport report = solve_exact(problem, solver);

  EdgDemoResult result;
  result.rel_err = report.rel_err_vs_truth.value_or(1.0);
  result.iterations = report.iterations;
  result.converged = report.converged;
  result.m = m;
  result.csv_path = out_path;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open output CSV: " + out_path);
    out << "schema,family,n,r,m,seed,rel_err,iterations,converged,objective,"
           "constraint_residual\n";
    out << "edg1,edg," << n << ',' << r << ',' << m << ',' << seed << ','
        << fmt(result.rel_err) << ',' << report.iterations << ','
        << (report.converged ? 1 : 0) << ',' << fmt(report.objective) << ','
        << fmt(report.constraint_residual) << '\n';
  }
  return result;
}

AuditSummary run_certificate_audit(const ExperimentConfig& config) {
  if (config.trials < 1) throw InvalidInputError("trials must be >= 1");
  std::ofstream out(config.out_path, std::ios::binary);
  if (!out) throw IoError("cannot open output CSV: " + config.out_path);
  out << "schema,row_type,family,n,r,trial,seed,m,l,nu,C,cond1_lhs,cond1_rhs,"
         "cond2_lhs,cond1,cond2,verdict,lambda_min,half_lambda_min_H,lambda_ok,"
         "recursion_residual,p_total,q_norms,eta_trace\n";

  const int n = config.n_grid.front();
  const int r = config.r_grid.front();
  BasisSet basis = make_family_basis(config.family, n, config);
  DualBasisData dual = dual_set(basis);
  const double mu = correlation_parameter(basis).mu;

  AuditSummary summary;
  summary.csv_path = config.out_path;
  summary.trials = config.trials;
  CounterRng seeder(config.seed, 0xA0D17ull);
  double p_acc = 0.0;
  for (int t = 0; t < config.trials; ++t) {
    const std::uint64_t trial_seed = seeder.derive_seed(t);
    Eigen::MatrixXd truth = plant_truth(config.family, basis, r, trial_seed);
    CoherenceProfile profile = coherence_profile(truth, basis, dual);
    TheoremConstants tc = sample_bound(n, r, profile.nu, dual.spectrum(), mu,
                                       basis.L(), config.beta);
    long long m = config.audit_m.value_or(tc.m_total);
    int l = config.audit_l.value_or(tc.l);
    SampleSet samples = partition_omega(draw_omega(basis.L(), m, trial_seed), l);
    CertificateReport report = golfing_build(truth, basis, dual, samples);
    FailureProbabilities probs =
        failure_probabilities(n, basis.L(), r, profile.nu, mu, dual.spectrum(), m,
                              std::vector<long long>(samples.batch_sizes.begin(),
                                                     samples.batch_sizes.end()));
    p_acc += probs.total;
    summary.verdict_true += report.verdict ? 1 : 0;
    summary.lambda_ok += report.lambda_min_ok ? 1 : 0;
    out << "aud1,trial," << to_string(config.family) << ',' << n << ',' << r << ','
        << t << ',' << trial_seed << ',' << m << ',' << l << ','
        << fmt(profile.nu) << ',' << fmt(tc.C) << ',' << fmt(report.cond1_lhs)
        << ',' << fmt(report.cond1_rhs) << ',' << fmt(report.cond2_lhs) << ','
        << (report.cond1 ? 1 : 0) << ',' << (report.cond2 ? 1 : 0) << ','
        << (report.verdict ? 1 : 0) << ',' << fmt(report.ptfpt_lambda_min) << ','
        << fmt(report.half_lambda_min_H) << ',' << (report.lambda_min_ok ? 1 : 0)
        << ',' << fmt(report.recursion_residual) << ',' << fmt(probs.total) << ','
        << join_semicolon(report.q_norms) << ',' << join_semicolon(report.eta_trace)
        << '\n';
  }
  summary.empirical_failure_rate =
      1.0 - summary.verdict_true / static_cast<double>(summary.trials);
  summary.mean_analytic_total_p = p_acc / summary.trials;
  out << "aud1,summary," << to_string(config.family) << ',' << n << ',' << r << ','
      << summary.trials << ',' << config.seed << ",0,0,0,0,0,0,0,0,0,"
      << fmt(1.0 - summary.empirical_failure_rate) << ',' << summary.lambda_ok
      << ",0,0,0," << fmt(summary.mean_analytic_total_p) << ",," << '\n';
  return summary;
}

std::string diagnose_report(const BasisSet& basis, const Eigen::MatrixXd* m,
                            double rank_tol) {
  std::ostringstream out;
  out.precision(12);
  DualBasisData dual = dual_set(basis);
  CorrelationReport corr = correlation_parameter(basis);
  out << "family=" << to_string(basis.family()) << " rows=" << basis.rows()
      << " cols=" << basis.cols() << " L=" << basis.L() << '\n';
  out << "mu=" << corr.mu << " lambda_max_wtw=" << corr.lambda_max_wtw
      << " lambda_max_wwt=" << corr.lambda_max_wwt
      << " lambda_bound_holds=" << corr.lambda_bound_holds << '\n';
  out << spectrum_to_kv(dual.spectrum()) << '\n';
  out << "biorthogonality_residual=" << biorthogonality_residual(dual, basis)
      << '\n';
  if (basis.family() == BasisFamily::edg) {
    EdgSpectrumCheck check = edg_lambda_min_reference(dual.spectrum(), basis.n());
    out << "edg_lambda_min_Hinv_observed=" << check.observed
        << " reference_1_over_8n=" << check.reference << " ratio=" << check.ratio
        << " within_factor_two=" << check.within_factor_two << '\n';
  }
  if (m != nullptr) {
    CoherenceProfile profile = coherence_profile(*m, basis, dual, rank_tol);
    out << "rank=" << profile.rank << " nu_w=" << profile.nu_w
        << " nu_z=" << profile.nu_z << " nu_joint=" << profile.nu_joint
        << " nu=" << profile.nu << '\n';
    out << "simplified_w: lhs=" << profile.simplified_w.lhs
        << " rhs=" << profile.simplified_w.rhs
        << " holds=" << profile.simplified_w.holds << '\n';
    out << "simplified_z: lhs=" << profile.simplified_z.lhs
        << " rhs=" << profile.simplified_z.rhs
        << " holds=" << profile.simplified_z.holds << '\n';
    out << "simplified_joint: lhs=" << profile.simplified_joint.lhs
        << " rhs=" << profile.simplified_joint.rhs
        << " holds=" << profile.simplified_joint.holds << '\n';
  }
  return out.str();
}

std::string bound_report(const TheoremConstants& tc) {
  std::ostringstream out;
  out.precision(12);
  out << "n=" << tc.n << " r=" << tc.r << " L=" << tc.L << " beta=" << tc.beta
      << " mu=" << tc.mu << " nu=" << tc.nu << '\n';
  out << "C=" << tc.C << " l_real=" << tc.l_real << " l=" << tc.l
      << " kappa_i=" << tc.kappa_i << '\n';
  out << "m_bound=" << tc.m_bound << " (raw " << tc.m_bound_real << ")"
      << " m_i=" << (tc.m_i.empty() ? 0 : tc.m_i.front()) << " x" << tc.l
      << " m_total=" << tc.m_total << '\n';
  const double target =
      std::pow(static_cast<double>(tc.n), -tc.beta) / (4.0 * tc.l);
  out << "per-batch failure target=" << target << '\n';
  out << "p1=" << tc.probabilities.p1;
  if (!tc.probabilities.p2.empty())
    out << " p2=" << tc.probabilities.p2.front()
        << " p3=" << tc.probabilities.p3.front()
        << " p4=" << tc.probabilities.p4.front();
  out << " total=" << tc.probabilities.total << '\n';
  bool ok = tc.probabilities.p1 <= target + 1e-12;
  for (std::size_t i = 0; i < tc.probabilities.p2.size(); ++i)
    ok = ok && tc.probabilities.p2[i] <= target + 1e-12 &&
         tc.probabilities.p3[i] <= target + 1e-12 &&
         tc.probabilities.p4[i] <= target + 1e-12;
  out << "all_probabilities_below_target=" << (ok ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace gmc
