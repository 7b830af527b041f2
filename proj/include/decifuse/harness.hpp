#pragma once

#include <optional>
#include <string>
#include <vector>

#include "decifuse/analysis.hpp"

namespace decifuse {

enum class Rule { Lrt, Majority };
const char* rule_name(Rule r);
Rule rule_from_name(const std::string& name);

struct ErrorEstimate {
  double pe_hat = 0.0;
  double stderr_ = 0.0;
  long trials = 0;
  double pe_h0 = 0.0;  // estimate of P(error | H0)
  double pe_h1 = 0.0;  // estimate of P(error | H1)
  long n0 = 0, n1 = 0, err0 = 0, err1 = 0;

  double ci_lo(double z = 1.96) const { return pe_hat - z * stderr_; }
  double ci_hi(double z = 1.96) const { return pe_hat + z * stderr_; }
};

// Number of worker threads: explicit > 0 wins; otherwise DECIFUSE_THREADS,
// 0 or unset meaning all hardware threads.
int resolve_threads(int requested = 0);

// Deterministic cell identifier derived from the cell's physical content, so
// estimates do not depend on grid layout or worker count.
std::uint64_t cell_id(SchemeKind scheme, Rule rule, const SensingModel& sensing,
                      const NetworkConfig& net);

ErrorEstimate estimate_pe(SchemeKind scheme, Rule rule, const SensingModel& sensing,
                          const NetworkConfig& net, long trials, std::uint64_t master_seed,
                          const DecisionPrior* prior = nullptr, int threads = 0);

struct AlphaSweepRow {
  double alpha;
  ErrorEstimate estimate;
};

struct AlphaSweepResult {
  std::vector<AlphaSweepRow> rows;
  double alpha_star = 0.0;
};

std::vector<double> default_alpha_grid(double step = 0.05);

AlphaSweepResult sweep_alpha(SchemeKind scheme, Rule rule, const SensingModel& sensing,
                             const NetworkConfig& net, const std::vector<double>& alpha_grid,
                             long trials, std::uint64_t master_seed,
                             PriorMethod prior_method = PriorMethod::MonteCarlo,
                             long prior_samples = 1000000, int threads = 0);

struct ExperimentConfig {
  std::vector<SchemeKind> schemes;
  std::vector<Rule> rules;
  std::vector<double> snr_c_db;
  std::vector<double> snr_h_db;
  double rho = 0.0;
  double pi0 = 0.6;
  int K = 10;
  std::vector<double> alpha;  // empty means "auto" (sweep per cell)
  bool alpha_auto = false;
  long trials = 1000000;
  long sweep_trials = 200000;
  double alpha_grid_step = 0.05;
  std::uint64_t master_seed = 1;
  PriorMethod prior_method = PriorMethod::MonteCarlo;
  long prior_samples = 1000000;
  std::string output;

  // Geometry defaults
  double d_m = 10.0, d0_m = 2.0, epsilon = 2.0, G_db = -30.0, noise_dbm = -50.0;

  void validate() const;
};

struct ResultRow {
  SchemeKind scheme;
  Rule rule;
  int K;
  double rho, pi0, snr_c_db, snr_h_db;
  std::optional<double> alpha;
  long trials;
  double pe_hat, stderr_;
  std::optional<double> pe_bound;
  std::optional<double> floor;
  std::uint64_t seed;
};

std::string csv_header();
std::string csv_line(const ResultRow& row);

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, int threads = 0);

}  // namespace decifuse
