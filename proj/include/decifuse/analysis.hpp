#pragma once

#include <array>
#include <functional>

#include "decifuse/fusion.hpp"

namespace decifuse {

// Operating point for the bound machinery: identical sensors, uncorrelated
// sensing noise, equal distances.
struct HomogeneousOperatingPoint {
  double Pd = 0.0;
  double Pf = 0.0;
  double pi0 = 0.5;
  int K = 2;
  double gamma_h = 1.0;   // linear average sensor-to-FC SNR
  double gamma_hs = 1.0;  // linear average inter-node SNR (STC, fusion)
  double alpha = 0.5;     // power split (STC, fusion)

  void validate() const;
  static HomogeneousOperatingPoint from_snr(SchemeKind scheme, double snr_c_db,
                                            double snr_h_db, double pi0, int K,
                                            double alpha = 0.5, double d_m = 10.0,
                                            double d0_m = 2.0, double epsilon = 2.0);
};

struct BoundResult {
  double pe1 = 0.0;  // bound on the H0-side average error
  double pe2 = 0.0;  // bound on the H1-side average error
  double pe = 0.0;   // pe1 + pe2
  double e1_chernoff = 0.0, e1_indicator = 0.0;
  double e2_chernoff = 0.0, e2_indicator = 0.0;
  double t_star = 0.3;
  int M = -1;  // vote threshold (Parallel/STC); -1 for sign-based schemes
};

enum class BoundAggregation { Auto, Enumerate, DynamicProgramming };

// Smallest M with (Pd/Pf)^M ((1-Pd)/(1-Pf))^(K-M) > pi0/pi1; throws when no
// M in [0, K] crosses.
int find_M(double Pd, double Pf, double pi0, int K);

// Error-free-channel average error of the parallel architecture.
double error_floor(double Pd, double Pf, double pi0, int K);

BoundResult bound_parallel(const HomogeneousOperatingPoint& op,
                           BoundAggregation agg = BoundAggregation::Auto);
BoundResult bound_stc(const HomogeneousOperatingPoint& op,
                      BoundAggregation agg = BoundAggregation::Auto);
// prior must be a rho = 0 fusion prior (single grid node); its pair table
// supplies P(u~ pair | H_l).
BoundResult bound_fusion(const HomogeneousOperatingPoint& op, const DecisionPrior& prior,
                         BoundAggregation agg = BoundAggregation::Auto);
// four_state_d / four_state_f: the node-case probabilities (P_d1..P_d4),
// (P_f1..P_f4) of the threshold-changing rule under H1 / H0.
BoundResult bound_threshold(const HomogeneousOperatingPoint& op,
                            const Eigen::Vector4d& four_state_d,
                            const Eigen::Vector4d& four_state_f,
                            BoundAggregation agg = BoundAggregation::Auto);

// Closed-form node-case probabilities of the threshold-changing rule at
// rho = 0 (intervals of the four-region test).
std::pair<Eigen::Vector4d, Eigen::Vector4d> threshold_four_state_probs(double sigma_w,
                                                                       double pi0);

// Error-free-FC average error of a scheme (indicator terms of its bound).
double scheme_error_floor_parallel(const HomogeneousOperatingPoint& op);
double scheme_error_floor_fusion(const HomogeneousOperatingPoint& op,
                                 const DecisionPrior& prior);
double scheme_error_floor_threshold(const HomogeneousOperatingPoint& op,
                                    const Eigen::Vector4d& four_state_d,
                                    const Eigen::Vector4d& four_state_f);

// Grid search on t in {0.01, 0.02, ..., 0.99}; ties resolve to the smaller t.
std::pair<double, double> minimize_t(const std::function<double(double)>& bound_curve);

// log E{exp(-s K)} over the Rayleigh fade, where K is the normalized signal
// mismatch between two per-pair decision states.  The D1 factors use s = 1/4,
// the D2 factors s = t - t^2.  State indices follow the scheme's alphabet
// (4 states for Parallel/Fusion, 16 for STC/Threshold).
double log_d_factor(SchemeKind scheme, double alpha, double gamma_h, double s, int state_a,
                    int state_a1);

struct ExponentTerm {
  double mu = 0.0;
  double sigma2 = 0.0;
  double kappa = 0.0;
  double rate = 0.0;  // e11/e21: -(mu + sigma2/2); e12/e22: mu^2 / (2 sigma2)
};

struct ExponentReport {
  std::array<ExponentTerm, 4> terms;  // order: e11, e12, e21, e22
  double gamma_x = 0.0;               // min of the four rates
  double t0 = 0.3;
  bool e11_mean_ok = false;  // mu_11 + sigma2_11/2 < 0
  bool e21_mean_ok = false;  // mu_21 + sigma2_21/2 < 0
};

ExponentReport asymptotics_parallel(const HomogeneousOperatingPoint& op);
ExponentReport asymptotics_stc(const HomogeneousOperatingPoint& op);
ExponentReport asymptotics_fusion(const HomogeneousOperatingPoint& op,
                                  const DecisionPrior& prior);
ExponentReport asymptotics_threshold(const HomogeneousOperatingPoint& op,
                                     const Eigen::Vector4d& four_state_d,
                                     const Eigen::Vector4d& four_state_f);

}  // namespace decifuse
