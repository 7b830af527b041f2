#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>

#include "decifuse/rng.hpp"

namespace decifuse {

enum class Hypothesis { H0 = 0, H1 = 1 };

inline int mean_of(Hypothesis h) { return h == Hypothesis::H1 ? 1 : 0; }

// Gaussian sensing field: under Himplies, sensor k observes x_k = l + w_k with
// w_k zero mean, std dev sigma_w[k], and equicorrelated across sensors with
// coefficient rho (one shared latent factor). Sensors 2s-1, 2s form group s.
struct SensingModel {
  double pi0 = 0.5;
  Eigen::VectorXd sigma_w;
  double rho = 0.0;

  int sensors() const { return static_cast<int>(sigma_w.size()); }
  int pairs() const { return sensors() / 2; }
  double pi1() const { return 1.0 - pi0; }
  bool homogeneous() const;
  void validate() const;

  static SensingModel homogeneous_from_snr_c(double snr_c_db, int K, double pi0, double rho = 0.0);
};

// sigma_w from the sensing SNR convention SNR_c = -20 log10 sigma_w.
double sigma_w_from_snr_c(double snr_c_db);

struct ObservationVector {
  Eigen::VectorXd x;
  Hypothesis truth = Hypothesis::H0;
};

struct LocalDecisions {
  Eigen::VectorXi u;                         // initial decisions, +/-1
  std::optional<Eigen::VectorXi> u_hat;      // demodulated partner decisions (STC)
  std::optional<Eigen::VectorXi> u_tilde;    // updated decisions (fusion at sensors)
  std::optional<Eigen::VectorXi> u_bar;      // second decisions (threshold changing)
};

// tau = 0.5 + sigma_w^2 ln(pi0/pi1)
double local_threshold(double sigma_w, double pi0);

// (P_d, P_f) = (Q((tau-1)/sigma_w), Q(tau/sigma_w))
std::pair<double, double> detection_probs(double sigma_w, double tau);

ObservationVector draw_observations(const SensingModel& model, Hypothesis truth, Stream& rng);

// +1 iff x > tau; exact tie decides -1.
inline int local_decide(double x, double tau) { return x > tau ? 1 : -1; }

// P(u_i = +1 | x_j, H_l) for the jointly Gaussian pair (i observed by its own
// sensor, conditioned on partner measurement x_j). Degenerates to P_d / P_f
// when rho = 0.
double prob_u_given_partner_x(double x_j, const SensingModel& model, int i, int j, Hypothesis l);

// log of the sensor-side fusion statistic lambda~_j built from the partner
// signal r_ij (over inter-node channel g_ij, receiver noise power sigma_eta2)
// and own measurement x_j.
double log_lambda_tilde(double x_j, std::complex<double> r_ij, std::complex<double> g_ij,
                        const SensingModel& model, int i, int j, double alpha,
                        double sigma_eta2);

inline double lambda_tilde(double x_j, std::complex<double> r_ij, std::complex<double> g_ij,
                           const SensingModel& model, int i, int j, double alpha,
                           double sigma_eta2) {
  return std::exp(log_lambda_tilde(x_j, r_ij, g_ij, model, i, j, alpha, sigma_eta2));
}

// +1 iff lambda > pi0/pi1 (log-domain comparison); tie decides -1.
inline int fused_decide_log(double log_lambda, double pi0) {
  return log_lambda > std::log(pi0 / (1.0 - pi0)) ? 1 : -1;
}

inline int fused_decide(double lambda, double pi0) {
  return fused_decide_log(std::log(lambda), pi0);
}

// (tau1, tau2) of the uncorrelated threshold-changing rule, from the partner's
// operating point. tau2 < tau < tau1.
std::pair<double, double> threshold_pair_uncorrelated(double sigma_w, double pi0,
                                                      double partner_Pd, double partner_Pf);

// Four-region rule (rho = 0): boundaries fall to the lower region.
std::pair<int, int> threshold_change_decide(double x, double tau, double tau1, double tau2);

// log lambda-bar for the correlated threshold-changing rule: own measurement
// x_i fused with the assumed partner decision u_j = -u_i.
double log_lambda_bar(double x_i, int u_i, const SensingModel& model, int i, int j);

// (u_i, u-bar_i) at any rho; rho = 0 reproduces the four-region rule.
std::pair<int, int> threshold_change_decide_correlated(double x_i, const SensingModel& model,
                                                       int i, int j);

}  // namespace decifuse
