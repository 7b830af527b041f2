#include "decifuse/sensing.hpp"

#include <cmath>
#include <stdexcept>

#include "decifuse/math.hpp"

namespace decifuse {

bool SensingModel::homogeneous() const {
  for (int k = 1; k < sensors(); ++k)
    if (sigma_w(k) != sigma_w(0)) return false;
  return true;
}

void SensingModel::validate() const {
  if (!(pi0 > 0.0 && pi0 < 1.0)) throw std::invalid_argument("pi0 must lie in (0,1)");
  if (sensors() < 2 || sensors() % 2 != 0)
    throw std::invalid_argument("sensor count must be even and >= 2");
  if ((sigma_w.array() <= 0.0).any()) throw std::invalid_argument("sigma_w must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");
}

double sigma_w_from_snr_c(double snr_c_db) { return std::pow(10.0, -snr_c_db / 20.0); }

SensingModel SensingModel::homogeneous_from_snr_c(double snr_c_db, int K, double pi0,
                                                  double rho) {
  SensingModel m;
  m.pi0 = pi0;
  m.rho = rho;
  m.sigma_w = Eigen::VectorXd::Constant(K, sigma_w_from_snr_c(snr_c_db));
  m.validate();
  return m;
}

double local_threshold(double sigma_w, double pi0) {
  if (!(sigma_w > 0.0)) throw std::domain_error("sigma_w must be positive");
  if (!(pi0 > 0.0 && pi0 < 1.0)) throw std::domain_error("pi0 must lie in (0,1)");
  return 0.5 + sigma_w * sigma_w * std::log(pi0 / (1.0 - pi0));
}

std::pair<double, double> detection_probs(double sigma_w, double tau) {
  if (!(sigma_w > 0.0)) throw std::domain_error("sigma_w must be positive");
  return {qfunc((tau - 1.0) / sigma_w), qfunc(tau / sigma_w)};
}

ObservationVector draw_observations(const SensingModel& model, Hypothesis truth, Stream& rng) {
  model.validate();
  const int K = model.sensors();
  const double mean = mean_of(truth);
  const double shared = std::sqrt(model.rho);
  const double own = std::sqrt(1.0 - model.rho);
  const double z0 = rng.normal();
  ObservationVector obs;
  obs.truth = truth;
  obs.x.resize(K);
  for (int k = 0; k < K; ++k)
    obs.x(k) = mean + model.sigma_w(k) * (shared * z0 + own * rng.normal());
  return obs;
}

double prob_u_given_partner_x(double x_j, const SensingModel& model, int i, int j,
                              Hypothesis l) {
  const double si = model.sigma_w(i);
  const double sj = model.sigma_w(j);
  const double rho = model.rho;
  const double tau_i = local_threshold(si, model.pi0);
  const double ratio = rho * si / sj;
  const double mean = mean_of(l) * (1.0 - ratio) + ratio * x_j;
  const double sd = std::sqrt(1.0 - rho * rho) * si;
  return qfunc((tau_i - mean) / sd);
}

double log_lambda_tilde(double x_j, std::complex<double> r_ij, std::complex<double> g_ij,
                        const SensingModel& model, int i, int j, double alpha,
                        double sigma_eta2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
  if (!(sigma_eta2 > 0.0)) throw std::domain_error("sigma_eta2 must be positive");
  const double amp = std::sqrt(1.0 - alpha);
  const double log_f_plus = log_cn_pdf(r_ij, amp * g_ij, sigma_eta2);
  const double log_f_minus = log_cn_pdf(r_ij, -amp * g_ij, sigma_eta2);
  double num, den;
  {
    const double p1 = prob_u_given_partner_x(x_j, model, i, j, Hypothesis::H1);
    num = log_sum_exp(log_f_plus + std::log(p1), log_f_minus + std::log1p(-p1)) +
          log_normal_pdf(x_j, 1.0, model.sigma_w(j) * model.sigma_w(j));
  }
  {
    const double p0 = prob_u_given_partner_x(x_j, model, i, j, Hypothesis::H0);
    den = log_sum_exp(log_f_plus + std::log(p0), log_f_minus + std::log1p(-p0)) +
          log_normal_pdf(x_j, 0.0, model.sigma_w(j) * model.sigma_w(j));
  }
  return num - den;
}

std::pair<double, double> threshold_pair_uncorrelated(double sigma_w, double pi0,
                                                      double partner_Pd, double partner_Pf) {
  if (!(partner_Pf > 0.0 && partner_Pd < 1.0 && partner_Pd > partner_Pf))
    throw std::domain_error("requires 0 < P_f < P_d < 1");
  const double s2 = sigma_w * sigma_w;
  const double prior = std::log(pi0 / (1.0 - pi0));
  const double tau1 = 0.5 + s2 * (std::log((1.0 - partner_Pf) / (1.0 - partner_Pd)) + prior);
  const double tau2 = 0.5 + s2 * (std::log(partner_Pf / partner_Pd) + prior);
  return {tau1, tau2};
}

std::pair<int, int> threshold_change_decide(double x, double tau, double tau1, double tau2) {
  if (!(tau2 < tau && tau < tau1))
    throw std::invalid_argument("threshold ordering tau2 < tau < tau1 violated");
  if (x > tau1) return {1, 1};
  if (x > tau) return {1, -1};
  if (x > tau2) return {-1, 1};
  return {-1, -1};
}

double log_lambda_bar(double x_i, int u_i, const SensingModel& model, int i, int j) {
  const double s2 = model.sigma_w(i) * model.sigma_w(i);
  // P(u_j = -u_i | x_i, H_l), indices swapped relative to prob_u_given_partner_x.
  auto log_p_assumed = [&](Hypothesis l) {
    const double p_plus = prob_u_given_partner_x(x_i, model, j, i, l);
    return u_i == 1 ? std::log1p(-p_plus) : std::log(p_plus);
  };
  const double num = log_p_assumed(Hypothesis::H1) + log_normal_pdf(x_i, 1.0, s2);
  const double den = log_p_assumed(Hypothesis::H0) + log_normal_pdf(x_i, 0.0, s2);
  return num - den;
}

std::pair<int, int> threshold_change_decide_correlated(double x_i, const SensingModel& model,
                                                       int i, int j) {
  const double tau = local_threshold(model.sigma_w(i), model.pi0);
  const int u = local_decide(x_i, tau);
  const int ubar = fused_decide_log(log_lambda_bar(x_i, u, model, i, j), model.pi0);
  return {u, ubar};
}

}  // namespace decifuse
