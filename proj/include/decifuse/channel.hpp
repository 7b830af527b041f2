#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "decifuse/rng.hpp"

namespace decifuse {

using cd = std::complex<double>;

// Geometry, power and noise bookkeeping. Powers are held in linear mW; dB/dBm
// conversions happen only at the construction boundary.
struct NetworkConfig {
  double P = 1.0;             // transmit power per sensor, mW
  double G = 1e-3;            // antenna/wavelength constant, linear
  double epsilon = 2.0;       // pathloss exponent
  Eigen::VectorXd d;          // sensor-to-FC distances, m (size K)
  Eigen::VectorXd d0;         // intra-pair distances, m (size S)
  double sigma_v2 = 1e-5;     // FC receiver noise power, mW
  double sigma_eta2 = 1e-5;   // sensor receiver noise power, mW
  double alpha = 0.5;         // power split, schemes with inter-node exchange

  int sensors() const { return static_cast<int>(d.size()); }
  int pairs() const { return static_cast<int>(d0.size()); }

  double sigma_h2(int k) const { return P * G / std::pow(d(k), epsilon); }
  double sigma_hs2(int s) const { return P * G / std::pow(d0(s), epsilon); }
  double gamma_h(int k) const { return sigma_h2(k) / sigma_v2; }
  bool homogeneous() const;
  void validate(bool needs_alpha) const;

  // Paper-style defaults: d = 10 m, d0 = 2 m, epsilon = 2, G = -30 dB,
  // sigma_v^2 = sigma_eta^2 = -50 dBm; P solved so that SNR_h matches.
  static NetworkConfig homogeneous_from_snr(double snr_h_db, int K, double alpha = 0.5,
                                            double d_m = 10.0, double d0_m = 2.0,
                                            double epsilon = 2.0, double G_db = -30.0,
                                            double noise_dbm = -50.0);
};

double snr_h_db(const NetworkConfig& config, int k);

// Average received inter-node SNR (1-alpha) sigma_hs^2 / sigma_eta^2.
double internode_snr(const NetworkConfig& config, int s);

struct ChannelRealization {
  Eigen::VectorXcd h;  // sensor-to-FC, size K
  Eigen::VectorXcd g;  // inter-node, size 2S: (g_ij, g_ji) per pair
};

struct PairSignal {
  cd y_n;             // slot n at the FC
  cd y_np1;           // slot n+1 at the FC
  cd z_a;             // combined statistic for node 2s-1
  cd z_b;             // combined statistic for node 2s
  double sigma2_eff;  // (|h_a|^2 + |h_b|^2) sigma_v^2
};

struct FcSignals {
  Eigen::VectorXcd y;            // per-sensor signals (parallel, fusion)
  std::vector<PairSignal> pairs;  // per-pair signals (STC, threshold)
};

cd draw_complex_gaussian(double var, Stream& rng);

ChannelRealization draw_channels(const NetworkConfig& config, bool with_internode, Stream& rng);

// r_ij = sqrt(1-alpha) u_i g_ij + eta, eta ~ CN(0, sigma_eta2)
cd internode_receive(int u_i, double alpha, cd g_ij, double sigma_eta2, Stream& rng);

// sign(Re(r/g)); zero decides -1.
int internode_demod(cd r_ij, cd g_ij);

// P(u-hat != u) over fading and noise: (1 - sqrt(gamma/(1+gamma)))/2
double demod_error_prob(double gamma_hs);

// y = symbol h + v, v ~ CN(0, sigma_v2)
cd parallel_receive(double symbol, cd h, double sigma_v2, Stream& rng);

// Two Alamouti slots: y_n = s1A h_i + s2A h_j + v_n, y_{n+1} = s1B h_i + s2B h_j + v_{n+1}
std::pair<cd, cd> alamouti_receive(double s1_slotA, double s2_slotA, double s1_slotB,
                                   double s2_slotB, cd h_i, cd h_j, double sigma_v2,
                                   Stream& rng);

// z_i = h_i^* y_n + h_j y_{n+1}^*, z_j = h_j^* y_n - h_i y_{n+1}^*
struct AlamoutiCombined {
  cd z_i;
  cd z_j;
  double sigma2_eff;
};
AlamoutiCombined alamouti_combine(cd y_n, cd y_np1, cd h_i, cd h_j, double sigma_v2);

}  // namespace decifuse
