#include "decifuse/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "decifuse/math.hpp"

namespace decifuse {

bool NetworkConfig::homogeneous() const {
  for (int k = 1; k < sensors(); ++k)
    if (d(k) != d(0)) return false;
  for (int s = 1; s < pairs(); ++s)
    if (d0(s) != d0(0)) return false;
  return true;
}

void NetworkConfig::validate(bool needs_alpha) const {
  if (!(P > 0.0 && G > 0.0 && sigma_v2 > 0.0 && sigma_eta2 > 0.0))
    throw std::invalid_argument("powers and gains must be positive");
  if (sensors() < 2 || sensors() % 2 != 0)
    throw std::invalid_argument("sensor count must be even and >= 2");
  if (pairs() * 2 != sensors()) throw std::invalid_argument("d0 must hold one entry per pair");
  if ((d.array() <= 0.0).any() || (d0.array() <= 0.0).any())
    throw std::invalid_argument("distances must be positive");
  if (needs_alpha && !(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
}

NetworkConfig NetworkConfig::homogeneous_from_snr(double snr_h_db, int K, double alpha,
                                                  double d_m, double d0_m, double epsilon,
                                                  double G_db, double noise_dbm) {
  NetworkConfig c;
  c.G = db_to_linear(G_db);
  c.epsilon = epsilon;
  c.sigma_v2 = dbm_to_mw(noise_dbm);
  c.sigma_eta2 = c.sigma_v2;
  c.d = Eigen::VectorXd::Constant(K, d_m);
  c.d0 = Eigen::VectorXd::Constant(K / 2, d0_m);
  c.alpha = alpha;
  const double gamma = db_to_linear(snr_h_db);
  c.P = gamma * c.sigma_v2 * std::pow(d_m, epsilon) / c.G;
  return c;
}

double snr_h_db(const NetworkConfig& config, int k) { return linear_to_db(config.gamma_h(k)); }

double internode_snr(const NetworkConfig& config, int s) {
  return (1.0 - config.alpha) * config.sigma_hs2(s) / config.sigma_eta2;
}

cd draw_complex_gaussian(double var, Stream& rng) {
  if (!(var > 0.0)) throw std::domain_error("variance must be positive");
  return rng.complex_gaussian(var);
}

ChannelRealization draw_channels(const NetworkConfig& config, bool with_internode,
                                 Stream& rng) {
  ChannelRealization ch;
  const int K = config.sensors();
  ch.h.resize(K);
  for (int k = 0; k < K; ++k) ch.h(k) = rng.complex_gaussian(config.sigma_h2(k));
  if (with_internode) {
    const int S = config.pairs();
    ch.g.resize(2 * S);
    for (int s = 0; s < S; ++s) {
      ch.g(2 * s) = rng.complex_gaussian(config.sigma_hs2(s));      // g_ij
      ch.g(2 * s + 1) = rng.complex_gaussian(config.sigma_hs2(s));  // g_ji
    }
  }
  return ch;
}

cd internode_receive(int u_i, double alpha, cd g_ij, double sigma_eta2, Stream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
  return std::sqrt(1.0 - alpha) * static_cast<double>(u_i) * g_ij +
         rng.complex_gaussian(sigma_eta2);
}

int internode_demod(cd r_ij, cd g_ij) {
  if (g_ij == cd(0.0, 0.0)) throw std::domain_error("degenerate inter-node channel g = 0");
  return std::real(r_ij / g_ij) > 0.0 ? 1 : -1;
}

double demod_error_prob(double gamma_hs) {
  if (gamma_hs < 0.0) throw std::domain_error("gamma must be nonnegative");
  return 0.5 * (1.0 - std::sqrt(gamma_hs / (1.0 + gamma_hs)));
}

cd parallel_receive(double symbol, cd h, double sigma_v2, Stream& rng) {
  return symbol * h + rng.complex_gaussian(sigma_v2);
}

std::pair<cd, cd> alamouti_receive(double s1_slotA, double s2_slotA, double s1_slotB,
                                   double s2_slotB, cd h_i, cd h_j, double sigma_v2,
                                   Stream& rng) {
  const cd y_n = s1_slotA * h_i + s2_slotA * h_j + rng.complex_gaussian(sigma_v2);
  const cd y_np1 = s1_slotB * h_i + s2_slotB * h_j + rng.complex_gaussian(sigma_v2);
  return {y_n, y_np1};
}

AlamoutiCombined alamouti_combine(cd y_n, cd y_np1, cd h_i, cd h_j, double sigma_v2) {
  AlamoutiCombined out;
  out.z_i = std::conj(h_i) * y_n + h_j * std::conj(y_np1);
  out.z_j = std::conj(h_j) * y_n - h_i * std::conj(y_np1);
  out.sigma2_eff = (std::norm(h_i) + std::norm(h_j)) * sigma_v2;
  return out;
}

}  // namespace decifuse
