#include "decifuse/schemes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace decifuse {

const char* scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::Parallel: return "parallel";
    case SchemeKind::StcAtSensors: return "stc";
    case SchemeKind::FusionAtSensors: return "fusion";
    case SchemeKind::ThresholdChanging: return "threshold";
  }
  return "?";
}

SchemeKind scheme_from_name(const std::string& name) {
  if (name == "parallel") return SchemeKind::Parallel;
  if (name == "stc") return SchemeKind::StcAtSensors;
  if (name == "fusion") return SchemeKind::FusionAtSensors;
  if (name == "threshold") return SchemeKind::ThresholdChanging;
  throw std::invalid_argument("unknown scheme: " + name);
}

PairTx pair_tx_stc(int state16, double alpha) {
  const auto s = stc16_symbols(state16);
  // slot n: (u_i, u_j); slot n+1: (-uhat_j, uhat_i)
  return {std::sqrt(alpha / 2.0), s[0], s[3], s[1], s[2]};
}

PairTx pair_tx_threshold(int state16) {
  const auto ci = node_case_symbols(state16 / 4);
  const auto cj = node_case_symbols(state16 % 4);
  // slot n: (u_i, ubar_j); slot n+1: (-ubar_i, u_j)
  return {1.0 / std::numbers::sqrt2, ci[0], ci[1], cj[1], cj[0]};
}

std::pair<cd, cd> pair_means(const PairTx& tx, cd h_i, cd h_j) {
  const double A = std::norm(h_i);
  const double B = std::norm(h_j);
  const cd C = std::conj(h_i) * h_j;
  const cd mu_i = tx.amp * (A * static_cast<double>(tx.p_i) + C * static_cast<double>(tx.p_j) -
                            C * static_cast<double>(tx.q_i) + B * static_cast<double>(tx.q_j));
  const cd mu_j =
      tx.amp * (std::conj(C) * static_cast<double>(tx.p_i) + B * static_cast<double>(tx.p_j) +
                A * static_cast<double>(tx.q_i) - std::conj(C) * static_cast<double>(tx.q_j));
  return {mu_i, mu_j};
}

namespace {

Eigen::VectorXd local_thresholds(const SensingModel& sensing) {
  Eigen::VectorXd tau(sensing.sensors());
  for (int k = 0; k < sensing.sensors(); ++k)
    tau(k) = local_threshold(sensing.sigma_w(k), sensing.pi0);
  return tau;
}

}  // namespace

TrialRecord run_trial(SchemeKind scheme, const SensingModel& sensing, const NetworkConfig& net,
                      Hypothesis truth, Stream& rng, const Eigen::VectorXcd* fixed_fc_channel) {
  sensing.validate();
  net.validate(scheme_uses_alpha(scheme));
  if (sensing.sensors() != net.sensors())
    throw std::invalid_argument("sensing/network sensor counts differ");

  const int K = sensing.sensors();
  const int S = K / 2;
  const bool internode = scheme_uses_alpha(scheme);

  TrialRecord rec;
  rec.truth = truth;
  rec.observations = draw_observations(sensing, truth, rng);
  rec.channels = draw_channels(net, internode, rng);
  if (fixed_fc_channel) rec.channels.h = *fixed_fc_channel;

  const Eigen::VectorXd tau = local_thresholds(sensing);
  rec.decisions.u.resize(K);
  for (int k = 0; k < K; ++k) rec.decisions.u(k) = local_decide(rec.observations.x(k), tau(k));

  const auto& h = rec.channels.h;
  const auto& x = rec.observations.x;
  const auto& u = rec.decisions.u;

  switch (scheme) {
    case SchemeKind::Parallel: {
      rec.fc_signals.y.resize(K);
      for (int k = 0; k < K; ++k)
        rec.fc_signals.y(k) = parallel_receive(u(k), h(k), net.sigma_v2, rng);
      break;
    }
    case SchemeKind::StcAtSensors: {
      rec.decisions.u_hat.emplace(K);
      rec.fc_signals.pairs.resize(S);
      const double amp = std::sqrt(net.alpha / 2.0);
      for (int s = 0; s < S; ++s) {
        const int i = 2 * s, j = 2 * s + 1;
        const cd g_ij = rec.channels.g(2 * s), g_ji = rec.channels.g(2 * s + 1);
        const cd r_ij = internode_receive(u(i), net.alpha, g_ij, net.sigma_eta2, rng);
        const cd r_ji = internode_receive(u(j), net.alpha, g_ji, net.sigma_eta2, rng);
        const int uhat_i = internode_demod(r_ij, g_ij);  // at node j
        const int uhat_j = internode_demod(r_ji, g_ji);  // at node i
        (*rec.decisions.u_hat)(i) = uhat_i;
        (*rec.decisions.u_hat)(j) = uhat_j;
        auto [y_n, y_np1] = alamouti_receive(amp * u(i), amp * u(j), -amp * uhat_j,
                                             amp * uhat_i, h(i), h(j), net.sigma_v2, rng);
        const auto comb = alamouti_combine(y_n, y_np1, h(i), h(j), net.sigma_v2);
        rec.fc_signals.pairs[s] = {y_n, y_np1, comb.z_i, comb.z_j, comb.sigma2_eff};
      }
      break;
    }
    case SchemeKind::FusionAtSensors: {
      rec.decisions.u_tilde.emplace(K);
      rec.fc_signals.y.resize(K);
      const double amp = std::sqrt(net.alpha);
      for (int s = 0; s < S; ++s) {
        const int i = 2 * s, j = 2 * s + 1;
        const cd g_ij = rec.channels.g(2 * s), g_ji = rec.channels.g(2 * s + 1);
        const cd r_ij = internode_receive(u(i), net.alpha, g_ij, net.sigma_eta2, rng);
        const cd r_ji = internode_receive(u(j), net.alpha, g_ji, net.sigma_eta2, rng);
        (*rec.decisions.u_tilde)(j) = fused_decide_log(
            log_lambda_tilde(x(j), r_ij, g_ij, sensing, i, j, net.alpha, net.sigma_eta2),
            sensing.pi0);
        (*rec.decisions.u_tilde)(i) = fused_decide_log(
            log_lambda_tilde(x(i), r_ji, g_ji, sensing, j, i, net.alpha, net.sigma_eta2),
            sensing.pi0);
      }
      for (int k = 0; k < K; ++k)
        rec.fc_signals.y(k) =
            parallel_receive(amp * (*rec.decisions.u_tilde)(k), h(k), net.sigma_v2, rng);
      break;
    }
    case SchemeKind::ThresholdChanging: {
      rec.decisions.u_bar.emplace(K);
      rec.fc_signals.pairs.resize(S);
      const double amp = 1.0 / std::numbers::sqrt2;
      for (int s = 0; s < S; ++s) {
        const int i = 2 * s, j = 2 * s + 1;
        for (int k : {i, j}) {
          const int partner = (k == i) ? j : i;
          if (sensing.rho == 0.0) {
            const auto [pd, pf] = detection_probs(sensing.sigma_w(partner), tau(partner));
            const auto [t1, t2] =
                threshold_pair_uncorrelated(sensing.sigma_w(k), sensing.pi0, pd, pf);
            auto [uk, ubark] = threshold_change_decide(x(k), tau(k), t1, t2);
            rec.decisions.u(k) = uk;
            (*rec.decisions.u_bar)(k) = ubark;
          } else {
            auto [uk, ubark] = threshold_change_decide_correlated(x(k), sensing, k, partner);
            rec.decisions.u(k) = uk;
            (*rec.decisions.u_bar)(k) = ubark;
          }
        }
        const auto& ub = *rec.decisions.u_bar;
        auto [y_n, y_np1] = alamouti_receive(amp * u(i), amp * ub(j), -amp * ub(i), amp * u(j),
                                             h(i), h(j), net.sigma_v2, rng);
        const auto comb = alamouti_combine(y_n, y_np1, h(i), h(j), net.sigma_v2);
        rec.fc_signals.pairs[s] = {y_n, y_np1, comb.z_i, comb.z_j, comb.sigma2_eff};
      }
      break;
    }
  }
  return rec;
}

}  // namespace decifuse
