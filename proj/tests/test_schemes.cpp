#include "decifuse/schemes.hpp"

#include <cmath>

#include "decifuse/math.hpp"
#include "doctest.h"

using namespace decifuse;

namespace {

SensingModel sensing_k(int K, double sigma_w, double pi0, double rho = 0.0) {
  SensingModel m;
  m.pi0 = pi0;
  m.rho = rho;
  m.sigma_w = Eigen::VectorXd::Constant(K, sigma_w);
  return m;
}

// near-noiseless network: huge SNR everywhere
NetworkConfig quiet_net(int K, double alpha = 0.5) {
  NetworkConfig c;
  c.P = 1.0;
  c.G = 1.0;
  c.epsilon = 2.0;
  c.d = Eigen::VectorXd::Constant(K, 1.0);
  c.d0 = Eigen::VectorXd::Constant(K / 2, 1.0);
  c.sigma_v2 = 1e-20;
  c.sigma_eta2 = 1e-20;
  c.alpha = alpha;
  return c;
}

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (SchemeKind s : {SchemeKind::Parallel, SchemeKind::StcAtSensors,
                       SchemeKind::FusionAtSensors, SchemeKind::ThresholdChanging})
    CHECK(scheme_from_name(scheme_name(s)) == s);
  CHECK_THROWS_AS(scheme_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("noiseless trials under H1 give all-plus decisions and mean-level signals") {
  const int K = 4;
  // small enough that wrong local decisions have ~1e-10 odds, large enough
  // that both Q-function tails stay representable
  const SensingModel sm = sensing_k(K, 0.08, 0.6);
  const NetworkConfig net = quiet_net(K);
  Stream rng = make_stream(1, 0, 0);
  for (SchemeKind scheme : {SchemeKind::Parallel, SchemeKind::StcAtSensors,
                            SchemeKind::FusionAtSensors, SchemeKind::ThresholdChanging}) {
    TrialRecord rec = run_trial(scheme, sm, net, Hypothesis::H1, rng);
    for (int k = 0; k < K; ++k) CHECK(rec.decisions.u(k) == 1);
    if (rec.decisions.u_hat)
      for (int k = 0; k < K; ++k) CHECK((*rec.decisions.u_hat)(k) == 1);
    if (rec.decisions.u_tilde)
      for (int k = 0; k < K; ++k) CHECK((*rec.decisions.u_tilde)(k) == 1);
    if (rec.decisions.u_bar)
      for (int k = 0; k < K; ++k) CHECK((*rec.decisions.u_bar)(k) == 1);
    if (scheme == SchemeKind::Parallel) {
      for (int k = 0; k < K; ++k)
        CHECK(std::abs(rec.fc_signals.y(k) - rec.channels.h(k)) < 1e-8);
    } else if (scheme == SchemeKind::FusionAtSensors) {
      for (int k = 0; k < K; ++k)
        CHECK(std::abs(rec.fc_signals.y(k) - std::sqrt(net.alpha) * rec.channels.h(k)) < 1e-8);
    } else {
      // combined statistics sit at their conditional means
      const double amp =
          scheme == SchemeKind::StcAtSensors ? std::sqrt(net.alpha / 2.0) : 1.0 / std::sqrt(2.0);
      for (int s = 0; s < K / 2; ++s) {
        const cd h_i = rec.channels.h(2 * s), h_j = rec.channels.h(2 * s + 1);
        const double h2 = std::norm(h_i) + std::norm(h_j);
        CHECK(std::abs(rec.fc_signals.pairs[s].z_a - amp * h2) < 1e-8);
        CHECK(std::abs(rec.fc_signals.pairs[s].z_b - amp * h2) < 1e-8);
        CHECK(rec.fc_signals.pairs[s].sigma2_eff == doctest::Approx(h2 * net.sigma_v2));
      }
    }
  }
}

TEST_CASE("STC with error-free exchange reproduces the classical Alamouti model") {
  // alpha = 1/2, forced uhat = u: z_i = sqrt(alpha/2)(|h_i|^2+|h_j|^2) u_i + noise
  const int K = 2;
  const SensingModel sm = sensing_k(K, 1e-3, 0.6);
  NetworkConfig net = quiet_net(K, 0.5);
  net.sigma_eta2 = 1e-30;  // exchange is error-free
  Stream rng = make_stream(2, 0, 0);
  for (int rep = 0; rep < 50; ++rep) {
    TrialRecord rec = run_trial(SchemeKind::StcAtSensors, sm, net, Hypothesis::H1, rng);
    CHECK((*rec.decisions.u_hat)(0) == rec.decisions.u(0));
    CHECK((*rec.decisions.u_hat)(1) == rec.decisions.u(1));
    const double h2 = std::norm(rec.channels.h(0)) + std::norm(rec.channels.h(1));
    const cd expect_i = std::sqrt(net.alpha / 2.0) * h2 * static_cast<double>(rec.decisions.u(0));
    CHECK(std::abs(rec.fc_signals.pairs[0].z_a - expect_i) < 1e-8);
  }
}

TEST_CASE("within-trial demod errors match the closed form") {
  const int K = 2;
  const SensingModel sm = sensing_k(K, 1.0, 0.6);
  NetworkConfig net;
  net.P = 1.0;
  net.G = 1.0;
  net.epsilon = 2.0;
  net.d = Eigen::VectorXd::Constant(K, 1.0);
  net.d0 = Eigen::VectorXd::Constant(1, 1.0);
  net.sigma_v2 = 1.0;
  net.sigma_eta2 = 0.25;  // gamma_hs = (1-alpha)/0.25 = 2 at alpha = 0.5
  net.alpha = 0.5;
  const double gamma = internode_snr(net, 0);
  CHECK(gamma == doctest::Approx(2.0));
  long errs = 0;
  const long n = 300000;
  for (long i = 0; i < n; ++i) {
    Stream rng = make_stream(99, 0, i);
    TrialRecord rec = run_trial(SchemeKind::StcAtSensors, sm, net, Hypothesis::H1, rng);
    errs += (*rec.decisions.u_hat)(0) != rec.decisions.u(0);
  }
  const double p = demod_error_prob(gamma);
  const double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(errs) / n - p) < 4.0 * se);
}

TEST_CASE("threshold-changing joint (u, ubar) frequencies match interval probabilities") {
  const int K = 2;
  const SensingModel sm = sensing_k(K, 1.0, 0.6);
  const NetworkConfig net = quiet_net(K);
  const double tau = local_threshold(1.0, 0.6);
  const auto [pd, pf] = detection_probs(1.0, tau);
  const auto [t1, t2] = threshold_pair_uncorrelated(1.0, 0.6, pd, pf);
  std::array<long, 4> counts{};
  const long n = 200000;
  for (long i = 0; i < n; ++i) {
    Stream rng = make_stream(55, 0, i);
    TrialRecord rec = run_trial(SchemeKind::ThresholdChanging, sm, net, Hypothesis::H0, rng);
    counts[node_case(rec.decisions.u(0), (*rec.decisions.u_bar)(0))]++;
  }
  const std::array<double, 4> expect{qfunc(t1), qfunc(tau) - qfunc(t1),
                                     qfunc(t2) - qfunc(tau), 1.0 - qfunc(t2)};
  for (int c = 0; c < 4; ++c) {
    const double freq = static_cast<double>(counts[c]) / n;
    const double se = std::sqrt(expect[c] * (1.0 - expect[c]) / n);
    CHECK(std::abs(freq - expect[c]) < 4.0 * se);
  }
}

TEST_CASE("per-trial energy accounting matches the power-split statements") {
  // Two FC slots at sqrt(alpha/2) plus one exchange at sqrt(1-alpha) spend P
  // in the STC scheme; threshold spends P over two slots at 1/sqrt(2);
  // fusion spends alpha P at the FC and (1-alpha) P on the exchange.
  const double alpha = 0.65;
  const PairTx stc = pair_tx_stc(stc16_index(1, 1, 1, 1), alpha);
  CHECK(2.0 * stc.amp * stc.amp + (1.0 - alpha) == doctest::Approx(1.0));
  const PairTx thr = pair_tx_threshold(thr16_index(0, 0));
  CHECK(2.0 * thr.amp * thr.amp == doctest::Approx(1.0));
  CHECK(alpha + (1.0 - alpha) == doctest::Approx(1.0));
}

TEST_CASE("pair_means matches the explicit decode algebra") {
  Stream rng = make_stream(6, 2, 8);
  for (int rep = 0; rep < 200; ++rep) {
    const cd h_i = rng.complex_gaussian(1.0);
    const cd h_j = rng.complex_gaussian(1.0);
    const int st = static_cast<int>(rng.next() % 16);
    for (bool stc : {true, false}) {
      const PairTx tx = stc ? pair_tx_stc(st, 0.7) : pair_tx_threshold(st);
      // transmit noiselessly, then combine
      const cd y_n = tx.amp * (static_cast<double>(tx.p_i) * h_i + static_cast<double>(tx.p_j) * h_j);
      const cd y_np1 =
          tx.amp * (-static_cast<double>(tx.q_i) * h_i + static_cast<double>(tx.q_j) * h_j);
      const auto comb = alamouti_combine(y_n, y_np1, h_i, h_j, 1.0);
      const auto [mu_i, mu_j] = pair_means(tx, h_i, h_j);
      CHECK(std::abs(comb.z_i - mu_i) < 1e-12);
      CHECK(std::abs(comb.z_j - mu_j) < 1e-12);
    }
  }
}

TEST_CASE("odd sensor counts and bad alpha are rejected") {
  const SensingModel sm = sensing_k(4, 1.0, 0.6);
  NetworkConfig net = quiet_net(4);
  net.alpha = 1.2;
  Stream rng = make_stream(7, 0, 0);
  CHECK_THROWS_AS(run_trial(SchemeKind::StcAtSensors, sm, net, Hypothesis::H0, rng),
                  std::invalid_argument);
  CHECK_NOTHROW(run_trial(SchemeKind::Parallel, sm, net, Hypothesis::H0, rng));
  const SensingModel sm6 = sensing_k(6, 1.0, 0.6);
  CHECK_THROWS_AS(run_trial(SchemeKind::Parallel, sm6, quiet_net(4), Hypothesis::H0, rng),
                  std::invalid_argument);
}
