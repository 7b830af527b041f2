#include "decifuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "decifuse/math.hpp"

namespace decifuse {

int prior_states(SchemeKind scheme) {
  return scheme == SchemeKind::ThresholdChanging ? 16 : 4;
}

int DecisionPrior::n_states() const { return prior_states(scheme); }

void DecisionPrior::validate() const {
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("prior grid weights must sum to 1");
  for (int hyp = 0; hyp < 2; ++hyp)
    for (const auto& table : tables[hyp]) {
      if (table.rows() != n_nodes() || table.cols() != n_states())
        throw std::invalid_argument("prior table shape mismatch");
      for (int g = 0; g < table.rows(); ++g)
        if (std::abs(table.row(g).sum() - 1.0) > 1e-9)
          throw std::invalid_argument("prior table row does not sum to 1");
    }
  if (scheme == SchemeKind::StcAtSensors &&
      internode_flip.size() != static_cast<Eigen::Index>(tables[0].size()))
    throw std::invalid_argument("missing inter-node flip probabilities");
}

namespace {

// P(u_k = +1 | z0, H_l) for the one-factor correlated sensing field.
double prob_u_plus_given_z0(const SensingModel& sensing, int k, double z0, Hypothesis l) {
  const double sw = sensing.sigma_w(k);
  const double tau = local_threshold(sw, sensing.pi0);
  const double mean = mean_of(l) + sw * std::sqrt(sensing.rho) * z0;
  const double sd = sw * std::sqrt(1.0 - sensing.rho);
  return qfunc((tau - mean) / sd);
}

Eigen::Vector4d pair4_table_from_marginals(double p_i_plus, double p_j_plus) {
  Eigen::Vector4d t;
  for (int idx = 0; idx < 4; ++idx) {
    const auto s = pair4_symbols(idx);
    t(idx) = (s[0] == 1 ? p_i_plus : 1.0 - p_i_plus) * (s[1] == 1 ? p_j_plus : 1.0 - p_j_plus);
  }
  return t;
}

// Threshold-changing node-case probabilities under N(mean, sd^2).  The second
// decision is evaluated pointwise through log_lambda_bar, so the correlated
// rule needs no closed-form thresholds: case boundaries are located by a scan
// plus bisection inside each u-branch.
Eigen::Vector4d threshold_case_probs(const SensingModel& sensing, int k, int partner,
                                     double mean, double sd, Hypothesis l) {
  Eigen::Vector4d out = Eigen::Vector4d::Zero();
  const double tau = local_threshold(sensing.sigma_w(k), sensing.pi0);
  if (sensing.rho == 0.0) {
    const double tau_p = local_threshold(sensing.sigma_w(partner), sensing.pi0);
    const auto [pd, pf] = detection_probs(sensing.sigma_w(partner), tau_p);
    const auto [t1, t2] = threshold_pair_uncorrelated(sensing.sigma_w(k), sensing.pi0, pd, pf);
    auto cdf = [&](double x) { return normal_cdf((x - mean) / sd); };
    out(0) = 1.0 - cdf(t1);
    out(1) = cdf(t1) - cdf(tau);
    out(2) = cdf(tau) - cdf(t2);
    out(3) = cdf(t2);
    (void)l;
    return out;
  }
  auto ubar_at = [&](double x) {
    const int u = local_decide(x, tau);
    return fused_decide_log(log_lambda_bar(x, u, sensing, k, partner), sensing.pi0);
  };
  auto cdf = [&](double x) { return normal_cdf((x - mean) / sd); };
  const double lo = mean - 10.0 * sd;
  const double hi = mean + 10.0 * sd;
  for (int branch = 0; branch < 2; ++branch) {
    const double a = branch == 0 ? lo : std::max(tau, lo);
    const double b = branch == 0 ? std::min(tau, hi) : hi;
    if (!(a < b)) continue;
    const int u = branch == 0 ? -1 : 1;
    const int n_scan = 1024;
    double prev_x = a;
    int prev_ubar = ubar_at(a + 1e-12 * (b - a));
    double seg_start = a;
    for (int m = 1; m <= n_scan; ++m) {
      const double x = a + (b - a) * m / n_scan;
      const int ub = ubar_at(x);
      if (ub != prev_ubar) {
        double left = prev_x, right = x;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (left + right);
          (ubar_at(mid) == prev_ubar ? left : right) = mid;
        }
        const double boundary = 0.5 * (left + right);
        out(node_case(u, prev_ubar)) += cdf(boundary) - cdf(seg_start);
        seg_start = boundary;
        prev_ubar = ub;
      }
      prev_x = x;
    }
    out(node_case(u, prev_ubar)) += cdf(b) - cdf(seg_start);
  }
  out /= out.sum();
  // renormalised over the clipped range; clipped tail mass is ~1e-23
  return out;
}

// --- fusion-at-sensors closed form (rho = 0) ---
//
// Conditioned on (u_i, u_j, H_l) the updated decisions of the two partners are
// independent; each conditional is a 1-d integral of the own measurement
// against the tail probability of the inter-node matched-filter statistic
// xi = Re(r g*), whose channel average is an exponential mixture handled by
// Gauss-Laguerre quadrature.
struct FusionSensorClosedForm {
  double tau_own, sigma_own;
  double q1, q0;  // partner P(u=1|H1), P(u=1|H0)
  double kappa;   // 2 sqrt(1-alpha) / sigma_eta^2
  double c_amp;   // sqrt(1-alpha)
  double sigma_hs2, sigma_eta2;
  double log_prior;  // log(pi0/pi1)
  Quadrature laguerre;

  // P(xi > c | partner symbol s), channel-averaged.
  double tail(double c, int s) const {
    double acc = 0.0;
    for (int q = 0; q < laguerre.nodes.size(); ++q) {
      const double v = laguerre.nodes(q);
      const double mean = c_amp * s * sigma_hs2 * v;
      const double sd = std::sqrt(sigma_hs2 * v * sigma_eta2 / 2.0);
      acc += laguerre.weights(q) * qfunc((c - mean) / sd);
    }
    return acc;
  }

  // P(u~ = +1 | own x, partner symbol s, H implied by the ratio argument)
  double prob_update_plus(double x, int s) const {
    const double log_ratio =
        log_normal_pdf(x, 1.0, sigma_own * sigma_own) -
        log_normal_pdf(x, 0.0, sigma_own * sigma_own);
    // decision is u~=+1 iff xi exceeds xi*(x); R = (pi0/pi1) f0/f1
    const double logR = log_prior - log_ratio;
    const double R = std::exp(logR);
    if (R >= q1 / q0) return 0.0;
    if (R <= (1.0 - q1) / (1.0 - q0)) return tail(-std::numeric_limits<double>::infinity(), s);
    const double y = (R * (1.0 - q0) - (1.0 - q1)) / (q1 - R * q0);
    const double xi_star = std::log(y) / (2.0 * kappa);
    return tail(xi_star, s);
  }

  // integral over the own-u region of phi_l(x) * P(u~ = a | x, partner s)
  double region_integral(int own_u, int a, int s, Hypothesis l) const {
    const double mean = mean_of(l);
    const double lo = own_u == 1 ? tau_own : mean - 9.0 * sigma_own;
    const double hi = own_u == 1 ? mean + 9.0 * sigma_own : tau_own;
    if (!(lo < hi)) return 0.0;
    const int n = 2000;  // composite Simpson, even
    const double hstep = (hi - lo) / n;
    double acc = 0.0;
    for (int m = 0; m <= n; ++m) {
      const double x = lo + m * hstep;
      const double p_plus = prob_update_plus(x, s);
      const double val = normal_pdf((x - mean) / sigma_own) / sigma_own *
                         (a == 1 ? p_plus : 1.0 - p_plus);
      const double w = (m == 0 || m == n) ? 1.0 : (m % 2 == 1 ? 4.0 : 2.0);
      acc += w * val;
    }
    return acc * hstep / 3.0;
  }
};

Eigen::Vector4d fusion_pair_table_closed_form(const SensingModel& sensing,
                                              const NetworkConfig& net, int s, Hypothesis l) {
  const int i = 2 * s, j = 2 * s + 1;
  const Quadrature lag = gauss_laguerre(64);
  auto make = [&](int own, int partner) {
    FusionSensorClosedForm f;
    f.tau_own = local_threshold(sensing.sigma_w(own), sensing.pi0);
    f.sigma_own = sensing.sigma_w(own);
    const double tau_p = local_threshold(sensing.sigma_w(partner), sensing.pi0);
    const auto pd_pf = detection_probs(sensing.sigma_w(partner), tau_p);
    f.q1 = pd_pf.first;
    f.q0 = pd_pf.second;
    f.c_amp = std::sqrt(1.0 - net.alpha);
    f.kappa = 2.0 * f.c_amp / net.sigma_eta2;
    f.sigma_hs2 = net.sigma_hs2(own / 2);
    f.sigma_eta2 = net.sigma_eta2;
    f.log_prior = std::log(sensing.pi0 / sensing.pi1());
    f.laguerre = lag;
    return f;
  };
  const FusionSensorClosedForm fi = make(i, j);
  const FusionSensorClosedForm fj = make(j, i);
  Eigen::Vector4d table = Eigen::Vector4d::Zero();
  for (int idx = 0; idx < 4; ++idx) {
    const auto ab = pair4_symbols(idx);
    double acc = 0.0;
    for (int su : {-1, 1})
      for (int sv : {-1, 1})
        acc += fi.region_integral(su, ab[0], sv, l) * fj.region_integral(sv, ab[1], su, l);
    table(idx) = acc;
  }
  return table;
}

// Monte Carlo estimation of one pair's state table, conditioned on z0.
Eigen::VectorXd mc_pair_table(SchemeKind scheme, const SensingModel& sensing,
                              const NetworkConfig& net, int s, double z0, Hypothesis l,
                              long samples, std::uint64_t seed, int threads) {
  const int i = 2 * s, j = 2 * s + 1;
  const int n_states = prior_states(scheme);
  const double shared = std::sqrt(sensing.rho);
  const double own = std::sqrt(1.0 - sensing.rho);
  const double mean = mean_of(l);
  const double tau_i = local_threshold(sensing.sigma_w(i), sensing.pi0);
  const double tau_j = local_threshold(sensing.sigma_w(j), sensing.pi0);

  auto run_chunk = [&](long begin, long end, std::vector<long>& counts) {
    for (long m = begin; m < end; ++m) {
      Stream rng = make_stream(seed, static_cast<std::uint64_t>(s), m);
      const double x_i = mean + sensing.sigma_w(i) * (shared * z0 + own * rng.normal());
      const double x_j = mean + sensing.sigma_w(j) * (shared * z0 + own * rng.normal());
      int state = 0;
      switch (scheme) {
        case SchemeKind::Parallel:
        case SchemeKind::StcAtSensors:
          state = pair4_index(local_decide(x_i, tau_i), local_decide(x_j, tau_j));
          break;
        case SchemeKind::FusionAtSensors: {
          const cd g_ij = rng.complex_gaussian(net.sigma_hs2(s));
          const cd g_ji = rng.complex_gaussian(net.sigma_hs2(s));
          const int u_i = local_decide(x_i, tau_i);
          const int u_j = local_decide(x_j, tau_j);
          const cd r_ij = internode_receive(u_i, net.alpha, g_ij, net.sigma_eta2, rng);
          const cd r_ji = internode_receive(u_j, net.alpha, g_ji, net.sigma_eta2, rng);
          const int ut_j = fused_decide_log(
              log_lambda_tilde(x_j, r_ij, g_ij, sensing, i, j, net.alpha, net.sigma_eta2),
              sensing.pi0);
          const int ut_i = fused_decide_log(
              log_lambda_tilde(x_i, r_ji, g_ji, sensing, j, i, net.alpha, net.sigma_eta2),
              sensing.pi0);
          state = pair4_index(ut_i, ut_j);
          break;
        }
        case SchemeKind::ThresholdChanging: {
          std::array<int, 2> cases{};
          for (int which = 0; which < 2; ++which) {
            const int k = which == 0 ? i : j;
            const int partner = which == 0 ? j : i;
            const double x = which == 0 ? x_i : x_j;
            int u, ubar;
            if (sensing.rho == 0.0) {
              const double tau_p = local_threshold(sensing.sigma_w(partner), sensing.pi0);
              const auto [pd, pf] = detection_probs(sensing.sigma_w(partner), tau_p);
              const auto [t1, t2] =
                  threshold_pair_uncorrelated(sensing.sigma_w(k), sensing.pi0, pd, pf);
              std::tie(u, ubar) =
                  threshold_change_decide(x, which == 0 ? tau_i : tau_j, t1, t2);
            } else {
              std::tie(u, ubar) = threshold_change_decide_correlated(x, sensing, k, partner);
            }
            cases[which] = node_case(u, ubar);
          }
          state = thr16_index(cases[0], cases[1]);
          break;
        }
      }
      ++counts[state];
    }
  };

  const int n_threads = std::max(1, threads);
  std::vector<std::vector<long>> counts(n_threads, std::vector<long>(n_states, 0));
  if (n_threads == 1) {
    run_chunk(0, samples, counts[0]);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      const long begin = samples * t / n_threads;
      const long end = samples * (t + 1) / n_threads;
      pool.emplace_back([&, t, begin, end] { run_chunk(begin, end, counts[t]); });
    }
    for (auto& th : pool) th.join();
  }
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(n_states);
  for (const auto& c : counts)
    for (int st = 0; st < n_states; ++st) freq(st) += static_cast<double>(c[st]);
  return freq / freq.sum();
}

}  // namespace

DecisionPrior build_decision_prior(SchemeKind scheme, const SensingModel& sensing,
                                   const NetworkConfig& net, PriorMethod method,
                                   long mc_samples, Stream& rng, int gh_nodes, int threads) {
  sensing.validate();
  net.validate(scheme_uses_alpha(scheme));
  if (method == PriorMethod::MonteCarlo && mc_samples < 10000)
    throw std::invalid_argument("Monte Carlo prior needs >= 1e4 samples");
  if (method == PriorMethod::ClosedForm && scheme == SchemeKind::FusionAtSensors &&
      sensing.rho != 0.0)
    throw std::invalid_argument(
        "closed-form prior for the fusion scheme is only available at rho = 0");

  DecisionPrior prior;
  prior.scheme = scheme;
  if (sensing.rho == 0.0) {
    prior.nodes = Eigen::VectorXd::Zero(1);
    prior.weights = Eigen::VectorXd::Ones(1);
  } else {
    const Quadrature gh = gauss_hermite_prob(gh_nodes);
    prior.nodes = gh.nodes;
    prior.weights = gh.weights;
  }

  const int S = sensing.pairs();
  const int n_states = prior_states(scheme);
  const int n_nodes = prior.n_nodes();
  for (int hyp = 0; hyp < 2; ++hyp)
    prior.tables[hyp].assign(S, Eigen::MatrixXd::Zero(n_nodes, n_states));
  if (scheme == SchemeKind::StcAtSensors) {
    prior.internode_flip.resize(S);
    for (int s = 0; s < S; ++s) prior.internode_flip(s) = demod_error_prob(internode_snr(net, s));
  }

  const bool replicate =
      sensing.homogeneous() && net.homogeneous() && S > 1;  // identical pairs share one table

  const std::uint64_t mc_seed = method == PriorMethod::MonteCarlo ? rng.next() : 0;

  for (int hyp = 0; hyp < 2; ++hyp) {
    const Hypothesis l = hyp == 0 ? Hypothesis::H0 : Hypothesis::H1;
    for (int s = 0; s < (replicate ? 1 : S); ++s) {
      for (int g = 0; g < n_nodes; ++g) {
        const double z0 = prior.nodes(g);
        Eigen::VectorXd row;
        if (method == PriorMethod::MonteCarlo) {
          const std::uint64_t seed =
              hash_combine(hash_combine(mc_seed, static_cast<std::uint64_t>(hyp) * 131 + g),
                           static_cast<std::uint64_t>(s));
          row = mc_pair_table(scheme, sensing, net, s, z0, l, mc_samples, seed, threads);
        } else {
          switch (scheme) {
            case SchemeKind::Parallel:
            case SchemeKind::StcAtSensors:
              row = pair4_table_from_marginals(
                  prob_u_plus_given_z0(sensing, 2 * s, z0, l),
                  prob_u_plus_given_z0(sensing, 2 * s + 1, z0, l));
              break;
            case SchemeKind::FusionAtSensors:
              row = fusion_pair_table_closed_form(sensing, net, s, l);
              break;
            case SchemeKind::ThresholdChanging: {
              Eigen::Vector4d ci = Eigen::Vector4d::Zero();
              Eigen::Vector4d cj = Eigen::Vector4d::Zero();
              for (int which = 0; which < 2; ++which) {
                const int k = 2 * s + which;
                const int partner = 2 * s + 1 - which;
                const double sw = sensing.sigma_w(k);
                const double mean = mean_of(l) + sw * std::sqrt(sensing.rho) * z0;
                const double sd = sw * std::sqrt(1.0 - sensing.rho);
                (which == 0 ? ci : cj) =
                    threshold_case_probs(sensing, k, partner, mean, sd, l);
              }
              row.resize(16);
              for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) row(thr16_index(a, b)) = ci(a) * cj(b);
              break;
            }
          }
        }
        row /= row.sum();
        prior.tables[hyp][s].row(g) = row.transpose();
      }
    }
    if (replicate)
      for (int s = 1; s < S; ++s) prior.tables[hyp][s] = prior.tables[hyp][0];
  }
  prior.validate();
  return prior;
}

std::uint64_t prior_cache_key(SchemeKind scheme, const SensingModel& sensing,
                              const NetworkConfig& net, PriorMethod method, long mc_samples,
                              int gh_nodes) {
  std::uint64_t h = 0x5bd1e995u;
  h = hash_combine(h, static_cast<std::uint64_t>(scheme));
  h = hash_double(h, sensing.pi0);
  h = hash_double(h, sensing.rho);
  for (int k = 0; k < sensing.sensors(); ++k) h = hash_double(h, sensing.sigma_w(k));
  h = hash_double(h, net.P);
  h = hash_double(h, net.G);
  h = hash_double(h, net.epsilon);
  for (int k = 0; k < net.sensors(); ++k) h = hash_double(h, net.d(k));
  for (int s = 0; s < net.pairs(); ++s) h = hash_double(h, net.d0(s));
  h = hash_double(h, net.sigma_v2);
  h = hash_double(h, net.sigma_eta2);
  if (scheme_uses_alpha(scheme)) h = hash_double(h, net.alpha);
  h = hash_combine(h, static_cast<std::uint64_t>(method));
  if (method == PriorMethod::MonteCarlo)
    h = hash_combine(h, static_cast<std::uint64_t>(mc_samples));
  if (sensing.rho != 0.0) h = hash_combine(h, static_cast<std::uint64_t>(gh_nodes));
  return h;
}

void save_prior(std::ostream& os, const DecisionPrior& prior, std::uint64_t key) {
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  os << "decifuse-prior 1\n";
  os << "key " << key << "\n";
  os << "scheme " << scheme_name(prior.scheme) << "\n";
  os << "pairs " << prior.n_pairs() << " nodes " << prior.n_nodes() << " states "
     << prior.n_states() << "\n";
  os << "grid";
  for (int g = 0; g < prior.n_nodes(); ++g) {
    os << ' ';
    put(prior.nodes(g));
    os << ' ';
    put(prior.weights(g));
  }
  os << "\n";
  os << "flips";
  for (int s = 0; s < prior.internode_flip.size(); ++s) {
    os << ' ';
    put(prior.internode_flip(s));
  }
  os << "\n";
  for (int hyp = 0; hyp < 2; ++hyp)
    for (int s = 0; s < prior.n_pairs(); ++s)
      for (int g = 0; g < prior.n_nodes(); ++g) {
        os << "table " << hyp << ' ' << s << ' ' << g;
        for (int st = 0; st < prior.n_states(); ++st) {
          os << ' ';
          put(prior.tables[hyp][s](g, st));
        }
        os << "\n";
      }
}

DecisionPrior load_prior(std::istream& is, std::uint64_t* key_out) {
  std::string word;
  int version = 0;
  is >> word >> version;
  if (word != "decifuse-prior" || version != 1)
    throw std::runtime_error("unrecognized prior file format");
  std::uint64_t key = 0;
  is >> word >> key;
  if (key_out) *key_out = key;
  DecisionPrior prior;
  std::string name;
  is >> word >> name;
  prior.scheme = scheme_from_name(name);
  int pairs = 0, nodes = 0, states = 0;
  is >> word >> pairs >> word >> nodes >> word >> states;
  if (states != prior_states(prior.scheme)) throw std::runtime_error("prior state mismatch");
  prior.nodes.resize(nodes);
  prior.weights.resize(nodes);
  is >> word;
  for (int g = 0; g < nodes; ++g) is >> prior.nodes(g) >> prior.weights(g);
  is >> word;
  if (prior.scheme == SchemeKind::StcAtSensors) {
    prior.internode_flip.resize(pairs);
    for (int s = 0; s < pairs; ++s) is >> prior.internode_flip(s);
  }
  for (int hyp = 0; hyp < 2; ++hyp)
    prior.tables[hyp].assign(pairs, Eigen::MatrixXd::Zero(nodes, states));
  int hyp = 0, s = 0, g = 0;
  while (is >> word) {
    if (word != "table") break;
    is >> hyp >> s >> g;
    for (int st = 0; st < states; ++st) is >> prior.tables[hyp][s](g, st);
  }
  prior.validate();
  return prior;
}

namespace {

double pair_log_likelihood_4(const DecisionPrior& prior, int hyp, int s, int g,
                             const Eigen::VectorXcd& y, const ChannelRealization& ch,
                             double amp, double sigma_v2) {
  const int i = 2 * s, j = 2 * s + 1;
  std::array<double, 4> terms{};
  for (int st = 0; st < 4; ++st) {
    const auto sym = pair4_symbols(st);
    const double lp = std::log(prior.tables[hyp][s](g, st));
    terms[st] = lp + log_cn_pdf(y(i), amp * static_cast<double>(sym[0]) * ch.h(i), sigma_v2) +
                log_cn_pdf(y(j), amp * static_cast<double>(sym[1]) * ch.h(j), sigma_v2);
  }
  return log_sum_exp(std::span<const double>(terms));
}

double pair_log_likelihood_stc(const DecisionPrior& prior, int hyp, int s, int g,
                               const PairSignal& sig, const ChannelRealization& ch,
                               double alpha) {
  const int i = 2 * s, j = 2 * s + 1;
  const double flip = prior.internode_flip(s);
  const double log_flip = std::log(flip);
  const double log_keep = std::log1p(-flip);
  std::array<double, 16> terms{};
  for (int st = 0; st < 16; ++st) {
    const auto sym = stc16_symbols(st);
    const auto [mu_i, mu_j] = pair_means(pair_tx_stc(st, alpha), ch.h(i), ch.h(j));
    const double lp = std::log(prior.tables[hyp][s](g, pair4_index(sym[0], sym[1]))) +
                      (sym[2] == sym[0] ? log_keep : log_flip) +
                      (sym[3] == sym[1] ? log_keep : log_flip);
    terms[st] = lp + log_cn_pdf(sig.z_a, mu_i, sig.sigma2_eff) +
                log_cn_pdf(sig.z_b, mu_j, sig.sigma2_eff);
  }
  return log_sum_exp(std::span<const double>(terms));
}

double pair_log_likelihood_thr(const DecisionPrior& prior, int hyp, int s, int g,
                               const PairSignal& sig, const ChannelRealization& ch) {
  const int i = 2 * s, j = 2 * s + 1;
  std::array<double, 16> terms{};
  for (int st = 0; st < 16; ++st) {
    const auto [mu_i, mu_j] = pair_means(pair_tx_threshold(st), ch.h(i), ch.h(j));
    terms[st] = std::log(prior.tables[hyp][s](g, st)) +
                log_cn_pdf(sig.z_a, mu_i, sig.sigma2_eff) +
                log_cn_pdf(sig.z_b, mu_j, sig.sigma2_eff);
  }
  return log_sum_exp(std::span<const double>(terms));
}

}  // namespace

FcDecision lrt_decide(SchemeKind scheme, const DecisionPrior& prior, const FcSignals& signals,
                      const ChannelRealization& channels, const NetworkConfig& net,
                      double pi0) {
  if (prior.scheme != scheme) throw std::invalid_argument("prior built for another scheme");
  const int S = prior.n_pairs();
  const int n_nodes = prior.n_nodes();
  double log_f[2];
  for (int hyp = 0; hyp < 2; ++hyp) {
    std::vector<double> node_terms(n_nodes);
    for (int g = 0; g < n_nodes; ++g) {
      double acc = std::log(prior.weights(g));
      for (int s = 0; s < S; ++s) {
        switch (scheme) {
          case SchemeKind::Parallel:
            acc += pair_log_likelihood_4(prior, hyp, s, g, signals.y, channels, 1.0,
                                         net.sigma_v2);
            break;
          case SchemeKind::FusionAtSensors:
            acc += pair_log_likelihood_4(prior, hyp, s, g, signals.y, channels,
                                         std::sqrt(net.alpha), net.sigma_v2);
            break;
          case SchemeKind::StcAtSensors:
            acc += pair_log_likelihood_stc(prior, hyp, s, g, signals.pairs[s], channels,
                                           net.alpha);
            break;
          case SchemeKind::ThresholdChanging:
            acc += pair_log_likelihood_thr(prior, hyp, s, g, signals.pairs[s], channels);
            break;
        }
      }
      node_terms[g] = acc;
    }
    log_f[hyp] = log_sum_exp(node_terms);
  }
  FcDecision out;
  out.log_lrt = log_f[1] - log_f[0];
  out.decided =
      out.log_lrt > std::log(pi0 / (1.0 - pi0)) ? Hypothesis::H1 : Hypothesis::H0;
  return out;
}

FcDecision majority_decide(SchemeKind scheme, const FcSignals& signals,
                           const ChannelRealization& channels, const NetworkConfig& net,
                           double pi0) {
  (void)pi0;  // the majority rule does not use the priors
  FcDecision out;
  int vote = 0;
  if (!scheme_uses_pairs_at_fc(scheme)) {
    const int K = static_cast<int>(signals.y.size());
    for (int k = 0; k < K; ++k) {
      if (channels.h(k) == cd(0.0, 0.0))
        throw std::domain_error("degenerate channel h = 0 in majority demodulation");
      vote += std::real(signals.y(k) / channels.h(k)) > 0.0 ? 1 : -1;
    }
  } else {
    const int S = static_cast<int>(signals.pairs.size());
    for (int s = 0; s < S; ++s) {
      const int i = 2 * s, j = 2 * s + 1;
      const PairSignal& sig = signals.pairs[s];
      int best_state = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (int st = 0; st < 16; ++st) {
        const PairTx tx = scheme == SchemeKind::StcAtSensors ? pair_tx_stc(st, net.alpha)
                                                             : pair_tx_threshold(st);
        const auto [mu_i, mu_j] = pair_means(tx, channels.h(i), channels.h(j));
        const double ll = -std::norm(sig.z_a - mu_i) - std::norm(sig.z_b - mu_j);
        if (ll > best) {
          best = ll;
          best_state = st;
        }
      }
      if (scheme == SchemeKind::StcAtSensors) {
        const auto sym = stc16_symbols(best_state);
        vote += sym[0] + sym[1] + sym[2] + sym[3];
      } else {
        const auto ci = node_case_symbols(best_state / 4);
        const auto cj = node_case_symbols(best_state % 4);
        vote += ci[0] + ci[1] + cj[0] + cj[1];
      }
    }
  }
  out.vote_sum = vote;
  out.decided = vote > 0 ? Hypothesis::H1 : Hypothesis::H0;
  return out;
}

}  // namespace decifuse
