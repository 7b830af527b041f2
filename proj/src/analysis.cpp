#include "decifuse/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "decifuse/math.hpp"

namespace decifuse {

void HomogeneousOperatingPoint::validate() const {
  if (!(Pf > 0.0 && Pd < 1.0 && Pd > Pf))
    throw std::invalid_argument("requires 0 < P_f < P_d < 1");
  if (!(pi0 > 0.0 && pi0 < 1.0)) throw std::invalid_argument("pi0 must lie in (0,1)");
  if (K < 2 || K % 2 != 0) throw std::invalid_argument("K must be even and >= 2");
  if (!(gamma_h > 0.0)) throw std::invalid_argument("gamma_h must be positive");
}

HomogeneousOperatingPoint HomogeneousOperatingPoint::from_snr(SchemeKind scheme,
                                                              double snr_c_db,
                                                              double snr_h_db, double pi0,
                                                              int K, double alpha, double d_m,
                                                              double d0_m, double epsilon) {
  HomogeneousOperatingPoint op;
  const double sw = sigma_w_from_snr_c(snr_c_db);
  const double tau = local_threshold(sw, pi0);
  std::tie(op.Pd, op.Pf) = detection_probs(sw, tau);
  op.pi0 = pi0;
  op.K = K;
  op.gamma_h = db_to_linear(snr_h_db);
  op.alpha = alpha;
  op.gamma_hs = scheme_uses_alpha(scheme)
                    ? std::pow(d_m / d0_m, epsilon) * (1.0 - alpha) * op.gamma_h
                    : 0.0;
  op.validate();
  return op;
}

int find_M(double Pd, double Pf, double pi0, int K) {
  if (!(Pf > 0.0 && Pd < 1.0 && Pd > Pf))
    throw std::domain_error("requires 0 < P_f < P_d < 1");
  const double thr = std::log(pi0 / (1.0 - pi0));
  for (int m = 0; m <= K; ++m) {
    const double l = m * std::log(Pd / Pf) + (K - m) * std::log((1.0 - Pd) / (1.0 - Pf));
    if (l > thr) return m;
  }
  throw std::domain_error("no vote count crosses the prior threshold (degenerate M)");
}

double error_floor(double Pd, double Pf, double pi0, int K) {
  const int M = find_M(Pd, Pf, pi0, K);
  double miss = 0.0, false_alarm = 0.0;
  for (int n = 0; n < M; ++n)
    miss += std::exp(ln_binom(K, n) + n * std::log(Pd) + (K - n) * std::log1p(-Pd));
  for (int n = M; n <= K; ++n)
    false_alarm += std::exp(ln_binom(K, n) + n * std::log(Pf) + (K - n) * std::log1p(-Pf));
  return (1.0 - pi0) * miss + pi0 * false_alarm;
}

std::pair<double, double> minimize_t(const std::function<double(double)>& bound_curve) {
  double best_t = 0.01;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 99; ++i) {
    const double t = i / 100.0;
    const double v = bound_curve(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  return {best_t, best_v};
}

namespace {

// Per-pair state model shared by all four schemes.  A state's probability
// factorises as exp(sum_c inc[c] * unit_logp[hyp][c]) * extra; the hypothesis
// ratio therefore depends on the accumulated count vector only, which keys
// the dynamic-programming aggregation.
struct PairModel {
  int n_states = 0;
  int S = 0;
  double pi0 = 0.5;
  std::vector<std::array<int, 4>> inc;
  std::array<std::array<double, 4>, 2> unit_logp{};
  std::vector<double> extra;
  std::array<std::vector<double>, 2> p_full;
  Eigen::MatrixXd logD1;
  std::function<Eigen::MatrixXd(double)> logD2_of_s;  // s = t - t^2
};

std::uint32_t stat_key(const std::array<int, 4>& c) {
  return static_cast<std::uint32_t>(c[0] | (c[1] << 6) | (c[2] << 12) | (c[3] << 18));
}
std::array<int, 4> stat_from_key(std::uint32_t k) {
  return {static_cast<int>(k & 63), static_cast<int>((k >> 6) & 63),
          static_cast<int>((k >> 12) & 63), static_cast<int>((k >> 18) & 63)};
}

double stat_logp(const PairModel& m, int hyp, const std::array<int, 4>& stat) {
  double acc = 0.0;
  for (int c = 0; c < 4; ++c) acc += stat[c] * m.unit_logp[hyp][c];
  return acc;
}

// log(pi1 P(F|H1)) - log(pi0 P(F|H0)) of a full-length state sequence.
double stat_llr(const PairModel& m, const std::array<int, 4>& stat) {
  return std::log((1.0 - m.pi0) / m.pi0) + stat_logp(m, 1, stat) - stat_logp(m, 0, stat);
}

using StatMap = std::unordered_map<std::uint32_t, double>;
using PairStatMap = std::unordered_map<std::uint64_t, double>;

StatMap one_sided_dp(const PairModel& m, const std::vector<double>& w) {
  StatMap cur;
  cur[stat_key({0, 0, 0, 0})] = 1.0;
  for (int s = 0; s < m.S; ++s) {
    StatMap next;
    for (const auto& [key, val] : cur) {
      const auto stat = stat_from_key(key);
      for (int a = 0; a < m.n_states; ++a) {
        if (w[a] == 0.0) continue;
        auto ns = stat;
        for (int c = 0; c < 4; ++c) ns[c] += m.inc[a][c];
        next[stat_key(ns)] += val * w[a];
      }
    }
    cur = std::move(next);
  }
  return cur;
}

PairStatMap two_sided_dp(const PairModel& m, const Eigen::MatrixXd& w) {
  PairStatMap cur;
  cur[0] = 1.0;
  for (int s = 0; s < m.S; ++s) {
    PairStatMap next;
    next.reserve(cur.size() * 4);
    for (const auto& [key, val] : cur) {
      const auto stat_n = stat_from_key(static_cast<std::uint32_t>(key & 0xffffffu));
      const auto stat_n1 = stat_from_key(static_cast<std::uint32_t>(key >> 24));
      for (int a = 0; a < m.n_states; ++a) {
        auto sn = stat_n;
        for (int c = 0; c < 4; ++c) sn[c] += m.inc[a][c];
        const std::uint64_t kn = stat_key(sn);
        for (int a1 = 0; a1 < m.n_states; ++a1) {
          const double wv = w(a, a1);
          if (wv == 0.0) continue;
          auto sn1 = stat_n1;
          for (int c = 0; c < 4; ++c) sn1[c] += m.inc[a1][c];
          next[kn | (static_cast<std::uint64_t>(stat_key(sn1)) << 24)] += val * wv;
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

struct MembershipInfo {
  double s1_count = 0.0;  // number of sequences with llr > 0
  double s0_count = 0.0;  // llr < 0
  double e1_indicator = 0.0;
  double e2_indicator = 0.0;
};

MembershipInfo membership(const PairModel& m) {
  MembershipInfo info;
  const std::vector<double> ones(m.n_states, 1.0);
  const StatMap counts = one_sided_dp(m, ones);
  const StatMap w0 = one_sided_dp(m, m.p_full[0]);
  const StatMap w1 = one_sided_dp(m, m.p_full[1]);
  for (const auto& [key, cnt] : counts) {
    const double llr = stat_llr(m, stat_from_key(key));
    if (llr > 0.0)
      info.s1_count += cnt;
    else if (llr < 0.0)
      info.s0_count += cnt;
  }
  for (const auto& [key, val] : w0)
    if (stat_llr(m, stat_from_key(key)) > 0.0) info.e1_indicator += val;
  info.e1_indicator *= m.pi0;
  for (const auto& [key, val] : w1)
    if (stat_llr(m, stat_from_key(key)) <= 0.0) info.e2_indicator += val;
  info.e2_indicator *= 1.0 - m.pi0;
  return info;
}

// positive part of pi1 P(F|H1) - pi0 P(F|H0) and its negation
double dsign_prefactor(const PairModel& m, const std::array<int, 4>& stat) {
  return (1.0 - m.pi0) * std::exp(stat_logp(m, 1, stat)) -
         m.pi0 * std::exp(stat_logp(m, 0, stat));
}

double e1_chernoff_dp(const PairModel& m, const MembershipInfo& info) {
  if (info.s1_count == 0.0 || info.s0_count == 0.0) return 0.0;
  Eigen::MatrixXd w(m.n_states, m.n_states);
  for (int a = 0; a < m.n_states; ++a)
    for (int a1 = 0; a1 < m.n_states; ++a1)
      w(a, a1) = m.p_full[0][a] * std::sqrt(m.extra[a1] / m.extra[a]) *
                 std::exp(m.logD1(a, a1));
  const PairStatMap dp = two_sided_dp(m, w);
  double acc = 0.0;
  for (const auto& [key, val] : dp) {
    const auto stat_n = stat_from_key(static_cast<std::uint32_t>(key & 0xffffffu));
    const auto stat_n1 = stat_from_key(static_cast<std::uint32_t>(key >> 24));
    const double r_n1 = dsign_prefactor(m, stat_n1);
    const double r_n = -dsign_prefactor(m, stat_n);
    if (!(r_n1 > 0.0) || !(r_n > 0.0)) continue;  // keep S0 -> S1 direction only
    acc += std::sqrt(r_n1 / r_n) * val;
  }
  return m.pi0 * acc / (2.0 * std::sqrt(info.s1_count));
}

double e2_chernoff_dp(const PairModel& m, const MembershipInfo& info, double t) {
  if (info.s1_count == 0.0 || info.s0_count == 0.0) return 0.0;
  const double s = t - t * t;
  const Eigen::MatrixXd logD2 = m.logD2_of_s(s);
  Eigen::MatrixXd w(m.n_states, m.n_states);
  for (int a = 0; a < m.n_states; ++a)
    for (int a1 = 0; a1 < m.n_states; ++a1)
      w(a, a1) = m.p_full[1][a] * std::pow(m.extra[a1] / m.extra[a], t) *
                 std::exp(logD2(a, a1));
  const PairStatMap dp = two_sided_dp(m, w);
  double acc = 0.0;
  for (const auto& [key, val] : dp) {
    const auto stat_n = stat_from_key(static_cast<std::uint32_t>(key & 0xffffffu));
    const auto stat_n1 = stat_from_key(static_cast<std::uint32_t>(key >> 24));
    const double r_n = dsign_prefactor(m, stat_n);         // > 0 on S1
    const double r_n1 = -dsign_prefactor(m, stat_n1);      // > 0 on S0
    if (!(r_n > 0.0) || !(r_n1 > 0.0)) continue;
    acc += std::pow(r_n1 / r_n, t) * val;
  }
  return (1.0 - m.pi0) * std::pow(info.s0_count, t - 1.0) * acc;
}

// Brute-force aggregation over explicit sequence pairs (K <= 6).
struct EnumSeqs {
  std::vector<std::array<int, 4>> stat;
  std::vector<double> p0, p1, extra;
  std::vector<std::vector<int>> states;
};

EnumSeqs enumerate_sequences(const PairModel& m) {
  EnumSeqs out;
  long total = 1;
  for (int s = 0; s < m.S; ++s) total *= m.n_states;
  out.stat.reserve(total);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    std::array<int, 4> stat{0, 0, 0, 0};
    double p0 = 1.0, p1 = 1.0, ex = 1.0;
    std::vector<int> st(m.S);
    for (int s = 0; s < m.S; ++s) {
      const int a = rem % m.n_states;
      rem /= m.n_states;
      st[s] = a;
      for (int c = 0; c < 4; ++c) stat[c] += m.inc[a][c];
      p0 *= m.p_full[0][a];
      p1 *= m.p_full[1][a];
      ex *= m.extra[a];
    }
    out.stat.push_back(stat);
    out.p0.push_back(p0);
    out.p1.push_back(p1);
    out.extra.push_back(ex);
    out.states.push_back(std::move(st));
  }
  return out;
}

double e1_chernoff_enum(const PairModel& m, const MembershipInfo& info, const EnumSeqs& seqs) {
  if (info.s1_count == 0.0 || info.s0_count == 0.0) return 0.0;
  double acc = 0.0;
  const long n_seq = static_cast<long>(seqs.stat.size());
  for (long n = 0; n < n_seq; ++n) {
    const double r_n = -dsign_prefactor(m, seqs.stat[n]);
    if (!(r_n > 0.0)) continue;
    for (long n1 = 0; n1 < n_seq; ++n1) {
      const double r_n1 = dsign_prefactor(m, seqs.stat[n1]);
      if (!(r_n1 > 0.0)) continue;
      double d1 = 0.0;
      for (int s = 0; s < m.S; ++s) d1 += m.logD1(seqs.states[n][s], seqs.states[n1][s]);
      acc += std::sqrt(r_n1 / r_n) * seqs.p0[n] * std::sqrt(seqs.extra[n1] / seqs.extra[n]) *
             std::exp(d1);
    }
  }
  return m.pi0 * acc / (2.0 * std::sqrt(info.s1_count));
}

double e2_chernoff_enum(const PairModel& m, const MembershipInfo& info, const EnumSeqs& seqs,
                        double t) {
  if (info.s1_count == 0.0 || info.s0_count == 0.0) return 0.0;
  const Eigen::MatrixXd logD2 = m.logD2_of_s(t - t * t);
  double acc = 0.0;
  const long n_seq = static_cast<long>(seqs.stat.size());
  for (long n = 0; n < n_seq; ++n) {
    const double r_n = dsign_prefactor(m, seqs.stat[n]);
    if (!(r_n > 0.0)) continue;
    for (long n1 = 0; n1 < n_seq; ++n1) {
      const double r_n1 = -dsign_prefactor(m, seqs.stat[n1]);
      if (!(r_n1 > 0.0)) continue;
      double d2 = 0.0;
      for (int s = 0; s < m.S; ++s) d2 += logD2(seqs.states[n][s], seqs.states[n1][s]);
      acc += std::pow(r_n1 / r_n, t) * seqs.p1[n] *
             std::pow(seqs.extra[n1] / seqs.extra[n], t) * std::exp(d2);
    }
  }
  return (1.0 - m.pi0) * std::pow(info.s0_count, t - 1.0) * acc;
}

BoundResult assemble_bound(const PairModel& m, BoundAggregation agg, int M) {
  const bool use_enum = agg == BoundAggregation::Enumerate ||
                        (agg == BoundAggregation::Auto && m.S * 2 <= 6);
  const MembershipInfo info = membership(m);
  BoundResult out;
  out.M = M;
  out.e1_indicator = info.e1_indicator;
  out.e2_indicator = info.e2_indicator;
  if (use_enum) {
    const EnumSeqs seqs = enumerate_sequences(m);
    out.e1_chernoff = e1_chernoff_enum(m, info, seqs);
    auto [t_star, v] = minimize_t([&](double t) { return e2_chernoff_enum(m, info, seqs, t); });
    out.t_star = t_star;
    out.e2_chernoff = v;
  } else {
    out.e1_chernoff = e1_chernoff_dp(m, info);
    auto [t_star, v] = minimize_t([&](double t) { return e2_chernoff_dp(m, info, t); });
    out.t_star = t_star;
    out.e2_chernoff = v;
  }
  out.pe1 = out.e1_chernoff + out.e1_indicator;
  out.pe2 = out.e2_chernoff + out.e2_indicator;
  out.pe = out.pe1 + out.pe2;
  return out;
}

// Fading averages E{exp(-s K_s)} for the Alamouti-combined pair statistics;
// derived from the 2x2 complex-Gaussian quadratic form, positive definite by
// Cauchy-Schwarz, so every factor lies in (0, 1].
double log_alamouti_fading_avg(double coef, const PairTx& tx_n, const PairTx& tx_n1) {
  const double dpi = tx_n.p_i - tx_n1.p_i;
  const double dqi = tx_n.q_i - tx_n1.q_i;
  const double dpj = tx_n.p_j - tx_n1.p_j;
  const double dqj = tx_n.q_j - tx_n1.q_j;
  const double b1 = dpi * dpi + dqi * dqi;
  const double b2 = dpj * dpj + dqj * dqj;
  const double a3 = dpi * dpj - dqi * dqj;
  return -std::log((1.0 + coef * b1) * (1.0 + coef * b2) - coef * coef * a3 * a3);
}

}  // namespace

double log_d_factor(SchemeKind scheme, double alpha, double gamma_h, double s, int state_a,
                    int state_a1) {
  switch (scheme) {
    case SchemeKind::Parallel:
    case SchemeKind::FusionAtSensors: {
      const double eff = scheme == SchemeKind::Parallel ? 1.0 : alpha;
      const auto sa = pair4_symbols(state_a);
      const auto sb = pair4_symbols(state_a1);
      const double di = sa[0] - sb[0], dj = sa[1] - sb[1];
      return -std::log1p(s * eff * gamma_h * di * di) -
             std::log1p(s * eff * gamma_h * dj * dj);
    }
    case SchemeKind::StcAtSensors:
      return log_alamouti_fading_avg(s * alpha * gamma_h / 2.0, pair_tx_stc(state_a, alpha),
                                     pair_tx_stc(state_a1, alpha));
    case SchemeKind::ThresholdChanging:
      return log_alamouti_fading_avg(s * gamma_h / 2.0, pair_tx_threshold(state_a),
                                     pair_tx_threshold(state_a1));
  }
  return 0.0;
}

namespace {

PairModel model_parallel_like(const HomogeneousOperatingPoint& op, SchemeKind which,
                              const std::array<Eigen::Vector4d, 2>* pair_tables) {
  PairModel m;
  m.n_states = 4;
  m.S = op.K / 2;
  m.pi0 = op.pi0;
  m.inc.resize(4);
  m.extra.assign(4, 1.0);
  for (int hyp = 0; hyp < 2; ++hyp) m.p_full[hyp].resize(4);
  if (pair_tables) {
    // joint pair table (fusion): states carry their own probabilities
    for (int a = 0; a < 4; ++a) {
      m.inc[a] = {0, 0, 0, 0};
      m.inc[a][a] = 1;
      for (int hyp = 0; hyp < 2; ++hyp) {
        m.p_full[hyp][a] = (*pair_tables)[hyp](a);
        m.unit_logp[hyp][a] = std::log((*pair_tables)[hyp](a));
      }
    }
  } else {
    for (int a = 0; a < 4; ++a) {
      const auto sym = pair4_symbols(a);
      const int ones = (sym[0] == 1) + (sym[1] == 1);
      m.inc[a] = {ones, 2 - ones, 0, 0};
      m.p_full[0][a] = std::pow(op.Pf, ones) * std::pow(1.0 - op.Pf, 2 - ones);
      m.p_full[1][a] = std::pow(op.Pd, ones) * std::pow(1.0 - op.Pd, 2 - ones);
    }
    m.unit_logp[0] = {std::log(op.Pf), std::log1p(-op.Pf), 0.0, 0.0};
    m.unit_logp[1] = {std::log(op.Pd), std::log1p(-op.Pd), 0.0, 0.0};
  }
  const double g = op.gamma_h;
  const double alpha = op.alpha;
  auto logd = [g, alpha, which](double s) {
    Eigen::MatrixXd out(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int a1 = 0; a1 < 4; ++a1) out(a, a1) = log_d_factor(which, alpha, g, s, a, a1);
    return out;
  };
  m.logD1 = logd(0.25);
  m.logD2_of_s = logd;
  return m;
}

PairModel model_stc(const HomogeneousOperatingPoint& op) {
  PairModel m;
  m.n_states = 16;
  m.S = op.K / 2;
  m.pi0 = op.pi0;
  m.inc.resize(16);
  m.extra.resize(16);
  const double flip = demod_error_prob(op.gamma_hs);
  for (int hyp = 0; hyp < 2; ++hyp) m.p_full[hyp].resize(16);
  for (int a = 0; a < 16; ++a) {
    const auto sym = stc16_symbols(a);
    const int ones = (sym[0] == 1) + (sym[1] == 1);
    m.inc[a] = {ones, 2 - ones, 0, 0};
    const int flips = (sym[2] != sym[0]) + (sym[3] != sym[1]);
    m.extra[a] = std::pow(flip, flips) * std::pow(1.0 - flip, 2 - flips);
    m.p_full[0][a] =
        std::pow(op.Pf, ones) * std::pow(1.0 - op.Pf, 2 - ones) * m.extra[a];
    m.p_full[1][a] =
        std::pow(op.Pd, ones) * std::pow(1.0 - op.Pd, 2 - ones) * m.extra[a];
  }
  m.unit_logp[0] = {std::log(op.Pf), std::log1p(-op.Pf), 0.0, 0.0};
  m.unit_logp[1] = {std::log(op.Pd), std::log1p(-op.Pd), 0.0, 0.0};
  const double g = op.gamma_h;
  const double alpha = op.alpha;
  auto logd = [g, alpha](double s) {
    Eigen::MatrixXd out(16, 16);
    for (int a = 0; a < 16; ++a)
      for (int a1 = 0; a1 < 16; ++a1)
        out(a, a1) = log_d_factor(SchemeKind::StcAtSensors, alpha, g, s, a, a1);
    return out;
  };
  m.logD1 = logd(0.25);
  m.logD2_of_s = logd;
  return m;
}

PairModel model_threshold(const HomogeneousOperatingPoint& op, const Eigen::Vector4d& pd4,
                          const Eigen::Vector4d& pf4) {
  for (int j = 0; j < 4; ++j)
    if (!(pd4(j) >= 0.0 && pf4(j) >= 0.0))
      throw std::invalid_argument("four-state probabilities must be nonnegative");
  if (std::abs(pd4.sum() - 1.0) > 1e-9 || std::abs(pf4.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("four-state probabilities must sum to 1");
  PairModel m;
  m.n_states = 16;
  m.S = op.K / 2;
  m.pi0 = op.pi0;
  m.inc.resize(16);
  m.extra.assign(16, 1.0);
  for (int hyp = 0; hyp < 2; ++hyp) m.p_full[hyp].resize(16);
  for (int a = 0; a < 16; ++a) {
    const int ci = a / 4, cj = a % 4;
    m.inc[a] = {0, 0, 0, 0};
    m.inc[a][ci] += 1;
    m.inc[a][cj] += 1;
    m.p_full[0][a] = pf4(ci) * pf4(cj);
    m.p_full[1][a] = pd4(ci) * pd4(cj);
  }
  for (int c = 0; c < 4; ++c) {
    m.unit_logp[0][c] = std::log(pf4(c));
    m.unit_logp[1][c] = std::log(pd4(c));
  }
  const double g = op.gamma_h;
  auto logd = [g](double s) {
    Eigen::MatrixXd out(16, 16);
    for (int a = 0; a < 16; ++a)
      for (int a1 = 0; a1 < 16; ++a1)
        out(a, a1) = log_d_factor(SchemeKind::ThresholdChanging, 1.0, g, s, a, a1);
    return out;
  };
  m.logD1 = logd(0.25);
  m.logD2_of_s = logd;
  return m;
}

}  // namespace

BoundResult bound_parallel(const HomogeneousOperatingPoint& op, BoundAggregation agg) {
  op.validate();
  const int M = find_M(op.Pd, op.Pf, op.pi0, op.K);
  return assemble_bound(model_parallel_like(op, SchemeKind::Parallel, nullptr), agg, M);
}

BoundResult bound_stc(const HomogeneousOperatingPoint& op, BoundAggregation agg) {
  op.validate();
  if (!(op.alpha > 0.0 && op.alpha < 1.0)) throw std::invalid_argument("alpha in (0,1)");
  if (!(op.gamma_hs >= 0.0)) throw std::invalid_argument("gamma_hs must be nonnegative");
  const int M = find_M(op.Pd, op.Pf, op.pi0, op.K);
  return assemble_bound(model_stc(op), agg, M);
}

namespace {

std::array<Eigen::Vector4d, 2> fusion_pair_tables(const HomogeneousOperatingPoint& op,
                                                  const DecisionPrior& prior) {
  if (prior.scheme != SchemeKind::FusionAtSensors)
    throw std::invalid_argument("prior is not a fusion-scheme prior");
  if (prior.n_nodes() != 1)
    throw std::invalid_argument("bounds require an uncorrelated (rho = 0) prior");
  if (prior.n_pairs() * 2 != op.K) throw std::invalid_argument("prior pair count mismatch");
  for (int s = 1; s < prior.n_pairs(); ++s)
    for (int hyp = 0; hyp < 2; ++hyp)
      if (!prior.tables[hyp][s].isApprox(prior.tables[hyp][0], 1e-12))
        throw std::invalid_argument("bounds require homogeneous pairs");
  std::array<Eigen::Vector4d, 2> t;
  for (int hyp = 0; hyp < 2; ++hyp) t[hyp] = prior.tables[hyp][0].row(0).transpose();
  return t;
}

}  // namespace

BoundResult bound_fusion(const HomogeneousOperatingPoint& op, const DecisionPrior& prior,
                         BoundAggregation agg) {
  op.validate();
  const auto tables = fusion_pair_tables(op, prior);
  return assemble_bound(model_parallel_like(op, SchemeKind::FusionAtSensors, &tables), agg, -1);
}

BoundResult bound_threshold(const HomogeneousOperatingPoint& op,
                            const Eigen::Vector4d& four_state_d,
                            const Eigen::Vector4d& four_state_f, BoundAggregation agg) {
  op.validate();
  return assemble_bound(model_threshold(op, four_state_d, four_state_f), agg, -1);
}

std::pair<Eigen::Vector4d, Eigen::Vector4d> threshold_four_state_probs(double sigma_w,
                                                                       double pi0) {
  const double tau = local_threshold(sigma_w, pi0);
  const auto [pd, pf] = detection_probs(sigma_w, tau);
  const auto [t1, t2] = threshold_pair_uncorrelated(sigma_w, pi0, pd, pf);
  Eigen::Vector4d d, f;
  for (int hyp = 1; hyp >= 0; --hyp) {
    const double mean = hyp;
    auto cdf = [&](double x) { return normal_cdf((x - mean) / sigma_w); };
    Eigen::Vector4d& out = hyp == 1 ? d : f;
    out(0) = 1.0 - cdf(t1);
    out(1) = cdf(t1) - cdf(tau);
    out(2) = cdf(tau) - cdf(t2);
    out(3) = cdf(t2);
  }
  return {d, f};
}

double scheme_error_floor_parallel(const HomogeneousOperatingPoint& op) {
  const MembershipInfo info = membership(model_parallel_like(op, SchemeKind::Parallel, nullptr));
  return info.e1_indicator + info.e2_indicator;
}

double scheme_error_floor_fusion(const HomogeneousOperatingPoint& op,
                                 const DecisionPrior& prior) {
  const auto tables = fusion_pair_tables(op, prior);
  const MembershipInfo info = membership(model_parallel_like(op, SchemeKind::FusionAtSensors, &tables));
  return info.e1_indicator + info.e2_indicator;
}

double scheme_error_floor_threshold(const HomogeneousOperatingPoint& op,
                                    const Eigen::Vector4d& four_state_d,
                                    const Eigen::Vector4d& four_state_f) {
  const MembershipInfo info = membership(model_threshold(op, four_state_d, four_state_f));
  return info.e1_indicator + info.e2_indicator;
}

namespace {

ExponentReport asymptotics_from_model(const PairModel& m, const BoundResult& bound) {
  ExponentReport rep;
  rep.t0 = bound.t_star;
  const MembershipInfo info = membership(m);
  if (info.s1_count == 0.0 || info.s0_count == 0.0)
    throw std::domain_error("empty S0/S1 set: asymptotic terms undefined");

  // max LRT below 1 (and max inverse LRT below 1) over achievable sequences
  double lrt_max = -std::numeric_limits<double>::infinity();
  double lrt_inv_max = -std::numeric_limits<double>::infinity();
  const std::vector<double> ones(m.n_states, 1.0);
  for (const auto& [key, cnt] : one_sided_dp(m, ones)) {
    (void)cnt;
    const double llr = stat_llr(m, stat_from_key(key));
    if (llr < 0.0) lrt_max = std::max(lrt_max, llr);
    if (llr > 0.0) lrt_inv_max = std::max(lrt_inv_max, -llr);
  }
  if (lrt_max == -std::numeric_limits<double>::infinity())
    throw std::domain_error("LRT_max undefined: no sub-unity configuration");

  const double pi0 = m.pi0, pi1 = 1.0 - m.pi0;
  auto moments12 = [&](int hyp) {
    double mu = 0.0, m2 = 0.0;
    for (int a = 0; a < m.n_states; ++a) {
      const double v = std::log(m.p_full[1][a]) - std::log(m.p_full[0][a]);
      const double p = m.p_full[hyp][a];
      mu += p * v;
      m2 += p * v * v;
    }
    return std::pair<double, double>{mu, m2 - mu * mu};
  };

  {  // e12: log-likelihood ratio of the pair decisions under H0
    auto [mu, s2] = moments12(0);
    rep.terms[1] = {mu, s2, 0.5, mu * mu / (2.0 * s2)};
  }
  {  // e22: same statistic under H1
    auto [mu, s2] = moments12(1);
    rep.terms[3] = {mu, s2, 0.5, mu * mu / (2.0 * s2)};
  }
  {  // e11
    double mu = 0.0, m2 = 0.0;
    for (int a = 0; a < m.n_states; ++a)
      for (int a1 = 0; a1 < m.n_states; ++a1) {
        const double v = m.logD1(a, a1) - 0.5 * std::log(m.p_full[0][a]) -
                         0.5 * std::log(m.p_full[1][a1]);
        const double p = m.p_full[0][a] * m.p_full[1][a1];
        mu += p * v;
        m2 += p * v * v;
      }
    const double s2 = m2 - mu * mu;
    const double kappa =
        std::sqrt(pi0 * pi1) / (2.0 * std::sqrt(info.s1_count)) /
        std::sqrt(1.0 - std::exp(lrt_max));
    rep.terms[0] = {mu, s2, kappa, -(mu + 0.5 * s2)};
    rep.e11_mean_ok = mu + 0.5 * s2 < 0.0;
  }
  {  // e21
    const double t0 = rep.t0;
    const Eigen::MatrixXd logD2 = m.logD2_of_s(t0 - t0 * t0);
    double mu = 0.0, m2 = 0.0;
    for (int a = 0; a < m.n_states; ++a)
      for (int a1 = 0; a1 < m.n_states; ++a1) {
        const double v = logD2(a, a1) - t0 * std::log(m.p_full[1][a]) -
                         (1.0 - t0) * std::log(m.p_full[0][a1]);
        const double p = m.p_full[1][a] * m.p_full[0][a1];
        mu += p * v;
        m2 += p * v * v;
      }
    const double s2 = m2 - mu * mu;
    const double kappa = std::pow(info.s0_count, t0 - 1.0) * std::pow(pi0, t0) *
                         std::pow(pi1, 1.0 - t0) /
                         std::pow(1.0 - std::exp(lrt_inv_max), t0);
    rep.terms[2] = {mu, s2, kappa, -(mu + 0.5 * s2)};
    rep.e21_mean_ok = mu + 0.5 * s2 < 0.0;
  }
  rep.gamma_x = std::min(std::min(rep.terms[0].rate, rep.terms[1].rate),
                         std::min(rep.terms[2].rate, rep.terms[3].rate));
  return rep;
}

}  // namespace

ExponentReport asymptotics_parallel(const HomogeneousOperatingPoint& op) {
  op.validate();
  const PairModel m = model_parallel_like(op, SchemeKind::Parallel, nullptr);
  return asymptotics_from_model(m, bound_parallel(op));
}

ExponentReport asymptotics_stc(const HomogeneousOperatingPoint& op) {
  op.validate();
  const PairModel m = model_stc(op);
  return asymptotics_from_model(m, bound_stc(op));
}

ExponentReport asymptotics_fusion(const HomogeneousOperatingPoint& op,
                                  const DecisionPrior& prior) {
  op.validate();
  const auto tables = fusion_pair_tables(op, prior);
  const PairModel m = model_parallel_like(op, SchemeKind::FusionAtSensors, &tables);
  return asymptotics_from_model(m, bound_fusion(op, prior));
}

ExponentReport asymptotics_threshold(const HomogeneousOperatingPoint& op,
                                     const Eigen::Vector4d& four_state_d,
                                     const Eigen::Vector4d& four_state_f) {
  op.validate();
  const PairModel m = model_threshold(op, four_state_d, four_state_f);
  return asymptotics_from_model(m, bound_threshold(op, four_state_d, four_state_f));
}

}  // namespace decifuse
