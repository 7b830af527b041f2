#include "decifuse/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "decifuse/math.hpp"
#include "doctest.h"

using namespace decifuse;

namespace {

DecisionPrior closed_prior(SchemeKind scheme, const SensingModel& sm, const NetworkConfig& net) {
  Stream rng(7);
  return build_decision_prior(scheme, sm, net, PriorMethod::ClosedForm, 0, rng);
}

// Semi-analytic average error of the K = 2 parallel LRT: channel draws times
// exact enumeration over local-decision configurations, with the error
// probability of each configuration reduced to a single Q-function through
// the scalar matched-filter statistics.  Independent of lrt_decide.
struct SemiAnalyticParallelK2 {
  double pd, pf, pi0, sigma_v2;

  double g_of(double psi, bool invert = false) const {
    const double num = log_sum_exp(std::log(pd) + psi, std::log1p(-pd) - psi);
    const double den = log_sum_exp(std::log(pf) + psi, std::log1p(-pf) - psi);
    (void)invert;
    return num - den;
  }

  // P(g(psi) > c) for psi ~ N(mean, var); g is strictly increasing
  double tail_of_g(double c, double mean, double var) const {
    const double lo_lim = std::log((1.0 - pd) / (1.0 - pf));
    const double hi_lim = std::log(pd / pf);
    if (c >= hi_lim) return 0.0;
    if (c <= lo_lim) return 1.0;
    double lo = -1e3, hi = 1e3;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g_of(mid) > c ? hi : lo) = mid;
    }
    return qfunc((0.5 * (lo + hi) - mean) / std::sqrt(var));
  }

  // conditional error probability given hypothesis and channel pair
  double conditional_error(Hypothesis l, cd h1, cd h2) const {
    const double thr = std::log(pi0 / (1.0 - pi0));
    const double a1 = 2.0 * std::norm(h1) / sigma_v2;  // psi mean scale
    const double a2 = 2.0 * std::norm(h2) / sigma_v2;
    const double v1 = 2.0 * std::norm(h1) / sigma_v2;
    const double v2 = 2.0 * std::norm(h2) / sigma_v2;
    const Quadrature gh = gauss_hermite_prob(48);
    const double p_plus = l == Hypothesis::H1 ? pd : pf;
    double err = 0.0;
    for (int u1 : {-1, 1})
      for (int u2 : {-1, 1}) {
        const double p_cfg = (u1 == 1 ? p_plus : 1.0 - p_plus) *
                             (u2 == 1 ? p_plus : 1.0 - p_plus);
        // P(g(psi1) + g(psi2) > thr | config): quadrature over psi2
        double p_exceed = 0.0;
        for (int q = 0; q < gh.nodes.size(); ++q) {
          const double psi2 = u2 * a2 + std::sqrt(v2) * gh.nodes(q);
          p_exceed += gh.weights(q) * tail_of_g(thr - g_of(psi2), u1 * a1, v1);
        }
        err += p_cfg * (l == Hypothesis::H0 ? p_exceed : 1.0 - p_exceed);
      }
    return err;
  }
};

}  // namespace

TEST_CASE("estimate_pe is deterministic across worker counts") {
  const SensingModel sm = SensingModel::homogeneous_from_snr_c(6.0, 4, 0.6);
  const NetworkConfig net = NetworkConfig::homogeneous_from_snr(8.0, 4);
  const DecisionPrior prior = closed_prior(SchemeKind::Parallel, sm, net);
  const ErrorEstimate a =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, 50000, 99, &prior, 1);
  const ErrorEstimate b =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, 50000, 99, &prior, 4);
  CHECK(a.err0 == b.err0);
  CHECK(a.err1 == b.err1);
  CHECK(a.n0 == b.n0);
  CHECK(a.pe_hat == b.pe_hat);
  CHECK(a.stderr_ == b.stderr_);
  // different seed moves the estimate
  const ErrorEstimate c =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, 50000, 100, &prior, 2);
  CHECK(c.err0 + c.err1 != a.err0 + a.err1);
}

TEST_CASE("noiseless trials never err") {
  SensingModel sm = SensingModel::homogeneous_from_snr_c(22.0, 4, 0.6);  // sigma_w ~ 0.08
  NetworkConfig net = NetworkConfig::homogeneous_from_snr(140.0, 4);     // essentially noiseless
  const DecisionPrior prior = closed_prior(SchemeKind::Parallel, sm, net);
  const ErrorEstimate est =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, 20000, 5, &prior);
  CHECK(est.pe_hat == 0.0);
}

TEST_CASE("stderr shrinks like one over sqrt(trials)") {
  const SensingModel sm = SensingModel::homogeneous_from_snr_c(6.0, 4, 0.6);
  const NetworkConfig net = NetworkConfig::homogeneous_from_snr(5.0, 4);
  const DecisionPrior prior = closed_prior(SchemeKind::Parallel, sm, net);
  const ErrorEstimate small =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, 20000, 7, &prior);
  const ErrorEstimate large =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, 200000, 7, &prior);
  CHECK(small.stderr_ / large.stderr_ == doctest::Approx(std::sqrt(10.0)).epsilon(0.15));
}

TEST_CASE("K=2 parallel estimate matches the semi-analytic channel average") {
  const double snr_c = 6.0, snr_h = 8.0, pi0 = 0.6;
  const SensingModel sm = SensingModel::homogeneous_from_snr_c(snr_c, 2, pi0);
  const NetworkConfig net = NetworkConfig::homogeneous_from_snr(snr_h, 2);
  const double tau = local_threshold(sm.sigma_w(0), pi0);
  const auto [pd, pf] = detection_probs(sm.sigma_w(0), tau);

  SemiAnalyticParallelK2 ref{pd, pf, pi0, net.sigma_v2};
  Stream hdraw = make_stream(404, 0, 0);
  const int n_draws = 10000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const cd h1 = hdraw.complex_gaussian(net.sigma_h2(0));
    const cd h2 = hdraw.complex_gaussian(net.sigma_h2(1));
    const double pe_cond = pi0 * ref.conditional_error(Hypothesis::H0, h1, h2) +
                           (1.0 - pi0) * ref.conditional_error(Hypothesis::H1, h1, h2);
    acc += pe_cond;
    acc2 += pe_cond * pe_cond;
  }
  const double pe_semi = acc / n_draws;
  const double se_semi =
      std::sqrt((acc2 / n_draws - pe_semi * pe_semi) / n_draws);

  const DecisionPrior prior = closed_prior(SchemeKind::Parallel, sm, net);
  const long trials = 400000;
  const ErrorEstimate est =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, trials, 17, &prior);
  const double se = std::sqrt(est.stderr_ * est.stderr_ + se_semi * se_semi);
  CHECK(std::abs(est.pe_hat - pe_semi) < 4.0 * se);
}

TEST_CASE("fusion with a dead inter-node channel matches parallel at equal FC power") {
  // alpha -> 1: no information crosses the exchange, the updated decisions
  // coincide with the initial ones and the FC power equals the parallel one
  const double snr_c = 6.0, snr_h = 8.0, pi0 = 0.6;
  const int K = 4;
  const SensingModel sm = SensingModel::homogeneous_from_snr_c(snr_c, K, pi0);
  const NetworkConfig net_par = NetworkConfig::homogeneous_from_snr(snr_h, K);
  NetworkConfig net_fus = NetworkConfig::homogeneous_from_snr(snr_h, K, 1.0 - 1e-9);
  const DecisionPrior prior_par = closed_prior(SchemeKind::Parallel, sm, net_par);
  const DecisionPrior prior_fus = closed_prior(SchemeKind::FusionAtSensors, sm, net_fus);
  const long trials = 200000;
  const ErrorEstimate a =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net_par, trials, 31, &prior_par);
  const ErrorEstimate b =
      estimate_pe(SchemeKind::FusionAtSensors, Rule::Lrt, sm, net_fus, trials, 32, &prior_fus);
  CHECK(a.ci_lo() < b.ci_hi());
  CHECK(b.ci_lo() < a.ci_hi());
}

TEST_CASE("majority and LRT coincide on the symmetric noiseless pair") {
  // pi0 = 1/2, symmetric operating point, high channel SNR: both rules reduce
  // to sign decisions; estimates must agree within CI resolution
  const SensingModel sm = SensingModel::homogeneous_from_snr_c(6.0, 2, 0.5);
  const NetworkConfig net = NetworkConfig::homogeneous_from_snr(30.0, 2);
  const DecisionPrior prior = closed_prior(SchemeKind::Parallel, sm, net);
  const long trials = 200000;
  const ErrorEstimate lrt =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, trials, 8, &prior);
  const ErrorEstimate maj =
      estimate_pe(SchemeKind::Parallel, Rule::Majority, sm, net, trials, 8);
  CHECK(lrt.ci_lo() < maj.ci_hi());
  CHECK(maj.ci_lo() < lrt.ci_hi());
}

TEST_CASE("parallel LRT error is symmetric at the symmetric operating point") {
  const SensingModel sm = SensingModel::homogeneous_from_snr_c(6.0, 4, 0.5);
  const NetworkConfig net = NetworkConfig::homogeneous_from_snr(8.0, 4);
  const DecisionPrior prior = closed_prior(SchemeKind::Parallel, sm, net);
  const ErrorEstimate est =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, 400000, 21, &prior);
  const double se = std::sqrt(est.pe_h0 * (1 - est.pe_h0) / est.n0 +
                              est.pe_h1 * (1 - est.pe_h1) / est.n1);
  CHECK(std::abs(est.pe_h0 - est.pe_h1) < 4.0 * se);
}

TEST_CASE("sweep_alpha validates inputs and is deterministic") {
  const SensingModel sm = SensingModel::homogeneous_from_snr_c(6.0, 2, 0.6);
  const NetworkConfig net = NetworkConfig::homogeneous_from_snr(5.0, 2);
  CHECK_THROWS_AS(sweep_alpha(SchemeKind::Parallel, Rule::Lrt, sm, net, {0.5}, 10000, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_alpha(SchemeKind::StcAtSensors, Rule::Lrt, sm, net, {1.5}, 10000, 1),
                  std::invalid_argument);
  const std::vector<double> grid{0.3, 0.5, 0.7};
  const AlphaSweepResult a = sweep_alpha(SchemeKind::StcAtSensors, Rule::Majority, sm, net,
                                         grid, 20000, 5);
  const AlphaSweepResult b = sweep_alpha(SchemeKind::StcAtSensors, Rule::Majority, sm, net,
                                         grid, 20000, 5);
  CHECK(a.alpha_star == b.alpha_star);
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(a.rows[i].estimate.pe_hat == b.rows[i].estimate.pe_hat);
}

TEST_CASE("default alpha grid") {
  const auto grid = default_alpha_grid(0.05);
  CHECK(grid.size() == 19);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == doctest::Approx(0.95));
}

TEST_CASE("run_experiment basics") {
  ExperimentConfig cfg;
  cfg.schemes = {SchemeKind::Parallel};
  cfg.rules = {Rule::Majority};
  cfg.snr_c_db = {6.0};
  cfg.snr_h_db = {5.0};
  cfg.K = 4;
  cfg.pi0 = 0.6;
  cfg.trials = 20000;
  cfg.master_seed = 77;

  SUBCASE("one-cell run reproduces estimate_pe exactly") {
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 1);
    const SensingModel sm = SensingModel::homogeneous_from_snr_c(6.0, 4, 0.6);
    const NetworkConfig net = NetworkConfig::homogeneous_from_snr(5.0, 4);
    const ErrorEstimate est =
        estimate_pe(SchemeKind::Parallel, Rule::Majority, sm, net, 20000, 77);
    CHECK(rows[0].pe_hat == est.pe_hat);
    CHECK(rows[0].stderr_ == est.stderr_);
    CHECK(rows[0].floor.has_value());
    CHECK(rows[0].pe_bound.has_value());
  }

  SUBCASE("grid arithmetic: 3 x 3 x 4 schemes emits 36 rows") {
    ExperimentConfig grid = cfg;
    grid.schemes = {SchemeKind::Parallel, SchemeKind::StcAtSensors,
                    SchemeKind::FusionAtSensors, SchemeKind::ThresholdChanging};
    grid.snr_c_db = {2.0, 6.0, 10.0};
    grid.snr_h_db = {5.0, 10.0, 15.0};
    grid.trials = 10000;
    grid.alpha = {0.65};
    const auto rows = run_experiment(grid);
    CHECK(rows.size() == 36);
  }

  SUBCASE("rerun writes byte-identical CSV") {
    ExperimentConfig out = cfg;
    out.output = "harness_rerun_a.csv";
    run_experiment(out);
    out.output = "harness_rerun_b.csv";
    run_experiment(out);
    std::ifstream fa("harness_rerun_a.csv"), fb("harness_rerun_b.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().find("scheme,rule,K,rho,pi0,snr_c_db,snr_h_db,alpha,trials,pe_hat,stderr,"
                        "pe_bound,error_floor,seed") == 0);
    std::remove("harness_rerun_a.csv");
    std::remove("harness_rerun_b.csv");
  }
}

TEST_CASE("CSV numbers round-trip at 17 significant digits") {
  ResultRow row;
  row.scheme = SchemeKind::Parallel;
  row.rule = Rule::Lrt;
  row.K = 10;
  row.rho = 0.0;
  row.pi0 = 0.6;
  row.snr_c_db = 6.0;
  row.snr_h_db = 10.0;
  row.alpha = std::nullopt;
  row.trials = 1000000;
  row.pe_hat = 0.0073219384719238471;
  row.stderr_ = 8.3812973e-05;
  row.pe_bound = std::nullopt;
  row.floor = 0.0056931823881238112;
  row.seed = 123456789;
  const std::string line = csv_line(row);
  // pull pe_hat back out (field 10)
  std::stringstream ss(line);
  std::string field;
  for (int i = 0; i < 10; ++i) std::getline(ss, field, ',');
  CHECK(std::stod(field) == row.pe_hat);
}

TEST_CASE("error-floor convergence at very high channel SNR (small K smoke)") {
  const double snr_c = 6.0, pi0 = 0.6;
  const int K = 4;
  const SensingModel sm = SensingModel::homogeneous_from_snr_c(snr_c, K, pi0);
  const NetworkConfig net = NetworkConfig::homogeneous_from_snr(40.0, K);
  const DecisionPrior prior = closed_prior(SchemeKind::Parallel, sm, net);
  const ErrorEstimate est =
      estimate_pe(SchemeKind::Parallel, Rule::Lrt, sm, net, 200000, 3, &prior);
  const double tau = local_threshold(sm.sigma_w(0), pi0);
  const auto [pd, pf] = detection_probs(sm.sigma_w(0), tau);
  const double floor = error_floor(pd, pf, pi0, K);
  CHECK(std::abs(est.pe_hat - floor) < std::max(3.0 * est.stderr_, 0.05 * floor));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.schemes = {SchemeKind::Parallel};
  cfg.rules = {Rule::Lrt};
  cfg.snr_c_db = {6.0};
  cfg.snr_h_db = {5.0};
  cfg.trials = 100;  // too small
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.trials = 10000;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = {1.5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
