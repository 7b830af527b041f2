#include "decifuse/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

namespace decifuse {

const char* rule_name(Rule r) { return r == Rule::Lrt ? "lrt" : "majority"; }

Rule rule_from_name(const std::string& name) {
  if (name == "lrt") return Rule::Lrt;
  if (name == "majority") return Rule::Majority;
  throw std::invalid_argument("unknown rule: " + name);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DECIFUSE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::uint64_t cell_id(SchemeKind scheme, Rule rule, const SensingModel& sensing,
                      const NetworkConfig& net) {
  std::uint64_t h = 0x6b43a9b5u;
  h = hash_combine(h, static_cast<std::uint64_t>(scheme));
  h = hash_combine(h, static_cast<std::uint64_t>(rule));
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
  return h;
}

ErrorEstimate estimate_pe(SchemeKind scheme, Rule rule, const SensingModel& sensing,
                          const NetworkConfig& net, long trials, std::uint64_t master_seed,
                          const DecisionPrior* prior, int threads) {
  sensing.validate();
  net.validate(scheme_uses_alpha(scheme));
  if (rule == Rule::Lrt && prior == nullptr)
    throw std::invalid_argument("LRT fusion requires a DecisionPrior");
  if (trials < 1) throw std::invalid_argument("trials must be positive");

  const std::uint64_t cell = cell_id(scheme, rule, sensing, net);
  const int n_threads =
      static_cast<int>(std::max<long>(1, std::min<long>(resolve_threads(threads), trials)));

  struct Tally {
    long n0 = 0, n1 = 0, err0 = 0, err1 = 0;
  };
  std::vector<Tally> tallies(n_threads);

  auto worker = [&](int tid, long begin, long end) {
    Tally& t = tallies[tid];
    for (long i = begin; i < end; ++i) {
      Stream rng = make_stream(master_seed, cell, static_cast<std::uint64_t>(i));
      const Hypothesis truth = rng.bernoulli(sensing.pi0) ? Hypothesis::H0 : Hypothesis::H1;
      const TrialRecord rec = run_trial(scheme, sensing, net, truth, rng);
      const FcDecision dec =
          rule == Rule::Lrt
              ? lrt_decide(scheme, *prior, rec.fc_signals, rec.channels, net, sensing.pi0)
              : majority_decide(scheme, rec.fc_signals, rec.channels, net, sensing.pi0);
      const bool err = dec.decided != truth;
      if (truth == Hypothesis::H0) {
        ++t.n0;
        t.err0 += err;
      } else {
        ++t.n1;
        t.err1 += err;
      }
    }
  };

  if (n_threads == 1) {
    worker(0, 0, trials);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(worker, t, trials * t / n_threads, trials * (t + 1) / n_threads);
    for (auto& th : pool) th.join();
  }

  ErrorEstimate est;
  est.trials = trials;
  for (const auto& t : tallies) {
    est.n0 += t.n0;
    est.n1 += t.n1;
    est.err0 += t.err0;
    est.err1 += t.err1;
  }
  est.pe_h0 = est.n0 > 0 ? static_cast<double>(est.err0) / est.n0 : 0.0;
  est.pe_h1 = est.n1 > 0 ? static_cast<double>(est.err1) / est.n1 : 0.0;
  const double pi0 = sensing.pi0, pi1 = 1.0 - sensing.pi0;
  est.pe_hat = pi0 * est.pe_h0 + pi1 * est.pe_h1;
  double var = 0.0;
  if (est.n0 > 0) var += pi0 * pi0 * est.pe_h0 * (1.0 - est.pe_h0) / est.n0;
  if (est.n1 > 0) var += pi1 * pi1 * est.pe_h1 * (1.0 - est.pe_h1) / est.n1;
  est.stderr_ = std::sqrt(var);
  return est;
}

std::vector<double> default_alpha_grid(double step) {
  std::vector<double> grid;
  for (double a = step; a < 1.0 - step / 2.0; a += step) grid.push_back(a);
  return grid;
}

AlphaSweepResult sweep_alpha(SchemeKind scheme, Rule rule, const SensingModel& sensing,
                             const NetworkConfig& net, const std::vector<double>& alpha_grid,
                             long trials, std::uint64_t master_seed, PriorMethod prior_method,
                             long prior_samples, int threads) {
  if (!scheme_uses_alpha(scheme))
    throw std::invalid_argument("alpha sweep applies to the STC and fusion schemes only");
  if (alpha_grid.empty()) throw std::invalid_argument("alpha grid must be non-empty");
  for (double a : alpha_grid)
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha grid entries must be in (0,1)");

  AlphaSweepResult out;
  double best = std::numeric_limits<double>::infinity();
  for (double a : alpha_grid) {
    NetworkConfig n = net;
    n.alpha = a;
    DecisionPrior prior;
    if (rule == Rule::Lrt) {
      Stream prng(prior_cache_key(scheme, sensing, n, prior_method, prior_samples, 33));
      prior = build_decision_prior(scheme, sensing, n, prior_method, prior_samples, prng, 33,
                                   resolve_threads(threads));
    }
    const ErrorEstimate est =
        estimate_pe(scheme, rule, sensing, n, trials, master_seed,
                    rule == Rule::Lrt ? &prior : nullptr, threads);
    if (est.pe_hat < best) {
      best = est.pe_hat;
      out.alpha_star = a;
    }
    out.rows.push_back({a, est});
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (schemes.empty() || rules.empty() || snr_c_db.empty() || snr_h_db.empty())
    throw std::invalid_argument("experiment grids must be non-empty");
  if (trials < 10000) throw std::invalid_argument("trials must be >= 1e4");
  if (K < 2 || K % 2 != 0) throw std::invalid_argument("K must be even and >= 2");
  if (!(pi0 > 0.0 && pi0 < 1.0)) throw std::invalid_argument("pi0 must lie in (0,1)");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");
  if (!alpha_auto)
    for (double a : alpha)
      if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

std::string csv_header() {
  return "scheme,rule,K,rho,pi0,snr_c_db,snr_h_db,alpha,trials,pe_hat,stderr,pe_bound,"
         "error_floor,seed";
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_line(const ResultRow& r) {
  std::string line;
  line += scheme_name(r.scheme);
  line += ',';
  line += rule_name(r.rule);
  line += ',' + std::to_string(r.K);
  line += ',' + fmt17(r.rho);
  line += ',' + fmt17(r.pi0);
  line += ',' + fmt17(r.snr_c_db);
  line += ',' + fmt17(r.snr_h_db);
  line += ',';
  if (r.alpha) line += fmt17(*r.alpha);
  line += ',' + std::to_string(r.trials);
  line += ',' + fmt17(r.pe_hat);
  line += ',' + fmt17(r.stderr_);
  line += ',';
  if (r.pe_bound) line += fmt17(*r.pe_bound);
  line += ',';
  if (r.floor) line += fmt17(*r.floor);
  line += ',' + std::to_string(r.seed);
  return line;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  std::vector<ResultRow> rows;
  std::map<std::uint64_t, DecisionPrior> prior_cache;

  auto get_prior = [&](SchemeKind scheme, const SensingModel& sensing,
                       const NetworkConfig& net) -> const DecisionPrior& {
    PriorMethod method = config.prior_method;
    if (method == PriorMethod::ClosedForm && scheme == SchemeKind::FusionAtSensors &&
        sensing.rho != 0.0)
      method = PriorMethod::MonteCarlo;  // closed form unavailable there
    const std::uint64_t key =
        prior_cache_key(scheme, sensing, net, method, config.prior_samples, 33);
    auto it = prior_cache.find(key);
    if (it == prior_cache.end()) {
      Stream prng(key);
      it = prior_cache
               .emplace(key, build_decision_prior(scheme, sensing, net, method,
                                                  config.prior_samples, prng, 33,
                                                  resolve_threads(threads)))
               .first;
    }
    return it->second;
  };

  for (SchemeKind scheme : config.schemes)
    for (Rule rule : config.rules)
      for (double snr_c : config.snr_c_db)
        for (double snr_h : config.snr_h_db) {
          const SensingModel sensing =
              SensingModel::homogeneous_from_snr_c(snr_c, config.K, config.pi0, config.rho);

          std::vector<std::optional<double>> alphas;
          if (!scheme_uses_alpha(scheme)) {
            alphas.push_back(std::nullopt);
          } else if (config.alpha_auto) {
            NetworkConfig net = NetworkConfig::homogeneous_from_snr(
                snr_h, config.K, 0.5, config.d_m, config.d0_m, config.epsilon, config.G_db,
                config.noise_dbm);
            const AlphaSweepResult sweep = sweep_alpha(
                scheme, rule, sensing, net, default_alpha_grid(config.alpha_grid_step),
                config.sweep_trials, config.master_seed, config.prior_method,
                config.prior_samples, threads);
            alphas.push_back(sweep.alpha_star);
          } else if (config.alpha.empty()) {
            alphas.push_back(0.5);
          } else {
            for (double a : config.alpha) alphas.push_back(a);
          }

          for (const auto& alpha : alphas) {
            NetworkConfig net = NetworkConfig::homogeneous_from_snr(
                snr_h, config.K, alpha.value_or(0.5), config.d_m, config.d0_m, config.epsilon,
                config.G_db, config.noise_dbm);
            const DecisionPrior* prior = nullptr;
            if (rule == Rule::Lrt) prior = &get_prior(scheme, sensing, net);
            const ErrorEstimate est = estimate_pe(scheme, rule, sensing, net, config.trials,
                                                  config.master_seed, prior, threads);
            ResultRow row;
            row.scheme = scheme;
            row.rule = rule;
            row.K = config.K;
            row.rho = config.rho;
            row.pi0 = config.pi0;
            row.snr_c_db = snr_c;
            row.snr_h_db = snr_h;
            row.alpha = alpha;
            row.trials = config.trials;
            row.pe_hat = est.pe_hat;
            row.stderr_ = est.stderr_;
            row.seed = config.master_seed;
            if (config.rho == 0.0) {
              const HomogeneousOperatingPoint op = HomogeneousOperatingPoint::from_snr(
                  scheme, snr_c, snr_h, config.pi0, config.K, alpha.value_or(0.5), config.d_m,
                  config.d0_m, config.epsilon);
              switch (scheme) {
                case SchemeKind::Parallel:
                  row.pe_bound = bound_parallel(op).pe;
                  row.floor = error_floor(op.Pd, op.Pf, op.pi0, op.K);
                  break;
                case SchemeKind::StcAtSensors:
                  row.pe_bound = bound_stc(op).pe;
                  row.floor = error_floor(op.Pd, op.Pf, op.pi0, op.K);
                  break;
                case SchemeKind::FusionAtSensors: {
                  Stream prng(prior_cache_key(scheme, sensing, net, PriorMethod::ClosedForm, 0,
                                              33));
                  const DecisionPrior cf = build_decision_prior(
                      scheme, sensing, net, PriorMethod::ClosedForm, 0, prng);
                  row.pe_bound = bound_fusion(op, cf).pe;
                  row.floor = scheme_error_floor_fusion(op, cf);
                  break;
                }
                case SchemeKind::ThresholdChanging: {
                  const auto [d4, f4] =
                      threshold_four_state_probs(sigma_w_from_snr_c(snr_c), config.pi0);
                  row.pe_bound = bound_threshold(op, d4, f4).pe;
                  row.floor = scheme_error_floor_threshold(op, d4, f4);
                  break;
                }
              }
            }
            rows.push_back(row);
          }
        }

  if (!config.output.empty()) {
    std::ofstream out(config.output);
    if (!out) throw std::runtime_error("cannot open output path: " + config.output);
    out << csv_header() << "\n";
    for (const auto& row : rows) out << csv_line(row) << "\n";
  }
  return rows;
}

}  // namespace decifuse
