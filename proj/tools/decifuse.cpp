// decifuse: distributed-detection simulation and analysis over Rayleigh fading
//
// Subcommands: simulate, sweep-alpha, bound, floor, asymptotics, compare.
// Exit codes: 0 success, 1 computational error, 2 usage/config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "decifuse/harness.hpp"
#include "json.hpp"

using namespace decifuse;
using nlohmann::json;

namespace {

constexpr const char* kConfigKeys[] = {
    "schemes",       "rules",        "snr_c_db",        "snr_h_db",     "rho",
    "pi0",           "K",            "alpha",           "trials",       "sweep_trials",
    "alpha_grid_step", "master_seed", "prior_method",   "prior_samples", "output"};

json default_config_json() {
  json j;
  j["schemes"] = {"parallel", "stc", "fusion", "threshold"};
  j["rules"] = {"lrt"};
  j["snr_c_db"] = {6.0};
  j["snr_h_db"] = {10.0};
  j["rho"] = 0.0;
  j["pi0"] = 0.6;
  j["K"] = 10;
  j["alpha"] = "auto";
  j["trials"] = 1000000;
  j["sweep_trials"] = 200000;
  j["alpha_grid_step"] = 0.05;
  j["master_seed"] = 1;
  j["prior_method"] = "monte_carlo";
  j["prior_samples"] = 1000000;
  j["output"] = "";
  return j;
}

void reject_unknown_keys(const json& j) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* k : kConfigKeys) known |= key == k;
    if (!known) throw std::invalid_argument("unknown config key: " + key);
  }
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown_keys(j);
  json merged = default_config_json();
  merged.update(j);
  ExperimentConfig cfg;
  for (const auto& name : merged.at("schemes"))
    cfg.schemes.push_back(scheme_from_name(name.get<std::string>()));
  for (const auto& name : merged.at("rules"))
    cfg.rules.push_back(rule_from_name(name.get<std::string>()));
  cfg.snr_c_db = merged.at("snr_c_db").get<std::vector<double>>();
  cfg.snr_h_db = merged.at("snr_h_db").get<std::vector<double>>();
  cfg.rho = merged.at("rho").get<double>();
  cfg.pi0 = merged.at("pi0").get<double>();
  cfg.K = merged.at("K").get<int>();
  if (merged.at("alpha").is_string()) {
    if (merged.at("alpha").get<std::string>() != "auto")
      throw std::invalid_argument("alpha must be a list of values or \"auto\"");
    cfg.alpha_auto = true;
  } else {
    cfg.alpha = merged.at("alpha").get<std::vector<double>>();
  }
  cfg.trials = merged.at("trials").get<long>();
  cfg.sweep_trials = merged.at("sweep_trials").get<long>();
  cfg.alpha_grid_step = merged.at("alpha_grid_step").get<double>();
  cfg.master_seed = merged.at("master_seed").get<std::uint64_t>();
  const std::string pm = merged.at("prior_method").get<std::string>();
  if (pm == "monte_carlo")
    cfg.prior_method = PriorMethod::MonteCarlo;
  else if (pm == "closed_form")
    cfg.prior_method = PriorMethod::ClosedForm;
  else
    throw std::invalid_argument("prior_method must be monte_carlo or closed_form");
  cfg.prior_samples = merged.at("prior_samples").get<long>();
  cfg.output = merged.at("output").get<std::string>();
  cfg.validate();
  return cfg;
}

json json_from_config(const ExperimentConfig& cfg) {
  json j;
  for (SchemeKind s : cfg.schemes) j["schemes"].push_back(scheme_name(s));
  for (Rule r : cfg.rules) j["rules"].push_back(rule_name(r));
  j["snr_c_db"] = cfg.snr_c_db;
  j["snr_h_db"] = cfg.snr_h_db;
  j["rho"] = cfg.rho;
  j["pi0"] = cfg.pi0;
  j["K"] = cfg.K;
  if (cfg.alpha_auto)
    j["alpha"] = "auto";
  else
    j["alpha"] = cfg.alpha;
  j["trials"] = cfg.trials;
  j["sweep_trials"] = cfg.sweep_trials;
  j["alpha_grid_step"] = cfg.alpha_grid_step;
  j["master_seed"] = cfg.master_seed;
  j["prior_method"] = cfg.prior_method == PriorMethod::MonteCarlo ? "monte_carlo" : "closed_form";
  j["prior_samples"] = cfg.prior_samples;
  j["output"] = cfg.output;
  return j;
}

// "--set key=value" overrides; comma-separated values become arrays
void apply_override(json& j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override must be key=value: " + kv);
  const std::string key = kv.substr(0, eq);
  std::string value = kv.substr(eq + 1);
  bool known = false;
  for (const char* k : kConfigKeys) known |= key == k;
  if (!known) throw std::invalid_argument("unknown config key: " + key);
  std::string payload = value;
  if (value.find(',') != std::string::npos) payload = "[" + value + "]";
  json parsed;
  try {
    parsed = json::parse(payload);
  } catch (const json::parse_error&) {
    parsed = value;  // plain string
  }
  j[key] = parsed;
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json j;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    in >> j;
  }
  for (const auto& kv : overrides) apply_override(j, kv);
  reject_unknown_keys(j);
  return j;
}

HomogeneousOperatingPoint op_from_flags(SchemeKind scheme, double snr_c, double snr_h,
                                        double pi0, int K, double alpha) {
  return HomogeneousOperatingPoint::from_snr(scheme, snr_c, snr_h, pi0, K, alpha);
}

BoundResult bound_for(SchemeKind scheme, const HomogeneousOperatingPoint& op, double snr_c,
                      double snr_h, double pi0, int K, double alpha) {
  switch (scheme) {
    case SchemeKind::Parallel:
      return bound_parallel(op);
    case SchemeKind::StcAtSensors:
      return bound_stc(op);
    case SchemeKind::FusionAtSensors: {
      const SensingModel sm = SensingModel::homogeneous_from_snr_c(snr_c, K, pi0);
      const NetworkConfig net = NetworkConfig::homogeneous_from_snr(snr_h, K, alpha);
      Stream rng(prior_cache_key(scheme, sm, net, PriorMethod::ClosedForm, 0, 33));
      const DecisionPrior prior =
          build_decision_prior(scheme, sm, net, PriorMethod::ClosedForm, 0, rng);
      return bound_fusion(op, prior);
    }
    case SchemeKind::ThresholdChanging: {
      const auto [d4, f4] = threshold_four_state_probs(sigma_w_from_snr_c(snr_c), pi0);
      return bound_threshold(op, d4, f4);
    }
  }
  throw std::logic_error("unreachable");
}

double floor_for(SchemeKind scheme, const HomogeneousOperatingPoint& op, double snr_c,
                 double snr_h, double pi0, int K, double alpha) {
  switch (scheme) {
    case SchemeKind::Parallel:
    case SchemeKind::StcAtSensors:
      return error_floor(op.Pd, op.Pf, pi0, K);
    case SchemeKind::FusionAtSensors: {
      const SensingModel sm = SensingModel::homogeneous_from_snr_c(snr_c, K, pi0);
      const NetworkConfig net = NetworkConfig::homogeneous_from_snr(snr_h, K, alpha);
      Stream rng(prior_cache_key(scheme, sm, net, PriorMethod::ClosedForm, 0, 33));
      const DecisionPrior prior =
          build_decision_prior(scheme, sm, net, PriorMethod::ClosedForm, 0, rng);
      return scheme_error_floor_fusion(op, prior);
    }
    case SchemeKind::ThresholdChanging: {
      const auto [d4, f4] = threshold_four_state_probs(sigma_w_from_snr_c(snr_c), pi0);
      return scheme_error_floor_threshold(op, d4, f4);
    }
  }
  throw std::logic_error("unreachable");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decifuse: distributed detection over Rayleigh fading channels"};
  app.require_subcommand(1);

  // --- simulate / compare ---
  std::string config_path, output_override;
  std::vector<std::string> overrides;
  bool dump_config = false;
  auto add_config_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--set", overrides, "override config entries, key=value")
        ->take_all();
    sub->add_option("-o,--output", output_override, "CSV output path");
    sub->add_flag("--dump-config", dump_config, "print the normalized config and exit");
  };
  CLI::App* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment grid");
  add_config_flags(sim);
  CLI::App* cmp = app.add_subcommand(
      "compare", "run the grid and flag rows where the bound is violated");
  add_config_flags(cmp);

  // --- sweep-alpha ---
  std::string sw_scheme = "stc", sw_rule = "lrt";
  double sw_snr_c = 6.0, sw_snr_h = 5.0, sw_pi0 = 0.6, sw_rho = 0.0, sw_step = 0.05;
  int sw_K = 10;
  long sw_trials = 200000, sw_prior_samples = 1000000;
  std::uint64_t sw_seed = 1;
  std::string sw_output, sw_prior_method = "monte_carlo";
  CLI::App* swp = app.add_subcommand("sweep-alpha", "sweep the power split alpha");
  swp->add_option("--scheme", sw_scheme, "stc or fusion")->required();
  swp->add_option("--rule", sw_rule, "lrt or majority");
  swp->add_option("--snr-c", sw_snr_c, "sensing SNR, dB");
  swp->add_option("--snr-h", sw_snr_h, "channel SNR, dB");
  swp->add_option("--pi0", sw_pi0, "prior of H0");
  swp->add_option("--rho", sw_rho, "sensing-noise correlation");
  swp->add_option("--K", sw_K, "sensor count");
  swp->add_option("--trials", sw_trials, "trials per grid point");
  swp->add_option("--seed", sw_seed, "master seed");
  swp->add_option("--grid", sw_step, "alpha grid step");
  swp->add_option("--prior-method", sw_prior_method, "monte_carlo or closed_form");
  swp->add_option("--prior-samples", sw_prior_samples, "Monte Carlo prior sample count");
  swp->add_option("-o,--output", sw_output, "CSV output path");

  // --- bound / floor / asymptotics ---
  std::string an_scheme = "parallel";
  double an_snr_c = 6.0, an_snr_h = 10.0, an_pi0 = 0.6, an_alpha = 0.65;
  int an_K = 10;
  std::string as_format = "csv";
  CLI::App* bnd = app.add_subcommand("bound", "analytical error-probability upper bound");
  CLI::App* flr = app.add_subcommand("floor", "error-free-channel error floor");
  CLI::App* asy = app.add_subcommand("asymptotics", "large-network exponent report");
  for (CLI::App* sub : {bnd, asy}) {
    sub->add_option("--scheme", an_scheme, "parallel, stc, fusion or threshold");
    sub->add_option("--alpha", an_alpha, "power split (stc, fusion)");
    sub->add_option("--snr-h", an_snr_h, "channel SNR, dB");
  }
  for (CLI::App* sub : {bnd, flr, asy}) {
    sub->add_option("--snr-c", an_snr_c, "sensing SNR, dB");
    sub->add_option("--pi0", an_pi0, "prior of H0");
    sub->add_option("--K", an_K, "sensor count");
  }
  asy->add_option("--format", as_format, "csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sim->parsed() || cmp->parsed()) {
      ExperimentConfig cfg;
      try {
        json j = load_config(config_path, overrides);
        cfg = config_from_json(j);
        if (!output_override.empty()) cfg.output = output_override;
        if (dump_config) {
          std::cout << json_from_config(cfg).dump(2) << "\n";
          return 0;
        }
        if (config_path.empty() && overrides.empty())
          throw std::invalid_argument("simulate requires --config or --set overrides");
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
      const auto rows = run_experiment(cfg);
      if (cmp->parsed()) {
        std::cout << csv_header() << ",bound_violated\n";
        for (const auto& row : rows) {
          const bool violated =
              row.pe_bound && *row.pe_bound < row.pe_hat - 3.0 * row.stderr_;
          std::cout << csv_line(row) << ',' << (violated ? 1 : 0) << "\n";
        }
      } else {
        std::cout << csv_header() << "\n";
        for (const auto& row : rows) std::cout << csv_line(row) << "\n";
      }
      return 0;
    }

    if (swp->parsed()) {
      SchemeKind scheme;
      Rule rule;
      SensingModel sm;
      NetworkConfig net;
      PriorMethod pm;
      try {
        scheme = scheme_from_name(sw_scheme);
        rule = rule_from_name(sw_rule);
        sm = SensingModel::homogeneous_from_snr_c(sw_snr_c, sw_K, sw_pi0, sw_rho);
        net = NetworkConfig::homogeneous_from_snr(sw_snr_h, sw_K);
        if (sw_prior_method == "monte_carlo")
          pm = PriorMethod::MonteCarlo;
        else if (sw_prior_method == "closed_form")
          pm = PriorMethod::ClosedForm;
        else
          throw std::invalid_argument("prior method must be monte_carlo or closed_form");
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
      const AlphaSweepResult res =
          sweep_alpha(scheme, rule, sm, net, default_alpha_grid(sw_step), sw_trials, sw_seed,
                      pm, sw_prior_samples);
      std::ostringstream out;
      out << "scheme,rule,K,rho,pi0,snr_c_db,snr_h_db,alpha,trials,pe_hat,stderr,alpha_star\n";
      for (const auto& row : res.rows) {
        out << sw_scheme << ',' << sw_rule << ',' << sw_K << ',' << fmt(sw_rho) << ','
            << fmt(sw_pi0) << ',' << fmt(sw_snr_c) << ',' << fmt(sw_snr_h) << ','
            << fmt(row.alpha) << ',' << sw_trials << ',' << fmt(row.estimate.pe_hat) << ','
            << fmt(row.estimate.stderr_) << ',' << fmt(res.alpha_star) << "\n";
      }
      if (!sw_output.empty()) {
        std::ofstream f(sw_output);
        if (!f) throw std::runtime_error("cannot open output path: " + sw_output);
        f << out.str();
      } else {
        std::cout << out.str();
      }
      return 0;
    }

    if (flr->parsed()) {
      const double sw = sigma_w_from_snr_c(an_snr_c);
      const double tau = local_threshold(sw, an_pi0);
      const auto [pd, pf] = detection_probs(sw, tau);
      std::cout << "snr_c_db,pi0,K,Pd,Pf,M,error_floor\n";
      std::cout << fmt(an_snr_c) << ',' << fmt(an_pi0) << ',' << an_K << ',' << fmt(pd) << ','
                << fmt(pf) << ',' << find_M(pd, pf, an_pi0, an_K) << ','
                << fmt(error_floor(pd, pf, an_pi0, an_K)) << "\n";
      return 0;
    }

    if (bnd->parsed()) {
      SchemeKind scheme;
      try {
        scheme = scheme_from_name(an_scheme);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
      const auto op = op_from_flags(scheme, an_snr_c, an_snr_h, an_pi0, an_K, an_alpha);
      const BoundResult b =
          bound_for(scheme, op, an_snr_c, an_snr_h, an_pi0, an_K, an_alpha);
      const double fl = floor_for(scheme, op, an_snr_c, an_snr_h, an_pi0, an_K, an_alpha);
      std::cout << "scheme,K,pi0,snr_c_db,snr_h_db,alpha,pe_bound,pe1_bound,pe2_bound,"
                   "t_star,M,error_floor\n";
      std::cout << an_scheme << ',' << an_K << ',' << fmt(an_pi0) << ',' << fmt(an_snr_c)
                << ',' << fmt(an_snr_h) << ','
                << (scheme_uses_alpha(scheme) ? fmt(an_alpha) : std::string()) << ','
                << fmt(b.pe) << ',' << fmt(b.pe1) << ',' << fmt(b.pe2) << ',' << fmt(b.t_star)
                << ',' << (b.M >= 0 ? std::to_string(b.M) : std::string()) << ',' << fmt(fl)
                << "\n";
      return 0;
    }

    if (asy->parsed()) {
      SchemeKind scheme;
      try {
        scheme = scheme_from_name(an_scheme);
        if (as_format != "csv" && as_format != "json")
          throw std::invalid_argument("format must be csv or json");
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
      const auto op = op_from_flags(scheme, an_snr_c, an_snr_h, an_pi0, an_K, an_alpha);
      ExponentReport rep;
      switch (scheme) {
        case SchemeKind::Parallel:
          rep = asymptotics_parallel(op);
          break;
        case SchemeKind::StcAtSensors:
          rep = asymptotics_stc(op);
          break;
        case SchemeKind::FusionAtSensors: {
          const SensingModel sm = SensingModel::homogeneous_from_snr_c(an_snr_c, an_K, an_pi0);
          const NetworkConfig net = NetworkConfig::homogeneous_from_snr(an_snr_h, an_K, an_alpha);
          Stream rng(prior_cache_key(scheme, sm, net, PriorMethod::ClosedForm, 0, 33));
          rep = asymptotics_fusion(
              op, build_decision_prior(scheme, sm, net, PriorMethod::ClosedForm, 0, rng));
          break;
        }
        case SchemeKind::ThresholdChanging: {
          const auto [d4, f4] = threshold_four_state_probs(sigma_w_from_snr_c(an_snr_c), an_pi0);
          rep = asymptotics_threshold(op, d4, f4);
          break;
        }
      }
      const char* names[4] = {"e11", "e12", "e21", "e22"};
      if (as_format == "json") {
        json j;
        j["scheme"] = an_scheme;
        j["gamma"] = rep.gamma_x;
        j["t0"] = rep.t0;
        j["e11_mean_ok"] = rep.e11_mean_ok;
        j["e21_mean_ok"] = rep.e21_mean_ok;
        for (int t = 0; t < 4; ++t) {
          j["terms"][names[t]] = {{"mu", rep.terms[t].mu},
                                  {"sigma2", rep.terms[t].sigma2},
                                  {"kappa", rep.terms[t].kappa},
                                  {"rate", rep.terms[t].rate}};
        }
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "scheme,term,mu,sigma2,kappa,rate,gamma,t0\n";
        for (int t = 0; t < 4; ++t)
          std::cout << an_scheme << ',' << names[t] << ',' << fmt(rep.terms[t].mu) << ','
                    << fmt(rep.terms[t].sigma2) << ',' << fmt(rep.terms[t].kappa) << ','
                    << fmt(rep.terms[t].rate) << ',' << fmt(rep.gamma_x) << ','
                    << fmt(rep.t0) << "\n";
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
