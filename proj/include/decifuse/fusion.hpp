#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "decifuse/schemes.hpp"

namespace decifuse {

enum class PriorMethod { ClosedForm, MonteCarlo };

// Per-pair decision-state probability tables used by the FC likelihood-ratio
// test.  For rho > 0 the tables are conditioned on the shared sensing factor
// z0, discretised on a Gauss-Hermite grid (a single node of weight 1 when
// rho = 0); conditioned on z0, pair states are independent across pairs.
//
// State alphabets: Parallel/STC 4 (u_i, u_j); Fusion 4 (u~_i, u~_j);
// Threshold 16 (node cases (u, ubar) for both nodes).
struct DecisionPrior {
  SchemeKind scheme = SchemeKind::Parallel;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  // tables[hyp][pair] has one row per grid node, one column per state.
  std::array<std::vector<Eigen::MatrixXd>, 2> tables;
  Eigen::VectorXd internode_flip;  // per pair, STC only

  int n_pairs() const { return static_cast<int>(tables[0].size()); }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_states() const;
  void validate() const;
};

int prior_states(SchemeKind scheme);

DecisionPrior build_decision_prior(SchemeKind scheme, const SensingModel& sensing,
                                   const NetworkConfig& net, PriorMethod method,
                                   long mc_samples, Stream& rng, int gh_nodes = 33,
                                   int threads = 1);

// Content key for caching priors across runs; hashes every input the tables
// depend on.
std::uint64_t prior_cache_key(SchemeKind scheme, const SensingModel& sensing,
                              const NetworkConfig& net, PriorMethod method, long mc_samples,
                              int gh_nodes);

// Versioned text serialization (round-trips at 17 significant digits).
void save_prior(std::ostream& os, const DecisionPrior& prior, std::uint64_t key);
DecisionPrior load_prior(std::istream& is, std::uint64_t* key = nullptr);

struct FcDecision {
  Hypothesis decided = Hypothesis::H0;
  double log_lrt = 0.0;
  int vote_sum = 0;
};

FcDecision lrt_decide(SchemeKind scheme, const DecisionPrior& prior, const FcSignals& signals,
                      const ChannelRealization& channels, const NetworkConfig& net, double pi0);

FcDecision majority_decide(SchemeKind scheme, const FcSignals& signals,
                           const ChannelRealization& channels, const NetworkConfig& net,
                           double pi0);

}  // namespace decifuse
