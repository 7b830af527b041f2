#pragma once

#include <array>

#include "decifuse/channel.hpp"
#include "decifuse/sensing.hpp"

namespace decifuse {

enum class SchemeKind { Parallel, StcAtSensors, FusionAtSensors, ThresholdChanging };

const char* scheme_name(SchemeKind s);
SchemeKind scheme_from_name(const std::string& name);

inline bool scheme_uses_alpha(SchemeKind s) {
  return s == SchemeKind::StcAtSensors || s == SchemeKind::FusionAtSensors;
}
inline bool scheme_uses_pairs_at_fc(SchemeKind s) {
  return s == SchemeKind::StcAtSensors || s == SchemeKind::ThresholdChanging;
}

// --- pair decision-state encodings (project-wide conventions) ---
// symbol +1 <-> bit 1, -1 <-> bit 0
inline int symbol_from_bit(int b) { return 2 * b - 1; }
inline int bit_from_symbol(int s) { return s > 0 ? 1 : 0; }

// 4-state pair alphabet over (e_i, e_j): idx = bit(e_i)*2 + bit(e_j).
inline int pair4_index(int e_i, int e_j) {
  return bit_from_symbol(e_i) * 2 + bit_from_symbol(e_j);
}
inline std::array<int, 2> pair4_symbols(int idx) {
  return {symbol_from_bit((idx >> 1) & 1), symbol_from_bit(idx & 1)};
}

// STC 16-state alphabet (u_i, u_j, uhat_i, uhat_j).
inline int stc16_index(int u_i, int u_j, int uhat_i, int uhat_j) {
  return bit_from_symbol(u_i) * 8 + bit_from_symbol(u_j) * 4 + bit_from_symbol(uhat_i) * 2 +
         bit_from_symbol(uhat_j);
}
inline std::array<int, 4> stc16_symbols(int idx) {
  return {symbol_from_bit((idx >> 3) & 1), symbol_from_bit((idx >> 2) & 1),
          symbol_from_bit((idx >> 1) & 1), symbol_from_bit(idx & 1)};
}

// Threshold-changing node cases for (u, ubar): 0:(+1,+1) 1:(+1,-1) 2:(-1,+1) 3:(-1,-1).
inline int node_case(int u, int ubar) {
  return u == 1 ? (ubar == 1 ? 0 : 1) : (ubar == 1 ? 2 : 3);
}
inline std::array<int, 2> node_case_symbols(int c) {
  static constexpr std::array<std::array<int, 2>, 4> tab{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  return tab[c];
}
inline int thr16_index(int case_i, int case_j) { return case_i * 4 + case_j; }

// Alamouti transmit tuple: slot n sends amp*(p_i from node i, p_j from node j),
// slot n+1 sends amp*(-q_i from node i, q_j from node j).
struct PairTx {
  double amp;
  int p_i, q_i, p_j, q_j;
};

// STC scheme: state16 = (u_i,u_j,uhat_i,uhat_j), amplitudes sqrt(alpha/2).
PairTx pair_tx_stc(int state16, double alpha);
// Threshold scheme: state16 = (case_i, case_j), amplitudes 1/sqrt(2).
PairTx pair_tx_threshold(int state16);

// Conditional means of the combined statistics (z_i, z_j) for a transmit tuple.
std::pair<cd, cd> pair_means(const PairTx& tx, cd h_i, cd h_j);

struct TrialRecord {
  Hypothesis truth = Hypothesis::H0;
  ObservationVector observations;
  LocalDecisions decisions;
  ChannelRealization channels;
  FcSignals fc_signals;
};

// fixed_fc_channel, when given, pins the sensor-to-FC coefficients h (the
// inter-node channels stay random): conditional simulation for a given fade.
TrialRecord run_trial(SchemeKind scheme, const SensingModel& sensing, const NetworkConfig& net,
                      Hypothesis truth, Stream& rng,
                      const Eigen::VectorXcd* fixed_fc_channel = nullptr);

}  // namespace decifuse
