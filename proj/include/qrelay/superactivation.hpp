#pragma once

// Superactivation-assisted relay construction: the flagged switch channel
// M = p N (x) |0><0| + (1-p) A_e (x) |1><1|, entangled joint inputs for M (x) M,
// the exact coherent information of M (x) M with its four-branch
// decomposition, and the B* versus B comparison.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "qrelay/codeword_sets.hpp"
#include "qrelay/density_ops.hpp"

namespace qrelay {

inline constexpr int kMaxJointDim = 4096;

struct SwitchChannel {
  double p = 0.0;
  KrausChannel branch_main;     // main branch, output padded to the data space
  KrausChannel branch_erasure;  // 50% erasure, output padded to the data space
  KrausChannel channel;         // flagged mixture; output = data (x) flag

  int in_dim() const { return channel.in_dim(); }
  int data_dim() const { return branch_main.out_dim(); }
};

// Kraus set {sqrt(p) N_j (x) |0>, sqrt(1-p) A_k (x) |1>}; requires 0 <= p <= 1.
SwitchChannel build_switch_channel(double p, const KrausChannel& main);

// I_2 (x) N: the channel acting on the data qubit of a (flag, data) register.
KrausChannel lift_to_flagged_register(const KrausChannel& qubit_main);

enum class FlagVariant {
  // Flag registers as printed: both terms |0><0| (x) |0><0|, i.e. |00><00|.
  literal,
  // Second term carries |1> flags: (|00><00| + |11><11|) / 2.
  alternating,
};

struct JointInputState {
  DensityMatrix rho_ac;
  int dim_a = 0;
  int dim_c = 0;
  std::string construction;
};

// rho_{A1 C1} (x) |Psi+><Psi+|_{A2 C2}, reordered to (A1 A2)(C1 C2).
JointInputState make_rho_ac_entangled(FlagVariant variant);
// sigma (x) sigma for a caller-supplied state.
JointInputState make_rho_ac_product(const DensityMatrix& sigma);

// SWAP_{A,C} rho SWAP^dagger
DensityMatrix swap_parties(const JointInputState& input);

enum class Branch : std::size_t { main_main = 0, main_erasure = 1, erasure_main = 2, erasure_erasure = 3 };

struct BranchTerm {
  double weight = 0.0;
  double i_coh = 0.0;
};

struct SuperactivationReport {
  double p = 0.0;
  double i_coh_joint = 0.0;
  std::array<BranchTerm, 4> branch_terms{};  // indexed by Branch
  double decomposition_sum = 0.0;
  double i_coh_main = 0.0;         // I_coh of the main branch on the A marginal
  double bound_2p1p = 0.0;         // 2p(1-p) i_coh_main
  double p_sym_star_lower = 0.0;   // i_coh_main / 2

  const BranchTerm& term(Branch b) const { return branch_terms[static_cast<std::size_t>(b)]; }
};

// Exact I_coh(M (x) M) plus the weighted branch decomposition; throws if the
// two disagree by more than 1e-9 or a joint dimension exceeds kMaxJointDim.
SuperactivationReport joint_coherent_info(const SwitchChannel& sc, const JointInputState& input);

struct BoundResult {
  double bound = 0.0;   // 2p(1-p) i_coh_main at the requested p
  double p_star = 0.0;  // grid argmax over {0.01, ..., 0.99}
  double bound_at_p_star = 0.0;
};

BoundResult superactivated_bound(double p, double i_coh_main);

// (C_sym(phase channel) - I(A:E)) / 2
double assisted_single_use_capacity(const BinaryCqChannel& bob_phase, const BinaryCqChannel& eve);

struct AssistedComparison {
  double p_e2 = 0.0;
  std::size_t s_in = 0;
  double b_star = 0.0;  // |S_in| / 2
  double b = 0.0;       // p_e2 |S_in|
  bool advantage = false;
  double rate_star = 0.0;  // b_star / n
  double rate = 0.0;       // b / n
};

AssistedComparison compare_assisted(double p_e2, const IndexSetPartition& part);

// Relay that works with probability p_e2 and otherwise emits a fixed erasure
// flag orthogonal to every signal state.
KrausChannel unreliable_relay_channel(const KrausChannel& main, double p_e2);

struct BranchFit {
  double main_main = 0.0;
  double cross = 0.0;  // coefficient of 2p(1-p)
  double erasure_erasure = 0.0;
  double residual = 0.0;  // max absolute residual
};

// Least-squares fit of i_coh_joint(p) on {p^2, 2p(1-p), (1-p)^2}.
BranchFit fit_branch_weights(const std::vector<SuperactivationReport>& reports);

}  // namespace qrelay
