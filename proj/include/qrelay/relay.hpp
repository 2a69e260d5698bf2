#pragma once

// Relay channel N_E1E2D = N_E1E2 followed by N_E2D: composition, the
// min-cut style capacity expressions, the relay mutual-information terms and
// a Monte Carlo model of the probabilistic relay encoder.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qrelay/codeword_sets.hpp"
#include "qrelay/density_ops.hpp"
#include "qrelay/polar_core.hpp"

namespace qrelay {

// Discrete memoryless channel with arbitrary finite input and output
// alphabets; row x holds P(.|x).
class Dmc {
public:
  explicit Dmc(std::vector<std::vector<double>> rows);

  static Dmc from_bdmc(const Bdmc& w);
  // Ternary-input erasure stage: 0 and 1 are erased with probability
  // epsilon, an incoming erasure stays erased.
  static Dmc erasure_stage(double epsilon);

  std::size_t inputs() const noexcept { return rows_.size(); }
  std::size_t outputs() const noexcept { return rows_.front().size(); }
  double operator()(std::size_t x, std::size_t y) const { return rows_[x][y]; }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

private:
  std::vector<std::vector<double>> rows_;
};

// Transition-matrix product: `first` then `second`.
Dmc compose(const Dmc& first, const Dmc& second);
// Mutual information at the uniform input, in bits.
double symmetric_capacity(const Dmc& ch);

using LinkChannel = std::variant<KrausChannel, Dmc>;

// Classical links: uniform-input mutual information. Quantum links: Holevo
// quantity of the images of the computational basis under uniform input.
double link_symmetric_capacity(const LinkChannel& link);

struct RelayChannelSpec {
  LinkChannel e1e2;
  LinkChannel e2d;
  LinkChannel e1d;
  double p_e2 = 0.5;
  IndexSetPartition partition;

  // 0 < p_e2 < 1, composable links of a single kind, valid partition.
  void validate() const;
};

LinkChannel compose_relay(const RelayChannelSpec& spec);

// min{c_12, c_1d + c_2d}
double relay_capacity_min(double c_12, double c_1d, double c_2d);

struct SetCapacities {
  double c_e1e2 = 0.0;  // |good_phase| / n
  double c_e1d = 0.0;   // |p2| / n
  double c_e2d = 0.0;   // |s_in| / n
};

SetCapacities set_capacities(const IndexSetPartition& part);

struct RelayDiagnostics {
  double c_e1e2 = 0.0;
  double c_e2d = 0.0;
  double c_e1d = 0.0;
  double c_e1e2d = 0.0;   // composed channel
  double capacity_min = 0.0;
  bool direct_noisier = false;  // c_e1d <= c_e1e2d
};

RelayDiagnostics relay_diagnostics(const RelayChannelSpec& spec);

// p(a, a') over |A| x |A'| with both alphabets of size <= 4.
class JointDistribution {
public:
  JointDistribution(std::size_t a_size, std::size_t a_prime_size, std::vector<double> p);
  static JointDistribution uniform(std::size_t a_size, std::size_t a_prime_size);

  std::size_t a_size() const noexcept { return a_; }
  std::size_t a_prime_size() const noexcept { return ap_; }
  double operator()(std::size_t a, std::size_t ap) const { return p_[a * ap_ + ap]; }
  const std::vector<double>& cells() const noexcept { return p_; }

private:
  std::size_t a_;
  std::size_t ap_;
  std::vector<double> p_;
};

// Classical relay channel p(b, b' | a, a'): destination output b, relay
// output b'.
class RelayDmc {
public:
  RelayDmc(std::size_t a_size, std::size_t a_prime_size, std::size_t b_size, std::size_t b_prime_size,
           std::vector<double> table);

  // Destination sees both inputs through independent links; the relay hears
  // A over its own link: b = (link_ab(a), link_apb(a')), b' = link_abp(a).
  static RelayDmc from_links(const Dmc& a_to_b, const Dmc& a_prime_to_b, const Dmc& a_to_relay);

  std::size_t a_size() const noexcept { return a_; }
  std::size_t a_prime_size() const noexcept { return ap_; }
  std::size_t b_size() const noexcept { return b_; }
  std::size_t b_prime_size() const noexcept { return bp_; }
  double operator()(std::size_t b, std::size_t bp, std::size_t a, std::size_t ap) const;

private:
  std::size_t a_, ap_, b_, bp_;
  std::vector<double> table_;
};

struct RelayMutualInfo {
  double i_joint = 0.0;  // I(A, A' : B)
  double i_cond = 0.0;   // I(A : B' | A')
  double min_term() const { return i_joint < i_cond ? i_joint : i_cond; }
};

RelayMutualInfo relay_mutual_info(const JointDistribution& jd, const RelayDmc& channel);

struct RelayMaximum {
  JointDistribution best;
  RelayMutualInfo value;
  std::size_t evaluated = 0;
};

// Lattice search with step 1/32 over p(a, a'): exhaustive when the lattice
// has at most a million points, otherwise coordinate ascent from uniform.
// The result is a lower bound on the max-min.
RelayMaximum maximize_relay_min(const RelayDmc& channel);

// (|good_phase| - |p2|) / n, checked against |s_in| / n.
double relay_private_capacity(const IndexSetPartition& part);

struct RelayTrialResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double empirical_success_rate = 0.0;
  double mean_codeword_size_b = 0.0;     // over successful trials
  double mean_decodable_per_block = 0.0; // over all trials, failures count 0
};

RelayTrialResult simulate_relay(const RelayChannelSpec& spec, std::uint64_t trials, std::uint64_t seed);

// p_e2 |s_in|
double expected_throughput(const RelayChannelSpec& spec);

}  // namespace qrelay
