#pragma once

// Amplitude/phase codeword index sets and the rate expressions written in
// terms of their cardinalities. All rates are finite-n fractions |.|/n.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrelay/polar_core.hpp"

namespace qrelay {

// Subset of [n] = {0, ..., n-1}.
class IndexSet {
public:
  explicit IndexSet(std::size_t universe = 0) : mask_(universe, false) {}

  static IndexSet full(std::size_t universe);
  static IndexSet from_indices(std::size_t universe, std::span<const std::size_t> indices);
  static IndexSet from_mask(std::vector<bool> mask);

  std::size_t universe() const noexcept { return mask_.size(); }
  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  bool contains(std::size_t i) const { return i < mask_.size() && mask_[i]; }
  void insert(std::size_t i);
  std::vector<std::size_t> indices() const;

  IndexSet operator&(const IndexSet& o) const;
  IndexSet operator|(const IndexSet& o) const;
  IndexSet operator-(const IndexSet& o) const;
  IndexSet complement() const;
  bool disjoint(const IndexSet& o) const { return (*this & o).empty(); }
  bool subset_of(const IndexSet& o) const { return (*this - o).empty(); }
  bool operator==(const IndexSet& o) const = default;

private:
  void check_universe(const IndexSet& o) const;
  std::vector<bool> mask_;
};

// Good sets of the amplitude and phase channels over the same block length.
struct DualPolarization {
  std::size_t n = 0;
  IndexSet good_amp;
  IndexSet good_phase;
};

DualPolarization dual_polarization(const Bdmc& amplitude, const Bdmc& phase, int k, double beta,
                                   const PolarizeOptions& options = {});

// Classical channels a Pauli channel induces on Z-basis (amplitude) and
// X-basis (phase) bits: BSC(pX + pY) and BSC(pZ + pY).
std::pair<Bdmc, Bdmc> induced_amplitude_phase(double p_i, double p_x, double p_y, double p_z);

struct IndexSetPartition {
  std::size_t n = 0;
  IndexSet s_in;  // good amplitude, good phase
  IndexSet p1;    // good amplitude, bad phase
  IndexSet p2;    // bad amplitude, good phase
  IndexSet b;     // bad amplitude, bad phase

  IndexSet good_amp() const { return s_in | p1; }
  IndexSet good_phase() const { return s_in | p2; }
  IndexSet bad_amp() const { return p2 | b; }
  IndexSet bad_phase() const { return p1 | b; }

  // Throws InvalidStateError unless the four sets partition [n].
  void validate() const;
};

IndexSetPartition build_partition(const DualPolarization& dp);

// |s_in| / n
double p_sym_degraded(const IndexSetPartition& part);
// (|s_in| - |b|) / n, checked against (|good_amp| + |good_phase| - n) / n.
double p_sym_nondegraded(const IndexSetPartition& part);
// (|s_in| + |b| - |bad_amp| + |p2|) / n
double r_sym_nondegraded(const IndexSetPartition& part);
// (|s_in| - |bad_phase|) / n
double nondegraded_phase_margin(const IndexSetPartition& part);

struct RateReport {
  std::size_t n = 0;
  double p_sym_degraded = 0.0;
  double p_sym_nondegraded = 0.0;
  double r_sym = 0.0;
  double c_bob = 0.0;          // 1 - |p1|/n
  double c_bob_union = 0.0;    // |s_in u p2| / n
  double c_eve = 0.0;          // (|p1| + |p2|) / n
  double c_eve_p1 = 0.0;       // |p1| / n
  double eve_e1e2 = 0.0;       // |p2 u s_in| / n, codewords seen on the first hop
  double eve_e2d = 0.0;        // |s_in| / n, codewords seen on the second hop
  bool bob_forms_agree = true; // the two c_bob forms agree iff b is empty
  bool negative_rate = false;
};

RateReport eve_capacity(const IndexSetPartition& part);

struct ThresholdSets {
  IndexSet bob;  // z_bob < (1/n) 2^(-n^beta)
  IndexSet eve;  // z_eve >= 1 - (1/n) 2^(-n^beta)
};

ThresholdSets codeword_threshold_sets(std::span<const double> z_bob, std::span<const double> z_eve, double beta);

// CSV with columns index,set where set is one of S_in, P1, P2, B.
std::string partition_csv(const IndexSetPartition& part);

}  // namespace qrelay
