#pragma once

// Classical polar coding: generator matrices, channel combining, Bhattacharyya
// tracking, good/bad index selection, successive-cancellation decoding and
// Monte Carlo block-error estimation.
//
// Index convention: the binary expansion of a synthesized-channel index, read
// most significant bit first, lists the splits applied to the raw channel,
// 0 = bad (W-) and 1 = good (W+). Encoder and decoder use the matching
// column convention x = G u, so u[i] travels over synthesized channel i.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrelay/rng.hpp"

namespace qrelay {

using Bits = std::vector<std::uint8_t>;

// Binary-input discrete memoryless channel; w0[y] = P(y|0), w1[y] = P(y|1).
class Bdmc {
public:
  Bdmc(std::vector<double> w0, std::vector<double> w1);

  static Bdmc bec(double epsilon);  // outputs {0, 1, erasure}
  static Bdmc bsc(double p);
  static Bdmc noiseless();
  static Bdmc useless();

  std::size_t outputs() const noexcept { return w0_.size(); }
  const std::vector<double>& w0() const noexcept { return w0_; }
  const std::vector<double>& w1() const noexcept { return w1_; }

  // Erasure probability when every output symbol is either certain or fully
  // ambiguous; std::nullopt otherwise.
  std::optional<double> erasure_probability() const;

private:
  std::vector<double> w0_;
  std::vector<double> w1_;
};

double bhattacharyya(const Bdmc& w);
// Mutual information at the uniform input, in bits.
double symmetric_capacity(const Bdmc& w);

// W-(y1,y2|u1) = 1/2 sum_u2 W(y1|u1^u2) W(y2|u2); output index y1*|Y| + y2.
Bdmc combine_bad(const Bdmc& w);
// W+(u1,y1,y2|u2) = 1/2 W(y1|u1^u2) W(y2|u2); output index (u1*|Y| + y1)*|Y| + y2.
Bdmc combine_good(const Bdmc& w);

// Drops zero-mass outputs and merges outputs with equal likelihood ratio
// (relative tolerance 1e-12 on the log-ratio). Bhattacharyya parameter and
// symmetric capacity are unchanged.
Bdmc merge_equal_ratios(const Bdmc& w);
// Degrading merge into at most `cap` outputs by binning log-likelihood ratios.
Bdmc merge_quantized(const Bdmc& w, std::size_t cap);

// n x n binary matrix, row-major.
class GeneratorMatrix {
public:
  GeneratorMatrix(int k, std::vector<std::uint8_t> bits);

  int k() const noexcept { return k_; }
  std::size_t n() const noexcept { return std::size_t{1} << k_; }
  std::uint8_t operator()(std::size_t r, std::size_t c) const { return bits_[r * n() + c]; }
  Bits row(std::size_t r) const;
  Bits apply(std::span<const std::uint8_t> message) const;

private:
  int k_;
  std::vector<std::uint8_t> bits_;
};

// G = (I_{n/2} (x) G2) R (I_2 (x) G_{n/2}), G2 = [[1,1],[0,1]], R interleaving
// the two halves. Valid for 1 <= k <= 12.
GeneratorMatrix generator_matrix(int k);

// Butterfly evaluation of G u over GF(2).
Bits polar_encode(std::span<const std::uint8_t> message, int k);

struct PolarizationResult {
  int k = 0;
  std::size_t n = 0;
  std::vector<double> z;
};

struct PolarizeOptions {
  std::size_t alphabet_cap = 4096;
  bool merge_equal = true;
  bool approximate_merge = false;
  std::size_t quantize_bins = 256;  // target alphabet when approximate_merge is on
  bool bec_closed_form = true;
};

PolarizationResult polarize(const Bdmc& w, int k, const PolarizeOptions& options = {});
// Z- = 2Z - Z^2, Z+ = Z^2.
PolarizationResult polarize_bec(double epsilon, int k);

struct GoodBadSets {
  std::size_t n = 0;
  double beta = 0.0;
  double threshold = 0.0;
  std::vector<std::size_t> good;
  std::vector<std::size_t> bad;

  std::vector<bool> good_mask() const;
  // Sets from an explicit information set; beta and threshold stay 0.
  static GoodBadSets from_good(std::size_t n, std::vector<std::size_t> good);
};

// (1/n) 2^(-n^beta)
double polar_threshold(std::size_t n, double beta);
// Requires 0 < beta < 0.5; z_i == threshold counts as bad.
GoodBadSets select_sets(const PolarizationResult& pr, double beta);
// Largest set of smallest-z indices whose Bhattacharyya sum stays within budget.
GoodBadSets select_by_budget(const PolarizationResult& pr, double budget);

// n 2^(-n^beta)
double error_bound(std::size_t n, double beta);

struct PartialDistanceReport {
  std::vector<int> d;
  double beta_hat = 0.0;
};

// d_i = distance from column i of G (the codeword of u_i) to the GF(2) span of
// the later columns. k <= 5.
PartialDistanceReport beta_from_partial_distances(int k);

// Successive-cancellation decoder working on log-likelihood ratios clamped to
// +-700. Bad indices are frozen to the supplied values.
class ScDecoder {
public:
  ScDecoder(const GoodBadSets& sets, Bits frozen_values);

  std::size_t n() const noexcept { return frozen_.size(); }

  // Likelihood ratios L = W(y|0)/W(y|1) in [0, +inf]; erasures are L = 1.
  Bits decode(std::span<const double> likelihood_ratios) const;
  Bits decode_llr(std::span<const double> llr) const;

private:
  void decode_node(std::span<const double> llr, std::size_t offset, std::span<std::uint8_t> u,
                   std::span<std::uint8_t> x) const;

  std::vector<bool> frozen_;
  Bits frozen_values_;
};

Bits sc_decode(std::span<const double> likelihood_ratios, const GoodBadSets& sets,
               std::span<const std::uint8_t> frozen_values);

// Fills log-likelihood ratios for a transmitted codeword.
using ChannelSampler =
    std::function<void(std::span<const std::uint8_t> codeword, CounterRng& rng, std::span<double> llr)>;

ChannelSampler noiseless_sampler();
ChannelSampler bec_sampler(double epsilon);
ChannelSampler bsc_sampler(double p);

struct CodeConfig {
  GoodBadSets sets;
  Bits frozen_values;  // length n; entries at good indices are ignored
};

struct BlockErrorEstimate {
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  double rate = 0.0;
};

BlockErrorEstimate monte_carlo_block_error(const CodeConfig& code, const ChannelSampler& channel,
                                           std::uint64_t trials, std::uint64_t seed);

// CSV with columns index,z,set.
std::string polarization_csv(const PolarizationResult& pr, const GoodBadSets& sets);

}  // namespace qrelay
