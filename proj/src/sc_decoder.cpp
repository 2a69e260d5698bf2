#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "qrelay/errors.hpp"
#include "qrelay/parallel.hpp"
#include "qrelay/polar_core.hpp"

namespace qrelay {

namespace {

constexpr double kLlrLimit = 700.0;

double clamp_llr(double v) { return std::clamp(v, -kLlrLimit, kLlrLimit); }

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

// log of (1 + L1 L2) / (L1 + L2)
double bad_llr(double l1, double l2) { return clamp_llr(log_add_exp(0.0, l1 + l2) - log_add_exp(l1, l2)); }

// log of L1 L2 when the known partner bit is 0, L2 / L1 when it is 1
double good_llr(double l1, double l2, std::uint8_t partner) {
  return clamp_llr(partner ? l2 - l1 : l2 + l1);
}

}  // namespace

ScDecoder::ScDecoder(const GoodBadSets& sets, Bits frozen_values)
    : frozen_(sets.n, true), frozen_values_(std::move(frozen_values)) {
  if (sets.n == 0 || (sets.n & (sets.n - 1)) != 0) throw DimensionError("block length must be a power of two");
  for (auto i : sets.good) {
    if (i >= sets.n) throw DimensionError("information index out of range");
    frozen_[i] = false;
  }
  if (frozen_values_.size() != sets.n)
    throw InvalidArgumentError("frozen values must be supplied for every index (length n)");
  for (std::size_t i = 0; i < sets.n; ++i)
    if (frozen_[i] && frozen_values_[i] > 1) throw InvalidArgumentError("frozen values must be bits");
}

Bits ScDecoder::decode(std::span<const double> likelihood_ratios) const {
  std::vector<double> llr(likelihood_ratios.size());
  for (std::size_t i = 0; i < llr.size(); ++i) {
    const double l = likelihood_ratios[i];
    if (std::isnan(l) || l < 0.0) throw InvalidArgumentError("likelihood ratios must lie in [0, +inf]");
    llr[i] = clamp_llr(std::log(l));
  }
  return decode_llr(llr);
}

Bits ScDecoder::decode_llr(std::span<const double> llr) const {
  if (llr.size() != n()) throw DimensionError("expected one likelihood per code position");
  std::vector<double> clamped(llr.size());
  for (std::size_t i = 0; i < llr.size(); ++i) {
    if (std::isnan(llr[i])) throw InvalidArgumentError("log-likelihood is NaN");
    clamped[i] = clamp_llr(llr[i]);
  }
  Bits u(n()), x(n());
  decode_node(clamped, 0, u, x);
  return u;
}

void ScDecoder::decode_node(std::span<const double> llr, std::size_t offset, std::span<std::uint8_t> u,
                            std::span<std::uint8_t> x) const {
  const std::size_t len = llr.size();
  if (len == 1) {
    // L >= 1 decides 0
    const std::uint8_t bit = frozen_[offset] ? frozen_values_[offset] : static_cast<std::uint8_t>(llr[0] < 0.0);
    u[0] = bit;
    x[0] = bit;
    return;
  }
  const std::size_t h = len / 2;
  std::vector<double> child(h);
  Bits a(h), b(h);
  for (std::size_t j = 0; j < h; ++j) child[j] = bad_llr(llr[2 * j], llr[2 * j + 1]);
  decode_node(child, offset, u.first(h), a);
  for (std::size_t j = 0; j < h; ++j) child[j] = good_llr(llr[2 * j], llr[2 * j + 1], a[j]);
  decode_node(child, offset + h, u.subspan(h), b);
  for (std::size_t j = 0; j < h; ++j) {
    x[2 * j] = a[j] ^ b[j];
    x[2 * j + 1] = b[j];
  }
}

Bits sc_decode(std::span<const double> likelihood_ratios, const GoodBadSets& sets,
               std::span<const std::uint8_t> frozen_values) {
  return ScDecoder(sets, Bits(frozen_values.begin(), frozen_values.end())).decode(likelihood_ratios);
}

ChannelSampler noiseless_sampler() {
  return [](std::span<const std::uint8_t> x, CounterRng&, std::span<double> llr) {
    for (std::size_t i = 0; i < x.size(); ++i) llr[i] = x[i] ? -kLlrLimit : kLlrLimit;
  };
}

ChannelSampler bec_sampler(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgumentError("erasure probability must lie in [0, 1]");
  return [epsilon](std::span<const std::uint8_t> x, CounterRng& rng, std::span<double> llr) {
    for (std::size_t i = 0; i < x.size(); ++i)
      llr[i] = rng.bernoulli(epsilon) ? 0.0 : (x[i] ? -kLlrLimit : kLlrLimit);
  };
}

ChannelSampler bsc_sampler(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgumentError("crossover probability must lie in [0, 1]");
  const double mag = p == 0.0 ? kLlrLimit : (p == 1.0 ? -kLlrLimit : clamp_llr(std::log((1.0 - p) / p)));
  return [p, mag](std::span<const std::uint8_t> x, CounterRng& rng, std::span<double> llr) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::uint8_t y = x[i] ^ static_cast<std::uint8_t>(rng.bernoulli(p));
      llr[i] = y ? -mag : mag;
    }
  };
}

BlockErrorEstimate monte_carlo_block_error(const CodeConfig& code, const ChannelSampler& channel,
                                           std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgumentError("trials must be >= 1");
  const std::size_t n = code.sets.n;
  const int k = std::countr_zero(n);
  const ScDecoder decoder(code.sets, code.frozen_values);
  const auto info = code.sets.good;

  const std::uint64_t errors = parallel_accumulate<std::uint64_t>(trials, [&](std::uint64_t t, std::uint64_t& acc) {
    CounterRng rng(seed, t);
    Bits u = code.frozen_values;
    for (auto i : info) u[i] = static_cast<std::uint8_t>(rng.bit());
    const Bits x = polar_encode(u, k);
    std::vector<double> llr(n);
    channel(x, rng, llr);
    const Bits decoded = decoder.decode_llr(llr);
    for (auto i : info)
      if (decoded[i] != u[i]) {
        ++acc;
        break;
      }
  });
  BlockErrorEstimate est;
  est.trials = trials;
  est.errors = errors;
  est.rate = static_cast<double>(errors) / static_cast<double>(trials);
  return est;
}

}  // namespace qrelay
