#include "qrelay/polar_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qrelay/csv.hpp"
#include "qrelay/errors.hpp"

namespace qrelay {

namespace {

constexpr double kRowTolerance = 1e-12;

double log_ratio(double a, double b) {
  if (a == 0.0 && b == 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(a) - std::log(b);
}

bool same_ratio(double x, double y) {
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= 1e-12 * std::max(1.0, std::max(std::abs(x), std::abs(y)));
}

void renormalize(std::vector<double>& row) {
  const double s = std::accumulate(row.begin(), row.end(), 0.0);
  for (double& v : row) v /= s;
}

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 0.5))
    throw InvalidArgumentError("beta must satisfy 0 < beta < 0.5 (got " + std::to_string(beta) + ")");
}

}  // namespace

Bdmc::Bdmc(std::vector<double> w0, std::vector<double> w1) : w0_(std::move(w0)), w1_(std::move(w1)) {
  if (w0_.empty() || w0_.size() != w1_.size())
    throw InvalidArgumentError("BDMC rows must be non-empty and of equal length");
  for (const auto* row : {&w0_, &w1_}) {
    double s = 0.0;
    for (double v : *row) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgumentError("BDMC entries must be finite and >= 0");
      s += v;
    }
    if (std::abs(s - 1.0) > kRowTolerance) throw InvalidArgumentError("BDMC row does not sum to 1");
  }
}

Bdmc Bdmc::bec(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgumentError("erasure probability must lie in [0, 1]");
  return Bdmc({1.0 - epsilon, 0.0, epsilon}, {0.0, 1.0 - epsilon, epsilon});
}

Bdmc Bdmc::bsc(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgumentError("crossover probability must lie in [0, 1]");
  return Bdmc({1.0 - p, p}, {p, 1.0 - p});
}

Bdmc Bdmc::noiseless() { return Bdmc({1.0, 0.0}, {0.0, 1.0}); }

Bdmc Bdmc::useless() { return Bdmc({1.0}, {1.0}); }

std::optional<double> Bdmc::erasure_probability() const {
  double erased = 0.0;
  for (std::size_t y = 0; y < outputs(); ++y) {
    const double a = w0_[y];
    const double b = w1_[y];
    if (a == b)
      erased += a;
    else if (a != 0.0 && b != 0.0)
      return std::nullopt;
  }
  return erased;
}

double bhattacharyya(const Bdmc& w) {
  double z = 0.0;
  for (std::size_t y = 0; y < w.outputs(); ++y) z += std::sqrt(w.w0()[y] * w.w1()[y]);
  return z;
}

double symmetric_capacity(const Bdmc& w) {
  double i = 0.0;
  for (std::size_t y = 0; y < w.outputs(); ++y) {
    const double a = w.w0()[y];
    const double b = w.w1()[y];
    const double q = 0.5 * (a + b);
    if (a > 0.0) i += 0.5 * a * std::log2(a / q);
    if (b > 0.0) i += 0.5 * b * std::log2(b / q);
  }
  return i;
}

Bdmc combine_bad(const Bdmc& w) {
  const std::size_t m = w.outputs();
  std::vector<double> r0(m * m), r1(m * m);
  const auto& p0 = w.w0();
  const auto& p1 = w.w1();
  for (std::size_t y1 = 0; y1 < m; ++y1)
    for (std::size_t y2 = 0; y2 < m; ++y2) {
      r0[y1 * m + y2] = 0.5 * (p0[y1] * p0[y2] + p1[y1] * p1[y2]);
      r1[y1 * m + y2] = 0.5 * (p1[y1] * p0[y2] + p0[y1] * p1[y2]);
    }
  renormalize(r0);
  renormalize(r1);
  return Bdmc(std::move(r0), std::move(r1));
}

Bdmc combine_good(const Bdmc& w) {
  const std::size_t m = w.outputs();
  std::vector<double> r0(2 * m * m), r1(2 * m * m);
  const auto& p0 = w.w0();
  const auto& p1 = w.w1();
  for (int u1 = 0; u1 < 2; ++u1)
    for (std::size_t y1 = 0; y1 < m; ++y1)
      for (std::size_t y2 = 0; y2 < m; ++y2) {
        const std::size_t idx = (u1 * m + y1) * m + y2;
        // u2 = 0: y1 sees u1, y2 sees 0.  u2 = 1: y1 sees u1^1, y2 sees 1.
        r0[idx] = 0.5 * (u1 == 0 ? p0[y1] : p1[y1]) * p0[y2];
        r1[idx] = 0.5 * (u1 == 0 ? p1[y1] : p0[y1]) * p1[y2];
      }
  renormalize(r0);
  renormalize(r1);
  return Bdmc(std::move(r0), std::move(r1));
}

Bdmc merge_equal_ratios(const Bdmc& w) {
  struct Sym {
    double key;
    double a;
    double b;
  };
  std::vector<Sym> syms;
  syms.reserve(w.outputs());
  for (std::size_t y = 0; y < w.outputs(); ++y) {
    const double a = w.w0()[y];
    const double b = w.w1()[y];
    if (a == 0.0 && b == 0.0) continue;
    syms.push_back({log_ratio(a, b), a, b});
  }
  std::sort(syms.begin(), syms.end(), [](const Sym& l, const Sym& r) { return l.key < r.key; });
  std::vector<double> r0, r1;
  double run_key = 0.0;
  for (std::size_t i = 0; i < syms.size(); ++i) {
    if (i > 0 && same_ratio(run_key, syms[i].key)) {
      r0.back() += syms[i].a;
      r1.back() += syms[i].b;
    } else {
      r0.push_back(syms[i].a);
      r1.push_back(syms[i].b);
      run_key = syms[i].key;
    }
  }
  renormalize(r0);
  renormalize(r1);
  return Bdmc(std::move(r0), std::move(r1));
}

Bdmc merge_quantized(const Bdmc& w, std::size_t cap) {
  if (cap < 4) throw InvalidArgumentError("quantized alphabet needs at least 4 outputs");
  if (w.outputs() <= cap) return w;
  // Two bins hold the certain outputs; the rest split [-L, L] uniformly in
  // log-likelihood ratio, so near-certain outputs keep their resolution.
  constexpr double kLlrSpan = 40.0;
  const std::size_t interior = cap - 2;
  const double width = 2.0 * kLlrSpan / static_cast<double>(interior);
  std::vector<double> r0(cap, 0.0), r1(cap, 0.0);
  for (std::size_t y = 0; y < w.outputs(); ++y) {
    const double a = w.w0()[y];
    const double b = w.w1()[y];
    if (a + b == 0.0) continue;
    std::size_t bin;
    if (b == 0.0) {
      bin = cap - 1;
    } else if (a == 0.0) {
      bin = 0;
    } else {
      const double llr = std::clamp(std::log(a) - std::log(b), -kLlrSpan, kLlrSpan);
      bin = 1 + std::min(interior - 1, static_cast<std::size_t>((llr + kLlrSpan) / width));
    }
    r0[bin] += a;
    r1[bin] += b;
  }
  std::vector<double> c0, c1;
  for (std::size_t i = 0; i < cap; ++i)
    if (r0[i] + r1[i] > 0.0) {
      c0.push_back(r0[i]);
      c1.push_back(r1[i]);
    }
  renormalize(c0);
  renormalize(c1);
  return Bdmc(std::move(c0), std::move(c1));
}

GeneratorMatrix::GeneratorMatrix(int k, std::vector<std::uint8_t> bits) : k_(k), bits_(std::move(bits)) {
  if (bits_.size() != n() * n()) throw DimensionError("generator matrix size mismatch");
}

Bits GeneratorMatrix::row(std::size_t r) const {
  return Bits(bits_.begin() + static_cast<std::ptrdiff_t>(r * n()),
              bits_.begin() + static_cast<std::ptrdiff_t>((r + 1) * n()));
}

Bits GeneratorMatrix::apply(std::span<const std::uint8_t> message) const {
  if (message.size() != n()) throw DimensionError("message length must equal n");
  Bits out(n(), 0);
  for (std::size_t r = 0; r < n(); ++r) {
    std::uint8_t acc = 0;
    for (std::size_t c = 0; c < n(); ++c) acc ^= static_cast<std::uint8_t>((*this)(r, c) & message[c]);
    out[r] = acc;
  }
  return out;
}

namespace {

using BitMatrix = std::vector<std::vector<std::uint8_t>>;

BitMatrix gf2_multiply(const BitMatrix& a, const BitMatrix& b) {
  const std::size_t n = a.size();
  BitMatrix out(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      if (a[i][l])
        for (std::size_t j = 0; j < n; ++j) out[i][j] ^= b[l][j];
  return out;
}

BitMatrix kron_identity_left(std::size_t copies, const BitMatrix& m) {
  const std::size_t s = m.size();
  BitMatrix out(copies * s, std::vector<std::uint8_t>(copies * s, 0));
  for (std::size_t c = 0; c < copies; ++c)
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) out[c * s + i][c * s + j] = m[i][j];
  return out;
}

BitMatrix generator_rec(int k) {
  if (k == 1) return {{1, 1}, {0, 1}};
  const std::size_t n = std::size_t{1} << k;
  const BitMatrix g2 = {{1, 1}, {0, 1}};
  // (R v)_{2j} = v_j, (R v)_{2j+1} = v_{n/2 + j}
  BitMatrix r(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t j = 0; j < n / 2; ++j) {
    r[2 * j][j] = 1;
    r[2 * j + 1][n / 2 + j] = 1;
  }
  return gf2_multiply(gf2_multiply(kron_identity_left(n / 2, g2), r), kron_identity_left(2, generator_rec(k - 1)));
}

void encode_rec(std::span<const std::uint8_t> u, std::span<std::uint8_t> x) {
  const std::size_t n = u.size();
  if (n == 1) {
    x[0] = u[0];
    return;
  }
  const std::size_t h = n / 2;
  Bits a(h), b(h);
  encode_rec(u.first(h), a);
  encode_rec(u.subspan(h), b);
  for (std::size_t j = 0; j < h; ++j) {
    x[2 * j] = a[j] ^ b[j];
    x[2 * j + 1] = b[j];
  }
}

}  // namespace

GeneratorMatrix generator_matrix(int k) {
  if (k <= 0) throw InvalidArgumentError("recursion level k must be >= 1");
  if (k > 12) throw InvalidArgumentError("generator matrix is only materialized for k <= 12");
  const BitMatrix g = generator_rec(k);
  std::vector<std::uint8_t> flat;
  flat.reserve(g.size() * g.size());
  for (const auto& row : g) flat.insert(flat.end(), row.begin(), row.end());
  return GeneratorMatrix(k, std::move(flat));
}

Bits polar_encode(std::span<const std::uint8_t> message, int k) {
  if (k < 0 || k > 30) throw InvalidArgumentError("recursion level out of range");
  if (message.size() != (std::size_t{1} << k)) throw DimensionError("message length must equal 2^k");
  Bits x(message.size());
  encode_rec(message, x);
  return x;
}

namespace {

Bdmc reduce_alphabet(Bdmc w, const PolarizeOptions& opt) {
  if (opt.approximate_merge) {
    if (w.outputs() > opt.quantize_bins) return merge_quantized(w, opt.quantize_bins);
    return opt.merge_equal ? merge_equal_ratios(w) : w;
  }
  if (opt.merge_equal) w = merge_equal_ratios(w);
  if (w.outputs() > opt.alphabet_cap)
    throw AlphabetOverflowError("synthesized channel alphabet " + std::to_string(w.outputs()) + " exceeds cap " +
                                std::to_string(opt.alphabet_cap) + "; enable approximate merging or raise the cap");
  return w;
}

void polarize_rec(const Bdmc& w, int levels, std::size_t prefix, const PolarizeOptions& opt,
                  std::vector<double>& z) {
  if (levels == 0) {
    z[prefix] = bhattacharyya(w);
    return;
  }
  polarize_rec(reduce_alphabet(combine_bad(w), opt), levels - 1, prefix << 1, opt, z);
  polarize_rec(reduce_alphabet(combine_good(w), opt), levels - 1, (prefix << 1) | 1, opt, z);
}

}  // namespace

PolarizationResult polarize(const Bdmc& w, int k, const PolarizeOptions& options) {
  if (k < 1) throw InvalidArgumentError("recursion level k must be >= 1");
  if (k > 24) throw InvalidArgumentError("recursion level k too large");
  if (options.bec_closed_form) {
    if (auto eps = w.erasure_probability()) return polarize_bec(*eps, k);
  }
  PolarizationResult pr;
  pr.k = k;
  pr.n = std::size_t{1} << k;
  pr.z.assign(pr.n, 0.0);
  polarize_rec(reduce_alphabet(w, options), k, 0, options, pr.z);
  return pr;
}

PolarizationResult polarize_bec(double epsilon, int k) {
  if (k < 1 || k > 30) throw InvalidArgumentError("recursion level out of range");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgumentError("erasure probability must lie in [0, 1]");
  PolarizationResult pr;
  pr.k = k;
  pr.n = std::size_t{1} << k;
  pr.z.resize(pr.n);
  for (std::size_t i = 0; i < pr.n; ++i) {
    double z = epsilon;
    for (int level = k - 1; level >= 0; --level) z = ((i >> level) & 1U) ? z * z : 2.0 * z - z * z;
    pr.z[i] = z;
  }
  return pr;
}

std::vector<bool> GoodBadSets::good_mask() const {
  std::vector<bool> mask(n, false);
  for (auto i : good) mask[i] = true;
  return mask;
}

GoodBadSets GoodBadSets::from_good(std::size_t n, std::vector<std::size_t> good) {
  GoodBadSets s;
  s.n = n;
  std::sort(good.begin(), good.end());
  good.erase(std::unique(good.begin(), good.end()), good.end());
  if (!good.empty() && good.back() >= n) throw DimensionError("information index out of range");
  s.good = std::move(good);
  const auto mask = s.good_mask();
  for (std::size_t i = 0; i < n; ++i)
    if (!mask[i]) s.bad.push_back(i);
  return s;
}

double polar_threshold(std::size_t n, double beta) {
  const auto nn = static_cast<double>(n);
  return std::exp2(-std::pow(nn, beta)) / nn;
}

GoodBadSets select_sets(const PolarizationResult& pr, double beta) {
  check_beta(beta);
  GoodBadSets s;
  s.n = pr.n;
  s.beta = beta;
  s.threshold = polar_threshold(pr.n, beta);
  for (std::size_t i = 0; i < pr.n; ++i) (pr.z[i] < s.threshold ? s.good : s.bad).push_back(i);
  return s;
}

GoodBadSets select_by_budget(const PolarizationResult& pr, double budget) {
  std::vector<std::size_t> order(pr.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pr.z[a] < pr.z[b]; });
  std::vector<std::size_t> good;
  double sum = 0.0;
  for (auto i : order) {
    if (sum + pr.z[i] > budget) break;
    sum += pr.z[i];
    good.push_back(i);
  }
  return GoodBadSets::from_good(pr.n, std::move(good));
}

double error_bound(std::size_t n, double beta) {
  if (n < 1) throw InvalidArgumentError("n must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgumentError("beta must lie in (0, 1)");
  const auto nn = static_cast<double>(n);
  return nn * std::exp2(-std::pow(nn, beta));
}

PartialDistanceReport beta_from_partial_distances(int k) {
  if (k < 1) throw InvalidArgumentError("recursion level k must be >= 1");
  if (k > 5) throw InvalidArgumentError("partial distances need exhaustive span enumeration; k must be <= 5");
  const GeneratorMatrix g = generator_matrix(k);
  const std::size_t n = g.n();
  // x = G u, so u_i contributes column i of G to the codeword.
  std::vector<std::uint32_t> cols(n, 0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (g(r, c)) cols[c] |= std::uint32_t{1} << r;

  PartialDistanceReport rep;
  rep.d.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = n - 1 - i;
    std::uint32_t span_word = 0;
    int best = std::popcount(cols[i]);
    // Gray-code walk over every combination of the later columns.
    for (std::uint64_t step = 1; step < (std::uint64_t{1} << m); ++step) {
      span_word ^= cols[i + 1 + static_cast<std::size_t>(std::countr_zero(step))];
      best = std::min(best, std::popcount(cols[i] ^ span_word));
    }
    rep.d[i] = best;
  }
  double acc = 0.0;
  for (int d : rep.d) acc += std::log(static_cast<double>(d)) / std::log(static_cast<double>(n));
  rep.beta_hat = acc / static_cast<double>(n);
  return rep;
}

std::string polarization_csv(const PolarizationResult& pr, const GoodBadSets& sets) {
  const auto mask = sets.good_mask();
  std::ostringstream os;
  os << "index,z,set\n";
  for (std::size_t i = 0; i < pr.n; ++i) os << i << ',' << format_number(pr.z[i]) << ',' << (mask[i] ? "good" : "bad") << '\n';
  return os.str();
}

}  // namespace qrelay
