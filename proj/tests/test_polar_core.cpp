#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qrelay/errors.hpp"
#include "qrelay/polar_core.hpp"

using namespace qrelay;

namespace {

Bdmc random_bdmc(std::mt19937_64& g, std::size_t outputs) {
  return Bdmc(oracle::random_row(g, outputs), oracle::random_row(g, outputs));
}

// P(y | x) for a codeword over a memoryless channel with output y packed
// as base-|Y| digits, position 0 most significant.
double codeword_likelihood(const Bdmc& w, const Bits& x, std::size_t y) {
  const std::size_t m = w.outputs();
  double p = 1.0;
  for (std::size_t pos = x.size(); pos-- > 0;) {
    const std::size_t sym = y % m;
    y /= m;
    p *= x[pos] ? w.w1()[sym] : w.w0()[sym];
  }
  return p;
}

// Bhattacharyya parameter of synthesized channel i by summing over every
// message: W_i(y, u_<i | u_i) = 2^-(n-1) sum_{u_>i} W^n(y | G u).
std::vector<double> brute_force_z(const Bdmc& w, int k) {
  const GeneratorMatrix g = generator_matrix(k);
  const std::size_t n = g.n();
  std::size_t ys = 1;
  for (std::size_t i = 0; i < n; ++i) ys *= w.outputs();
  // like[u][y]
  std::vector<std::vector<double>> like(std::size_t{1} << n, std::vector<double>(ys));
  for (std::size_t u = 0; u < like.size(); ++u) {
    Bits msg(n);
    for (std::size_t i = 0; i < n; ++i) msg[i] = (u >> i) & 1U;
    const Bits x = g.apply(msg);
    for (std::size_t y = 0; y < ys; ++y) like[u][y] = codeword_likelihood(w, x, y);
  }
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prefix_count = std::size_t{1} << i;
    for (std::size_t prefix = 0; prefix < prefix_count; ++prefix)
      for (std::size_t y = 0; y < ys; ++y) {
        double p[2] = {0.0, 0.0};
        for (std::size_t ui = 0; ui < 2; ++ui)
          for (std::size_t rest = 0; rest < (std::size_t{1} << (n - i - 1)); ++rest) {
            const std::size_t u = prefix | (ui << i) | (rest << (i + 1));
            p[ui] += like[u][y];
          }
        const double scale = std::ldexp(1.0, -static_cast<int>(n - 1));
        z[i] += std::sqrt(p[0] * scale * p[1] * scale);
      }
  }
  return z;
}

}  // namespace

TEST_CASE("BDMC construction and basic quantities") {
  CHECK_THROWS_AS(Bdmc({0.5, 0.4}, {0.5, 0.5}), InvalidArgumentError);
  CHECK_THROWS_AS(Bdmc({1.0}, {0.5, 0.5}), InvalidArgumentError);
  CHECK_THROWS_AS(Bdmc::bec(1.1), InvalidArgumentError);
  const Bdmc bsc = Bdmc::bsc(0.11);
  CHECK(std::abs(bhattacharyya(bsc) - 2 * std::sqrt(0.11 * 0.89)) < 1e-12);
  CHECK(std::abs(symmetric_capacity(bsc) - (1 - oracle::h2(0.11))) < 1e-12);
  CHECK(std::abs(symmetric_capacity(Bdmc::bec(0.3)) - 0.7) < 1e-12);
  CHECK(std::abs(bhattacharyya(Bdmc::bec(0.3)) - 0.3) < 1e-12);
  CHECK(Bdmc::bec(0.3).erasure_probability().value() == doctest::Approx(0.3));
  CHECK_FALSE(bsc.erasure_probability().has_value());
  CHECK(bhattacharyya(Bdmc::noiseless()) == 0.0);
  CHECK(bhattacharyya(Bdmc::useless()) == doctest::Approx(1.0));
}

TEST_CASE("channel combining identities on random BDMCs") {
  std::mt19937_64 g(17);
  for (int t = 0; t < 100; ++t) {
    const Bdmc w = random_bdmc(g, 2 + t % 7);
    const Bdmc bad = combine_bad(w), good = combine_good(w);
    const double i = oracle::bdmc_mutual_info(w.w0(), w.w1());
    const double ib = oracle::bdmc_mutual_info(bad.w0(), bad.w1());
    const double ig = oracle::bdmc_mutual_info(good.w0(), good.w1());
    CHECK(std::abs(ib + ig - 2 * i) < 1e-10);
    CHECK(ib <= i + 1e-12);
    CHECK(ig >= i - 1e-12);
    CHECK(std::abs(symmetric_capacity(w) - i) < 1e-12);
    // Z+ = Z^2 holds for every BDMC; Z- <= 2Z - Z^2
    const double z = oracle::bdmc_bhattacharyya(w.w0(), w.w1());
    CHECK(std::abs(bhattacharyya(good) - z * z) < 1e-12);
    CHECK(bhattacharyya(bad) <= 2 * z - z * z + 1e-12);
    CHECK(bhattacharyya(bad) >= z - 1e-12);
  }
}

TEST_CASE("equal-ratio merging preserves Z and capacity") {
  std::mt19937_64 g(23);
  for (int t = 0; t < 20; ++t) {
    const Bdmc w = combine_good(combine_bad(random_bdmc(g, 3)));
    const Bdmc m = merge_equal_ratios(w);
    CHECK(m.outputs() <= w.outputs());
    CHECK(std::abs(bhattacharyya(m) - bhattacharyya(w)) < 1e-12);
    CHECK(std::abs(symmetric_capacity(m) - symmetric_capacity(w)) < 1e-12);
  }
  // BSC squared: 16 outputs collapse to the distinct likelihood ratios
  const Bdmc merged = merge_equal_ratios(combine_good(combine_good(Bdmc::bsc(0.1))));
  CHECK(merged.outputs() < 16);
}

TEST_CASE("quantized merging degrades") {
  std::mt19937_64 g(29);
  Bdmc w = random_bdmc(g, 6);
  w = combine_good(combine_bad(w));  // 2 * 36^2 outputs
  const Bdmc q = merge_quantized(w, 32);
  CHECK(q.outputs() <= 32);
  CHECK(bhattacharyya(q) >= bhattacharyya(w) - 1e-12);
  CHECK(symmetric_capacity(q) <= symmetric_capacity(w) + 1e-12);
  CHECK(std::abs(bhattacharyya(q) - bhattacharyya(w)) < 0.05);
}

TEST_CASE("generator matrix and encoder agree") {
  CHECK_THROWS_AS(generator_matrix(0), InvalidArgumentError);
  const GeneratorMatrix g1 = generator_matrix(1);
  CHECK(g1(0, 0) == 1);
  CHECK(g1(0, 1) == 1);
  CHECK(g1(1, 0) == 0);
  CHECK(g1(1, 1) == 1);
  std::mt19937_64 rng(31);
  for (int k = 1; k <= 8; ++k) {
    const GeneratorMatrix g = generator_matrix(k);
    for (int t = 0; t < 20; ++t) {
      Bits u(g.n());
      for (auto& b : u) b = rng() & 1U;
      CHECK(polar_encode(u, k) == g.apply(u));
    }
    // G is an involution over GF(2)
    for (std::size_t c = 0; c < g.n(); c += 3) {
      Bits e(g.n(), 0);
      e[c] = 1;
      CHECK(g.apply(g.apply(e)) == e);
    }
  }
}

TEST_CASE("polarization matches brute-force synthesized channels") {
  SUBCASE("BSC") {
    const Bdmc w = Bdmc::bsc(0.11);
    for (int k = 1; k <= 3; ++k) {
      const auto oracle_z = brute_force_z(w, k);
      const PolarizationResult pr = polarize(w, k);
      for (std::size_t i = 0; i < pr.n; ++i) CHECK(std::abs(pr.z[i] - oracle_z[i]) < 1e-12);
    }
  }
  SUBCASE("ternary-output channel") {
    const Bdmc w({0.6, 0.3, 0.1}, {0.2, 0.3, 0.5});
    const auto oracle_z = brute_force_z(w, 2);
    const PolarizationResult pr = polarize(w, 2);
    for (std::size_t i = 0; i < pr.n; ++i) CHECK(std::abs(pr.z[i] - oracle_z[i]) < 1e-12);
  }
}

TEST_CASE("BEC closed form") {
  const PolarizationResult k1 = polarize_bec(0.5, 1);
  CHECK(k1.z[0] == 0.75);
  CHECK(k1.z[1] == 0.25);

  const PolarizationResult pr = polarize(Bdmc::bec(0.5), 10);
  const auto oz = oracle::bec_z(0.5, 10);
  REQUIRE(pr.z.size() == 1024);
  double conserved = 0.0;
  for (std::size_t i = 0; i < pr.n; ++i) {
    CHECK(std::abs(pr.z[i] - oz[i]) <= 1e-12);
    conserved += 1.0 - pr.z[i];
  }
  CHECK(std::abs(conserved - 512.0) < 1e-9);

  // the generic recursion agrees with the closed form
  PolarizeOptions generic;
  generic.bec_closed_form = false;
  const PolarizationResult slow = polarize(Bdmc::bec(0.3), 6, generic);
  const auto oz3 = oracle::bec_z(0.3, 6);
  for (std::size_t i = 0; i < slow.n; ++i) CHECK(std::abs(slow.z[i] - oz3[i]) < 1e-12);
}

TEST_CASE("alphabet cap") {
  PolarizeOptions tight;
  tight.alphabet_cap = 8;
  CHECK_THROWS_AS(polarize(Bdmc::bsc(0.1), 6, tight), AlphabetOverflowError);
  tight.approximate_merge = true;
  tight.quantize_bins = 64;
  const PolarizationResult approx = polarize(Bdmc::bsc(0.1), 5, tight);
  PolarizeOptions roomy;
  roomy.alphabet_cap = std::size_t{1} << 22;
  const PolarizationResult exact = polarize(Bdmc::bsc(0.1), 5, roomy);
  for (std::size_t i = 0; i < exact.n; ++i) {
    CHECK(approx.z[i] >= exact.z[i] - 1e-12);  // degrading merges only raise Z
    CHECK(approx.z[i] - exact.z[i] < 0.05);
  }
}

TEST_CASE("threshold and set selection") {
  CHECK(std::abs(polar_threshold(1024, 0.5) - std::ldexp(1.0, -32) / 1024) < 1e-30);
  const double eb = error_bound(1024, 0.5);
  CHECK(std::abs(eb - 1024 * std::ldexp(1.0, -32)) <= 1e-15 * eb);

  PolarizationResult pr{2, 4, {}};
  const double t = polar_threshold(4, 0.25);
  pr.z = {t, t / 2, 0.9, 0.0};
  const GoodBadSets s = select_sets(pr, 0.25);
  CHECK(s.good == std::vector<std::size_t>{1, 3});
  CHECK(s.bad == std::vector<std::size_t>{0, 2});  // z == threshold is bad
  CHECK_THROWS_AS(select_sets(pr, 0.5), InvalidArgumentError);
  CHECK_THROWS_AS(select_sets(pr, 0.0), InvalidArgumentError);

  const PolarizationResult bec = polarize_bec(0.3, 8);
  const GoodBadSets b = select_by_budget(bec, 0.01);
  double sum = 0.0;
  for (auto i : b.good) sum += bec.z[i];
  CHECK(sum <= 0.01);
  std::vector<double> rest;
  for (auto i : b.bad) rest.push_back(bec.z[i]);
  CHECK(sum + *std::min_element(rest.begin(), rest.end()) > 0.01);
  CHECK(b.good.size() + b.bad.size() == 256);
}

TEST_CASE("partial distances give exponent one half") {
  for (int k = 1; k <= 4; ++k) {
    const PartialDistanceReport r = beta_from_partial_distances(k);
    REQUIRE(r.d.size() == (std::size_t{1} << k));
    std::vector<int> expect;
    for (std::size_t i = 0; i < r.d.size(); ++i) expect.push_back(1 << std::popcount(i));
    std::vector<int> got = r.d;
    std::sort(got.begin(), got.end());
    std::sort(expect.begin(), expect.end());
    CHECK(got == expect);
    CHECK(std::abs(r.beta_hat - 0.5) < 1e-12);
  }
  CHECK_THROWS_AS(beta_from_partial_distances(6), InvalidArgumentError);
}

TEST_CASE("SC decoder") {
  const int k = 3;
  const std::size_t n = 8;
  const GoodBadSets sets = GoodBadSets::from_good(n, {3, 5, 6, 7});
  Bits frozen(n, 0);
  frozen[0] = 1;

  SUBCASE("noiseless channel recovers the message") {
    const ScDecoder dec(sets, frozen);
    std::mt19937_64 g(1);
    for (int t = 0; t < 16; ++t) {
      Bits u = frozen;
      for (auto i : sets.good) u[i] = g() & 1U;
      const Bits x = polar_encode(u, k);
      std::vector<double> l(n);
      for (std::size_t i = 0; i < n; ++i) l[i] = x[i] ? 0.0 : std::numeric_limits<double>::infinity();
      CHECK(dec.decode(l) == u);
    }
  }

  SUBCASE("matches a brute-force successive cancellation oracle") {
    const GeneratorMatrix g = generator_matrix(k);
    const double p = 0.15;
    const ScDecoder dec(sets, frozen);
    std::mt19937_64 rng(77);
    int compared = 0;
    for (int t = 0; t < 200; ++t) {
      Bits y(n);
      for (auto& b : y) b = rng() & 1U;
      std::vector<double> llr(n);
      for (std::size_t i = 0; i < n; ++i) llr[i] = (y[i] ? -1.0 : 1.0) * std::log((1 - p) / p);
      // oracle: u_i maximizes sum over future bits of P(y | G u)
      Bits u(n, 0);
      bool tie = false;
      for (std::size_t i = 0; i < n && !tie; ++i) {
        double like[2] = {0, 0};
        for (std::size_t ui = 0; ui < 2; ++ui)
          for (std::size_t rest = 0; rest < (std::size_t{1} << (n - i - 1)); ++rest) {
            Bits m = u;
            m[i] = static_cast<std::uint8_t>(ui);
            for (std::size_t j = i + 1; j < n; ++j) m[j] = (rest >> (j - i - 1)) & 1U;
            const Bits x = g.apply(m);
            double pr = 1.0;
            for (std::size_t j = 0; j < n; ++j) pr *= x[j] == y[j] ? 1 - p : p;
            like[ui] += pr;
          }
        const bool is_frozen = std::find(sets.good.begin(), sets.good.end(), i) == sets.good.end();
        if (is_frozen) {
          u[i] = frozen[i];
        } else {
          if (std::abs(std::log(like[0] / like[1])) < 1e-9) tie = true;
          u[i] = like[0] >= like[1] ? 0 : 1;
        }
      }
      if (tie) continue;
      ++compared;
      CHECK(dec.decode_llr(llr) == u);
    }
    CHECK(compared > 100);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(ScDecoder(sets, Bits(4, 0)), InvalidArgumentError);
    const ScDecoder dec(sets, frozen);
    std::vector<double> l(n, 1.0);
    l[2] = std::nan("");
    CHECK_THROWS_AS(dec.decode(l), InvalidArgumentError);
    l[2] = -1.0;
    CHECK_THROWS_AS(dec.decode(l), InvalidArgumentError);
    CHECK_THROWS_AS(dec.decode(std::vector<double>(4, 1.0)), DimensionError);
    CHECK_THROWS_AS(ScDecoder(GoodBadSets::from_good(6, {1}), Bits(6, 0)), DimensionError);
  }
}

TEST_CASE("Monte Carlo block error") {
  const PolarizationResult pr = polarize_bec(0.3, 8);
  const CodeConfig code{select_by_budget(pr, 0.01), Bits(256, 0)};
  const auto a = monte_carlo_block_error(code, bec_sampler(0.3), 2000, 5);
  CHECK(a.rate <= 0.02);
  setenv("QRELAY_THREADS", "1", 1);
  const auto b = monte_carlo_block_error(code, bec_sampler(0.3), 2000, 5);
  setenv("QRELAY_THREADS", "7", 1);
  const auto c = monte_carlo_block_error(code, bec_sampler(0.3), 2000, 5);
  unsetenv("QRELAY_THREADS");
  CHECK(a.errors == b.errors);
  CHECK(b.errors == c.errors);

  const auto noiseless = monte_carlo_block_error(code, noiseless_sampler(), 100, 1);
  CHECK(noiseless.errors == 0);

  // rate above capacity: almost every block fails
  const CodeConfig greedy{GoodBadSets::from_good(256, [] {
                            std::vector<std::size_t> all(256);
                            std::iota(all.begin(), all.end(), 0);
                            return all;
                          }()),
                          Bits(256, 0)};
  CHECK(monte_carlo_block_error(greedy, bsc_sampler(0.1), 200, 3).rate > 0.9);
  CHECK_THROWS_AS(monte_carlo_block_error(code, bec_sampler(0.3), 0, 1), InvalidArgumentError);
}

TEST_CASE("polarization CSV") {
  const PolarizationResult pr = polarize_bec(0.5, 3);
  const std::string csv = polarization_csv(pr, select_sets(pr, 0.45));
  CHECK(csv.rfind("index,z,set\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find("0,0.99609375,bad\n") != std::string::npos);
}
