#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <random>

#include "oracles.hpp"
#include "qrelay/errors.hpp"
#include "qrelay/relay.hpp"
#include "qrelay/superactivation.hpp"
#include "set_checks.hpp"

using namespace qrelay;

namespace {

Dmc random_dmc(std::mt19937_64& g, std::size_t in, std::size_t out) {
  std::vector<std::vector<double>> rows;
  for (std::size_t x = 0; x < in; ++x) rows.push_back(oracle::random_row(g, out));
  return Dmc(std::move(rows));
}

double entropy_of(const std::map<std::vector<std::size_t>, double>& p) {
  double h = 0.0;
  for (const auto& [_, v] : p)
    if (v > 0) h -= v * std::log2(v);
  return h;
}

// Joint entropies of p(a, a', b, b') marginalized onto the listed coordinates.
struct JointOracle {
  std::vector<std::pair<std::vector<std::size_t>, double>> cells;  // (a, a', b, b')

  double h(std::initializer_list<int> keep) const {
    std::map<std::vector<std::size_t>, double> m;
    for (const auto& [x, v] : cells) {
      std::vector<std::size_t> key;
      for (int k : keep) key.push_back(x[static_cast<std::size_t>(k)]);
      m[key] += v;
    }
    return entropy_of(m);
  }
};

IndexSetPartition sample_partition() {
  // S_in = {0..4}, P1 = {5, 6}, P2 = {7, 8, 9}, B = {10, 11}
  std::uint32_t amp = 0x7f, phase = 0x1f | (0x7u << 7);
  return build_partition({12, setcheck::from_bits(amp, 12), setcheck::from_bits(phase, 12)});
}

RelayChannelSpec classical_spec(double p_e2) {
  const Dmc a = Dmc::from_bdmc(Bdmc::bsc(0.05)), b = Dmc::from_bdmc(Bdmc::bsc(0.1));
  return {a, b, compose(a, b), p_e2, sample_partition()};
}

}  // namespace

TEST_CASE("DMC composition") {
  const Dmc bsc1 = Dmc::from_bdmc(Bdmc::bsc(0.1)), bsc2 = Dmc::from_bdmc(Bdmc::bsc(0.2));
  const Dmc c = compose(bsc1, bsc2);
  CHECK(std::abs(c(0, 1) - (0.1 * 0.8 + 0.9 * 0.2)) < 1e-15);
  CHECK(std::abs(symmetric_capacity(c) - (1 - oracle::h2(0.26))) < 1e-12);

  // two erasure stages compose to erasure 1 - (1 - e1)(1 - e2)
  const Dmc e = compose(Dmc::erasure_stage(0.2), Dmc::erasure_stage(0.3));
  CHECK(std::abs(e(0, 2) - 0.44) < 1e-15);
  CHECK(std::abs(e(2, 2) - 1.0) < 1e-15);

  CHECK_THROWS_AS(compose(Dmc::from_bdmc(Bdmc::bec(0.1)), bsc1), DimensionError);
  CHECK_THROWS_AS(Dmc({{0.5, 0.4}}), InvalidArgumentError);
}

TEST_CASE("relay capacity expressions") {
  CHECK(relay_capacity_min(0.5, 0.2, 0.1) == doctest::Approx(0.3));
  CHECK(relay_capacity_min(0.2, 0.2, 0.1) == doctest::Approx(0.2));
  CHECK_THROWS_AS(relay_capacity_min(-0.1, 0.2, 0.1), InvalidArgumentError);

  const IndexSetPartition part = sample_partition();
  const SetCapacities s = set_capacities(part);
  CHECK(s.c_e1e2 == 8.0 / 12.0);
  CHECK(s.c_e1d == 3.0 / 12.0);
  CHECK(s.c_e2d == 5.0 / 12.0);
  CHECK(relay_private_capacity(part) == 5.0 / 12.0);
}

TEST_CASE("relay diagnostics on classical links") {
  const RelayChannelSpec spec = classical_spec(0.3);
  CHECK_NOTHROW(spec.validate());
  const RelayDiagnostics d = relay_diagnostics(spec);
  CHECK(std::abs(d.c_e1e2 - (1 - oracle::h2(0.05))) < 1e-12);
  CHECK(std::abs(d.c_e2d - (1 - oracle::h2(0.1))) < 1e-12);
  CHECK(std::abs(d.c_e1e2d - d.c_e1d) < 1e-12);
  CHECK(d.direct_noisier);
  CHECK(d.capacity_min == doctest::Approx(std::min(d.c_e1e2, d.c_e1d + d.c_e2d)));

  RelayChannelSpec bad = spec;
  bad.p_e2 = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
  bad = spec;
  bad.e2d = KrausChannel::identity(2);
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
}

TEST_CASE("quantum links use the Holevo quantity of the computational basis") {
  const LinkChannel id = KrausChannel::identity(2);
  CHECK(std::abs(link_symmetric_capacity(id) - 1.0) < 1e-12);
  const LinkChannel bf = KrausChannel::bit_flip(0.1);
  CHECK(std::abs(link_symmetric_capacity(bf) - (1 - oracle::h2(0.1))) < 1e-12);
  const LinkChannel deph = KrausChannel::dephasing(0.3);  // Z basis untouched
  CHECK(std::abs(link_symmetric_capacity(deph) - 1.0) < 1e-12);

  const RelayChannelSpec spec{KrausChannel::bit_flip(0.1), KrausChannel::bit_flip(0.2),
                              KrausChannel::bit_flip(0.26), 0.4, sample_partition()};
  const RelayDiagnostics d = relay_diagnostics(spec);
  CHECK(std::abs(d.c_e1e2d - (1 - oracle::h2(0.26))) < 1e-12);
  CHECK(std::abs(d.c_e1e2d - d.c_e1d) < 1e-12);
}

TEST_CASE("relay mutual information against an entropy oracle") {
  std::mt19937_64 g(41);
  for (int t = 0; t < 30; ++t) {
    const std::size_t na = 2 + t % 3, nap = 2 + (t / 3) % 2;
    const Dmc ab = random_dmc(g, na, 2 + t % 2), apb = random_dmc(g, nap, 2), abp = random_dmc(g, na, 3);
    const RelayDmc ch = RelayDmc::from_links(ab, apb, abp);
    const JointDistribution jd(na, nap, oracle::random_row(g, na * nap));

    JointOracle o;
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t ap = 0; ap < nap; ++ap)
        for (std::size_t b = 0; b < ch.b_size(); ++b)
          for (std::size_t bp = 0; bp < ch.b_prime_size(); ++bp)
            o.cells.push_back({{a, ap, b, bp}, jd(a, ap) * ch(b, bp, a, ap)});
    const double i_joint = o.h({0, 1}) + o.h({2}) - o.h({0, 1, 2});
    const double i_cond = o.h({0, 1}) + o.h({1, 3}) - o.h({0, 1, 3}) - o.h({1});

    const RelayMutualInfo r = relay_mutual_info(jd, ch);
    CHECK(std::abs(r.i_joint - i_joint) < 1e-10);
    CHECK(std::abs(r.i_cond - i_cond) < 1e-10);
  }
}

TEST_CASE("max-min search never loses to the uniform start") {
  const Dmc noisy = Dmc::from_bdmc(Bdmc::bsc(0.2)), clean = Dmc::from_bdmc(Bdmc::bsc(0.02));
  const RelayDmc ch = RelayDmc::from_links(noisy, noisy, clean);
  const RelayMaximum m = maximize_relay_min(ch);
  const RelayMutualInfo u = relay_mutual_info(JointDistribution::uniform(2, 2), ch);
  CHECK(m.value.min_term() >= u.min_term() - 1e-15);
  CHECK(m.evaluated > 1000);  // exhaustive lattice for four cells
  // both terms are bounded by the alphabet
  CHECK(m.value.i_joint <= 2.0 + 1e-12);
  CHECK(m.value.i_cond <= 1.0 + 1e-12);

  CHECK_THROWS_AS(JointDistribution(5, 2, std::vector<double>(10, 0.1)), InvalidArgumentError);
  CHECK_THROWS_AS(JointDistribution(2, 2, {0.5, 0.5, 0.5, 0.5}), InvalidArgumentError);
}

TEST_CASE("Monte Carlo relay throughput") {
  const double p = 0.3;
  const RelayChannelSpec spec = classical_spec(p);
  const std::uint64_t trials = 100000;
  const RelayTrialResult r = simulate_relay(spec, trials, 2024);
  const double s_in = 5.0;
  const double sigma = s_in * std::sqrt(p * (1 - p) / static_cast<double>(trials));
  CHECK(std::abs(r.mean_decodable_per_block - expected_throughput(spec)) <= 3 * sigma);
  CHECK(expected_throughput(spec) == doctest::Approx(p * s_in));
  CHECK(r.mean_codeword_size_b == s_in);

  setenv("QRELAY_THREADS", "1", 1);
  const RelayTrialResult serial = simulate_relay(spec, trials, 2024);
  setenv("QRELAY_THREADS", "5", 1);
  const RelayTrialResult five = simulate_relay(spec, trials, 2024);
  unsetenv("QRELAY_THREADS");
  CHECK(serial.successes == r.successes);
  CHECK(five.successes == r.successes);
  CHECK(simulate_relay(spec, trials, 2025).successes != r.successes);
  CHECK_THROWS_AS(simulate_relay(spec, 0, 1), InvalidArgumentError);
}

TEST_CASE("advantage threshold on the 99-point grid") {
  const IndexSetPartition part = sample_partition();
  for (int i = 1; i <= 99; ++i) {
    const double p = i / 100.0;
    const AssistedComparison c = compare_assisted(p, part);
    CHECK(c.advantage == (p < 0.5));
    CHECK(c.b == doctest::Approx(p * 5));
    CHECK(c.b_star == 2.5);
  }
  CHECK_THROWS_AS(compare_assisted(0.0, part), InvalidArgumentError);
}
