#include "qrelay/relay.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "qrelay/errors.hpp"
#include "qrelay/parallel.hpp"

namespace qrelay {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr int kLatticeSteps = 32;

double xlog2(double p, double q) { return p > 0.0 ? p * std::log2(p / q) : 0.0; }

double holevo_uniform(const KrausChannel& ch) {
  const int d = ch.in_dim();
  Matrix avg = Matrix::Zero(ch.out_dim(), ch.out_dim());
  double mean_entropy = 0.0;
  for (int k = 0; k < d; ++k) {
    const DensityMatrix out = apply_kraus(ch, DensityMatrix::basis_state(d, k));
    avg += out.matrix() / static_cast<double>(d);
    mean_entropy += von_neumann_entropy(out) / static_cast<double>(d);
  }
  return von_neumann_entropy(DensityMatrix(std::move(avg))) - mean_entropy;
}

}  // namespace

Dmc::Dmc(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  if (rows_.empty() || rows_.front().empty()) throw InvalidArgumentError("channel table must be non-empty");
  for (const auto& r : rows_) {
    if (r.size() != rows_.front().size()) throw InvalidArgumentError("channel rows differ in length");
    double s = 0.0;
    for (double v : r) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgumentError("transition probabilities must be >= 0");
      s += v;
    }
    if (std::abs(s - 1.0) > kRowTolerance) throw InvalidArgumentError("transition row does not sum to 1");
  }
}

Dmc Dmc::from_bdmc(const Bdmc& w) { return Dmc({w.w0(), w.w1()}); }

Dmc Dmc::erasure_stage(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgumentError("erasure probability must lie in [0, 1]");
  return Dmc({{1.0 - epsilon, 0.0, epsilon}, {0.0, 1.0 - epsilon, epsilon}, {0.0, 0.0, 1.0}});
}

Dmc compose(const Dmc& first, const Dmc& second) {
  if (first.outputs() != second.inputs())
    throw DimensionError("cannot compose: " + std::to_string(first.outputs()) + " outputs feed " +
                         std::to_string(second.inputs()) + " inputs");
  std::vector<std::vector<double>> rows(first.inputs(), std::vector<double>(second.outputs(), 0.0));
  for (std::size_t x = 0; x < first.inputs(); ++x)
    for (std::size_t m = 0; m < first.outputs(); ++m)
      for (std::size_t y = 0; y < second.outputs(); ++y) rows[x][y] += first(x, m) * second(m, y);
  for (auto& r : rows) {
    const double s = std::accumulate(r.begin(), r.end(), 0.0);
    for (double& v : r) v /= s;
  }
  return Dmc(std::move(rows));
}

double symmetric_capacity(const Dmc& ch) {
  const auto nx = static_cast<double>(ch.inputs());
  double info = 0.0;
  for (std::size_t y = 0; y < ch.outputs(); ++y) {
    double q = 0.0;
    for (std::size_t x = 0; x < ch.inputs(); ++x) q += ch(x, y) / nx;
    for (std::size_t x = 0; x < ch.inputs(); ++x) info += xlog2(ch(x, y), q) / nx;
  }
  return info;
}

double link_symmetric_capacity(const LinkChannel& link) {
  return std::visit(
      [](const auto& ch) -> double {
        using T = std::decay_t<decltype(ch)>;
        if constexpr (std::is_same_v<T, Dmc>)
          return symmetric_capacity(ch);
        else
          return holevo_uniform(ch);
      },
      link);
}

void RelayChannelSpec::validate() const {
  if (!(p_e2 > 0.0 && p_e2 < 1.0)) throw InvalidArgumentError("relay success probability must satisfy 0 < p_e2 < 1");
  (void)compose_relay(*this);
  if (e1d.index() != e1e2.index()) throw InvalidArgumentError("relay links must all be classical or all quantum");
  partition.validate();
}

LinkChannel compose_relay(const RelayChannelSpec& spec) {
  if (spec.e1e2.index() != spec.e2d.index())
    throw InvalidArgumentError("cannot compose a classical link with a quantum link");
  if (const auto* first = std::get_if<Dmc>(&spec.e1e2)) return compose(*first, std::get<Dmc>(spec.e2d));
  return compose(std::get<KrausChannel>(spec.e1e2), std::get<KrausChannel>(spec.e2d));
}

double relay_capacity_min(double c_12, double c_1d, double c_2d) {
  if (c_12 < 0.0 || c_1d < 0.0 || c_2d < 0.0) throw InvalidArgumentError("capacities must be non-negative");
  return std::min(c_12, c_1d + c_2d);
}

SetCapacities set_capacities(const IndexSetPartition& part) {
  if (part.n == 0) throw InvalidArgumentError("partition over an empty block");
  const auto n = static_cast<double>(part.n);
  return {static_cast<double>(part.good_phase().size()) / n, static_cast<double>(part.p2.size()) / n,
          static_cast<double>(part.s_in.size()) / n};
}

RelayDiagnostics relay_diagnostics(const RelayChannelSpec& spec) {
  RelayDiagnostics d;
  d.c_e1e2 = link_symmetric_capacity(spec.e1e2);
  d.c_e2d = link_symmetric_capacity(spec.e2d);
  d.c_e1d = link_symmetric_capacity(spec.e1d);
  d.c_e1e2d = link_symmetric_capacity(compose_relay(spec));
  d.capacity_min = relay_capacity_min(d.c_e1e2, d.c_e1d, d.c_e2d);
  d.direct_noisier = d.c_e1d <= d.c_e1e2d;
  return d;
}

JointDistribution::JointDistribution(std::size_t a_size, std::size_t a_prime_size, std::vector<double> p)
    : a_(a_size), ap_(a_prime_size), p_(std::move(p)) {
  if (a_ == 0 || ap_ == 0 || a_ > 4 || ap_ > 4)
    throw InvalidArgumentError("relay alphabets must have between 1 and 4 symbols");
  if (p_.size() != a_ * ap_) throw DimensionError("joint distribution has the wrong number of cells");
  double s = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw InvalidArgumentError("joint probabilities must be >= 0");
    s += v;
  }
  if (std::abs(s - 1.0) > kRowTolerance) throw InvalidArgumentError("joint distribution does not sum to 1");
}

JointDistribution JointDistribution::uniform(std::size_t a_size, std::size_t a_prime_size) {
  const std::size_t cells = a_size * a_prime_size;
  return JointDistribution(a_size, a_prime_size, std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
}

RelayDmc::RelayDmc(std::size_t a_size, std::size_t a_prime_size, std::size_t b_size, std::size_t b_prime_size,
                   std::vector<double> table)
    : a_(a_size), ap_(a_prime_size), b_(b_size), bp_(b_prime_size), table_(std::move(table)) {
  if (a_ == 0 || ap_ == 0 || a_ > 4 || ap_ > 4)
    throw InvalidArgumentError("relay alphabets must have between 1 and 4 symbols");
  if (table_.size() != a_ * ap_ * b_ * bp_) throw DimensionError("relay channel table has the wrong size");
  for (std::size_t a = 0; a < a_; ++a)
    for (std::size_t ap = 0; ap < ap_; ++ap) {
      double s = 0.0;
      for (std::size_t b = 0; b < b_; ++b)
        for (std::size_t bp = 0; bp < bp_; ++bp) s += (*this)(b, bp, a, ap);
      if (std::abs(s - 1.0) > kRowTolerance) throw InvalidArgumentError("relay channel row does not sum to 1");
    }
}

double RelayDmc::operator()(std::size_t b, std::size_t bp, std::size_t a, std::size_t ap) const {
  return table_[((a * ap_ + ap) * b_ + b) * bp_ + bp];
}

RelayDmc RelayDmc::from_links(const Dmc& a_to_b, const Dmc& a_prime_to_b, const Dmc& a_to_relay) {
  if (a_to_b.inputs() != a_to_relay.inputs()) throw DimensionError("sender links disagree on the input alphabet");
  const std::size_t na = a_to_b.inputs();
  const std::size_t nap = a_prime_to_b.inputs();
  const std::size_t y1 = a_to_b.outputs();
  const std::size_t y2 = a_prime_to_b.outputs();
  const std::size_t nbp = a_to_relay.outputs();
  std::vector<double> table(na * nap * y1 * y2 * nbp);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t ap = 0; ap < nap; ++ap)
      for (std::size_t b1 = 0; b1 < y1; ++b1)
        for (std::size_t b2 = 0; b2 < y2; ++b2)
          for (std::size_t bp = 0; bp < nbp; ++bp)
            table[((a * nap + ap) * (y1 * y2) + b1 * y2 + b2) * nbp + bp] =
                a_to_b(a, b1) * a_prime_to_b(ap, b2) * a_to_relay(a, bp);
  return RelayDmc(na, nap, y1 * y2, nbp, std::move(table));
}

RelayMutualInfo relay_mutual_info(const JointDistribution& jd, const RelayDmc& ch) {
  if (jd.a_size() != ch.a_size() || jd.a_prime_size() != ch.a_prime_size())
    throw DimensionError("joint distribution does not match the relay channel alphabets");
  const std::size_t na = ch.a_size(), nap = ch.a_prime_size(), nb = ch.b_size(), nbp = ch.b_prime_size();

  RelayMutualInfo out;
  // I(A,A':B) with p(b|a,a') = sum_b' p(b,b'|a,a')
  std::vector<double> pb(nb, 0.0);
  std::vector<double> cond(na * nap * nb, 0.0);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t ap = 0; ap < nap; ++ap)
      for (std::size_t b = 0; b < nb; ++b) {
        double v = 0.0;
        for (std::size_t bp = 0; bp < nbp; ++bp) v += ch(b, bp, a, ap);
        cond[(a * nap + ap) * nb + b] = v;
        pb[b] += jd(a, ap) * v;
      }
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t ap = 0; ap < nap; ++ap)
      for (std::size_t b = 0; b < nb; ++b) out.i_joint += jd(a, ap) * xlog2(cond[(a * nap + ap) * nb + b], pb[b]);

  // I(A:B'|A') = sum_a' p(a') I(A:B'|A'=a')
  for (std::size_t ap = 0; ap < nap; ++ap) {
    double pap = 0.0;
    for (std::size_t a = 0; a < na; ++a) pap += jd(a, ap);
    if (pap <= 0.0) continue;
    std::vector<double> pbp(nbp, 0.0);
    std::vector<double> cbp(na * nbp, 0.0);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t bp = 0; bp < nbp; ++bp) {
        double v = 0.0;
        for (std::size_t b = 0; b < nb; ++b) v += ch(b, bp, a, ap);
        cbp[a * nbp + bp] = v;
        pbp[bp] += jd(a, ap) / pap * v;
      }
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t bp = 0; bp < nbp; ++bp) out.i_cond += jd(a, ap) * xlog2(cbp[a * nbp + bp], pbp[bp]);
  }
  return out;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

JointDistribution from_counts(const RelayDmc& ch, const std::vector<int>& counts) {
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = counts[i] / static_cast<double>(kLatticeSteps);
  return JointDistribution(ch.a_size(), ch.a_prime_size(), std::move(p));
}

}  // namespace

RelayMaximum maximize_relay_min(const RelayDmc& ch) {
  const std::size_t cells = ch.a_size() * ch.a_prime_size();
  RelayMaximum best{JointDistribution::uniform(ch.a_size(), ch.a_prime_size()), {}, 0};
  best.value = relay_mutual_info(best.best, ch);
  best.evaluated = 1;

  auto consider = [&](const std::vector<int>& counts) {
    const JointDistribution jd = from_counts(ch, counts);
    const RelayMutualInfo v = relay_mutual_info(jd, ch);
    ++best.evaluated;
    if (v.min_term() > best.value.min_term()) {
      best.best = jd;
      best.value = v;
      return true;
    }
    return false;
  };

  if (binomial(kLatticeSteps + cells - 1, cells - 1) <= 1e6) {
    std::vector<int> counts(cells, 0);
    std::function<void(std::size_t, int)> walk = [&](std::size_t cell, int remaining) {
      if (cell + 1 == cells) {
        counts[cell] = remaining;
        consider(counts);
        return;
      }
      for (int c = 0; c <= remaining; ++c) {
        counts[cell] = c;
        walk(cell + 1, remaining - c);
      }
    };
    walk(0, kLatticeSteps);
    return best;
  }

  // Coordinate ascent: move one lattice step of mass between two cells.
  std::vector<int> counts(cells, kLatticeSteps / static_cast<int>(cells));
  for (int r = 0; r < kLatticeSteps % static_cast<int>(cells); ++r) ++counts[r];
  (void)consider(counts);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t from = 0; from < cells; ++from)
      for (std::size_t to = 0; to < cells; ++to) {
        if (from == to || counts[from] == 0) continue;
        --counts[from];
        ++counts[to];
        if (consider(counts)) {
          improved = true;
        } else {
          ++counts[from];
          --counts[to];
        }
      }
  }
  return best;
}

double relay_private_capacity(const IndexSetPartition& part) {
  if (part.n == 0) throw InvalidArgumentError("partition over an empty block");
  const long long difference =
      static_cast<long long>(part.good_phase().size()) - static_cast<long long>(part.p2.size());
  if (difference != static_cast<long long>(part.s_in.size()))
    throw InvalidStateError("good phase set does not decompose as P2 u S_in");
  return static_cast<double>(difference) / static_cast<double>(part.n);
}

RelayTrialResult simulate_relay(const RelayChannelSpec& spec, std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgumentError("trials must be >= 1");
  if (!(spec.p_e2 > 0.0 && spec.p_e2 < 1.0))
    throw InvalidArgumentError("relay success probability must satisfy 0 < p_e2 < 1");
  spec.partition.validate();
  const double p = spec.p_e2;
  const auto successes = parallel_accumulate<std::uint64_t>(trials, [&](std::uint64_t t, std::uint64_t& acc) {
    CounterRng rng(seed, t);
    // success: the relay output is G(N_phase) \ P2 = S_in and Bob decodes it;
    // failure: Bob receives G(N_phase) and decoding fails.
    if (rng.bernoulli(p)) ++acc;
  });
  const auto s_in = static_cast<double>(spec.partition.s_in.size());
  RelayTrialResult r;
  r.trials = trials;
  r.successes = successes;
  r.empirical_success_rate = static_cast<double>(successes) / static_cast<double>(trials);
  r.mean_codeword_size_b = successes > 0 ? s_in : 0.0;
  r.mean_decodable_per_block = static_cast<double>(successes) * s_in / static_cast<double>(trials);
  return r;
}

double expected_throughput(const RelayChannelSpec& spec) {
  if (!(spec.p_e2 > 0.0 && spec.p_e2 < 1.0))
    throw InvalidArgumentError("relay success probability must satisfy 0 < p_e2 < 1");
  return spec.p_e2 * static_cast<double>(spec.partition.s_in.size());
}

}  // namespace qrelay
