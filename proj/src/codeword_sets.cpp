#include "qrelay/codeword_sets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrelay/errors.hpp"

namespace qrelay {

IndexSet IndexSet::full(std::size_t universe) { return from_mask(std::vector<bool>(universe, true)); }

IndexSet IndexSet::from_indices(std::size_t universe, std::span<const std::size_t> indices) {
  IndexSet s(universe);
  for (auto i : indices) s.insert(i);
  return s;
}

IndexSet IndexSet::from_mask(std::vector<bool> mask) {
  IndexSet s;
  s.mask_ = std::move(mask);
  return s;
}

std::size_t IndexSet::size() const noexcept {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

void IndexSet::insert(std::size_t i) {
  if (i >= mask_.size())
    throw DimensionError("index " + std::to_string(i) + " outside [0, " + std::to_string(mask_.size()) + ")");
  mask_[i] = true;
}

std::vector<std::size_t> IndexSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) out.push_back(i);
  return out;
}

void IndexSet::check_universe(const IndexSet& o) const {
  if (o.universe() != universe()) throw DimensionError("index sets over different universes");
}

IndexSet IndexSet::operator&(const IndexSet& o) const {
  check_universe(o);
  std::vector<bool> m(universe());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = mask_[i] && o.mask_[i];
  return from_mask(std::move(m));
}

IndexSet IndexSet::operator|(const IndexSet& o) const {
  check_universe(o);
  std::vector<bool> m(universe());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = mask_[i] || o.mask_[i];
  return from_mask(std::move(m));
}

IndexSet IndexSet::operator-(const IndexSet& o) const {
  check_universe(o);
  std::vector<bool> m(universe());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = mask_[i] && !o.mask_[i];
  return from_mask(std::move(m));
}

IndexSet IndexSet::complement() const {
  std::vector<bool> m(mask_);
  m.flip();
  return from_mask(std::move(m));
}

DualPolarization dual_polarization(const Bdmc& amplitude, const Bdmc& phase, int k, double beta,
                                   const PolarizeOptions& options) {
  const auto amp = select_sets(polarize(amplitude, k, options), beta);
  const auto ph = select_sets(polarize(phase, k, options), beta);
  DualPolarization dp;
  dp.n = amp.n;
  dp.good_amp = IndexSet::from_indices(dp.n, amp.good);
  dp.good_phase = IndexSet::from_indices(dp.n, ph.good);
  return dp;
}

std::pair<Bdmc, Bdmc> induced_amplitude_phase(double p_i, double p_x, double p_y, double p_z) {
  for (double p : {p_i, p_x, p_y, p_z})
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgumentError("Pauli weights must lie in [0, 1]");
  if (std::abs(p_i + p_x + p_y + p_z - 1.0) > 1e-12) throw InvalidArgumentError("Pauli weights must sum to 1");
  return {Bdmc::bsc(p_x + p_y), Bdmc::bsc(p_z + p_y)};
}

void IndexSetPartition::validate() const {
  for (const auto* s : {&s_in, &p1, &p2, &b})
    if (s->universe() != n) throw InvalidStateError("partition set has the wrong universe");
  const IndexSet* sets[] = {&s_in, &p1, &p2, &b};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (!sets[i]->disjoint(*sets[j])) throw InvalidStateError("partition sets overlap");
  if ((s_in | p1 | p2 | b).size() != n) throw InvalidStateError("partition does not cover [n]");
}

IndexSetPartition build_partition(const DualPolarization& dp) {
  if (dp.good_amp.universe() != dp.n || dp.good_phase.universe() != dp.n)
    throw DimensionError("good sets must be subsets of [n]");
  IndexSetPartition part;
  part.n = dp.n;
  const IndexSet bad_amp = dp.good_amp.complement();
  const IndexSet bad_phase = dp.good_phase.complement();
  part.s_in = dp.good_amp & dp.good_phase;
  part.p1 = dp.good_amp & bad_phase;
  part.p2 = bad_amp & dp.good_phase;
  part.b = bad_amp & bad_phase;
  part.validate();
  return part;
}

namespace {

double fraction(long long count, std::size_t n) { return static_cast<double>(count) / static_cast<double>(n); }

long long card(const IndexSet& s) { return static_cast<long long>(s.size()); }

void require_n(const IndexSetPartition& part) {
  if (part.n == 0) throw InvalidArgumentError("partition over an empty block");
}

}  // namespace

double p_sym_degraded(const IndexSetPartition& part) {
  require_n(part);
  return fraction(card(part.s_in), part.n);
}

double p_sym_nondegraded(const IndexSetPartition& part) {
  require_n(part);
  const long long direct = card(part.s_in) - card(part.b);
  const long long simplified = card(part.good_amp()) + card(part.good_phase()) - static_cast<long long>(part.n);
  if (direct != simplified) throw InvalidStateError("inclusion-exclusion identity violated; partition is inconsistent");
  return fraction(direct, part.n);
}

double r_sym_nondegraded(const IndexSetPartition& part) {
  require_n(part);
  return fraction(card(part.s_in) + card(part.b) - card(part.bad_amp()) + card(part.p2), part.n);
}

double nondegraded_phase_margin(const IndexSetPartition& part) {
  require_n(part);
  return fraction(card(part.s_in) - card(part.bad_phase()), part.n);
}

RateReport eve_capacity(const IndexSetPartition& part) {
  require_n(part);
  RateReport r;
  r.n = part.n;
  r.p_sym_degraded = p_sym_degraded(part);
  r.p_sym_nondegraded = p_sym_nondegraded(part);
  r.r_sym = r_sym_nondegraded(part);
  r.c_eve = fraction(card(part.p1) + card(part.p2), part.n);
  r.c_eve_p1 = fraction(card(part.p1), part.n);
  r.c_bob = 1.0 - r.c_eve_p1;
  r.c_bob_union = fraction(card(part.s_in | part.p2), part.n);
  r.eve_e1e2 = fraction(card(part.p2 | part.s_in), part.n);
  r.eve_e2d = fraction(card(part.s_in), part.n);
  r.bob_forms_agree = card(part.s_in | part.p2) == static_cast<long long>(part.n) - card(part.p1);
  r.negative_rate = r.p_sym_nondegraded < 0.0;
  return r;
}

ThresholdSets codeword_threshold_sets(std::span<const double> z_bob, std::span<const double> z_eve, double beta) {
  if (z_bob.size() != z_eve.size()) throw DimensionError("Bhattacharyya vectors differ in length");
  if (!(beta > 0.0 && beta < 0.5)) throw InvalidArgumentError("beta must satisfy 0 < beta < 0.5");
  const std::size_t n = z_bob.size();
  const double t = polar_threshold(n, beta);
  ThresholdSets out{IndexSet(n), IndexSet(n)};
  for (std::size_t i = 0; i < n; ++i) {
    if (z_bob[i] < t) out.bob.insert(i);
    if (z_eve[i] >= 1.0 - t) out.eve.insert(i);
  }
  return out;
}

std::string partition_csv(const IndexSetPartition& part) {
  std::ostringstream os;
  os << "index,set\n";
  for (std::size_t i = 0; i < part.n; ++i) {
    const char* label = part.s_in.contains(i) ? "S_in" : part.p1.contains(i) ? "P1" : part.p2.contains(i) ? "P2" : "B";
    os << i << ',' << label << '\n';
  }
  return os.str();
}

}  // namespace qrelay
