#include "qrelay/experiment.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "qrelay/codeword_sets.hpp"
#include "qrelay/csv.hpp"
#include "qrelay/density_ops.hpp"
#include "qrelay/errors.hpp"
#include "qrelay/parallel.hpp"
#include "qrelay/polar_core.hpp"
#include "qrelay/relay.hpp"
#include "qrelay/superactivation.hpp"

#ifndef QRELAY_VERSION
#define QRELAY_VERSION "0.0.0"
#endif

namespace qrelay {

using nlohmann::json;

namespace {

constexpr int kMaxK = 20;
constexpr int kSweepPoints = 99;

const std::array<std::pair<Command, const char*>, 6> kCommands{{
    {Command::polarize, "polarize"},
    {Command::sets, "sets"},
    {Command::capacity, "capacity"},
    {Command::relay_sim, "relay-sim"},
    {Command::superactivate, "superactivate"},
    {Command::sweep, "sweep"},
}};

double param(const ChannelSpec& spec, const char* name) {
  const auto it = spec.params.find(name);
  if (it == spec.params.end() || !it->is_number())
    throw ConfigError("channel '" + spec.kind + "' needs numeric parameter '" + name + "'");
  return it->get<double>();
}

Bdmc make_bdmc(const ChannelSpec& spec) {
  if (spec.kind == "bec") return Bdmc::bec(param(spec, "epsilon"));
  if (spec.kind == "bsc") return Bdmc::bsc(param(spec, "p"));
  if (spec.kind == "noiseless") return Bdmc::noiseless();
  if (spec.kind == "useless") return Bdmc::useless();
  throw ConfigError("unknown classical channel kind '" + spec.kind + "' (expected bec, bsc, noiseless, useless)");
}

ChannelSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("channel spec must be an object with a string 'kind'");
  return {j["kind"].get<std::string>(), j};
}

KrausChannel make_kraus(const ChannelSpec& spec) {
  if (spec.kind == "identity") return KrausChannel::identity(2);
  if (spec.kind == "dephasing") return KrausChannel::dephasing(param(spec, "q"));
  if (spec.kind == "bit_flip") return KrausChannel::bit_flip(param(spec, "q"));
  if (spec.kind == "depolarizing") return KrausChannel::depolarizing(param(spec, "q"));
  if (spec.kind == "pauli")
    return KrausChannel::pauli(param(spec, "p_i"), param(spec, "p_x"), param(spec, "p_y"), param(spec, "p_z"));
  if (spec.kind == "erasure") return KrausChannel::erasure(param(spec, "epsilon"));
  if (spec.kind == "compose") {
    if (!spec.params.contains("first") || !spec.params.contains("second"))
      throw ConfigError("channel 'compose' needs 'first' and 'second'");
    return compose(make_kraus(spec_from_json(spec.params["first"])),
                   make_kraus(spec_from_json(spec.params["second"])));
  }
  throw ConfigError("unknown quantum channel kind '" + spec.kind +
                    "' (expected identity, dephasing, bit_flip, depolarizing, pauli, erasure, compose)");
}

// (pI, pX, pY, pZ) for Pauli-type channels; nullopt otherwise.
std::optional<std::array<double, 4>> pauli_weights(const ChannelSpec& spec) {
  if (spec.kind == "identity") return std::array<double, 4>{1, 0, 0, 0};
  if (spec.kind == "dephasing") {
    const double q = param(spec, "q");
    return std::array<double, 4>{1 - q, 0, 0, q};
  }
  if (spec.kind == "bit_flip") {
    const double q = param(spec, "q");
    return std::array<double, 4>{1 - q, q, 0, 0};
  }
  if (spec.kind == "depolarizing") {
    const double q = param(spec, "q");
    return std::array<double, 4>{1 - 0.75 * q, 0.25 * q, 0.25 * q, 0.25 * q};
  }
  if (spec.kind == "pauli")
    return std::array<double, 4>{param(spec, "p_i"), param(spec, "p_x"), param(spec, "p_y"), param(spec, "p_z")};
  return std::nullopt;
}

struct AmpPhase {
  Bdmc amp;
  Bdmc phase;
};

AmpPhase resolve_amp_phase(const ExperimentConfig& c) {
  if (c.amp_channel && c.phase_channel) return {make_bdmc(*c.amp_channel), make_bdmc(*c.phase_channel)};
  for (const auto* spec : {&c.pauli_channel, &c.main_channel}) {
    if (!*spec) continue;
    if (const auto w = pauli_weights(**spec)) {
      auto [a, ph] = induced_amplitude_phase((*w)[0], (*w)[1], (*w)[2], (*w)[3]);
      return {a, ph};
    }
  }
  throw ConfigError(
      "amplitude/phase channels undetermined: give amp_channel and phase_channel, a pauli_channel, or a "
      "Pauli-type main_channel");
}

bool needs_amp_phase(Command c) {
  return c == Command::sets || c == Command::relay_sim || c == Command::superactivate || c == Command::sweep;
}

// Reads an optional field, recording a type error instead of throwing.
template <class T>
void read_field(const json& j, const char* key, T& out, std::vector<std::string>& errors,
                const std::function<bool(const json&)>& type_ok, const char* type_name) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!type_ok(*it)) {
    errors.push_back(std::string("'") + key + "' must be " + type_name);
    return;
  }
  out = it->get<T>();
}

PolarizeOptions polarize_options(const ExperimentConfig& c) {
  PolarizeOptions o;
  o.alphabet_cap = c.alphabet_cap;
  o.approximate_merge = c.approximate_merge;
  o.quantize_bins = c.quantize_bins;
  return o;
}

std::string join_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& s : cells) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out + '\n';
}

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

class OutputWriter {
public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open output file " + path.string());
    f << content;
    if (!f.flush()) throw Error("failed writing " + path.string());
    files_.push_back({name, sha256_hex(content), content.size()});
  }

  std::vector<OutputFile> files() const { return files_; }

private:
  std::filesystem::path dir_;
  std::vector<OutputFile> files_;
};

using Summary = std::vector<std::pair<std::string, std::string>>;

std::string quantity_csv(const Summary& rows) {
  std::string out = "quantity,value\n";
  for (const auto& [k, v] : rows) out += k + ',' + v + '\n';
  return out;
}

void run_polarize(const ExperimentConfig& c, OutputWriter& out, Summary& s) {
  const Bdmc w = make_bdmc(*c.channel);
  const PolarizationResult pr = polarize(w, c.k, polarize_options(c));
  const GoodBadSets sets = select_sets(pr, c.beta);
  out.write("polarization.csv", polarization_csv(pr, sets));
  const auto n = static_cast<double>(pr.n);
  s.emplace_back("n", num(pr.n));
  s.emplace_back("good", num(sets.good.size()));
  s.emplace_back("bad", num(sets.bad.size()));
  s.emplace_back("capacity_estimate", num(static_cast<double>(sets.good.size()) / n));
  s.emplace_back("symmetric_capacity", num(symmetric_capacity(w)));
  s.emplace_back("threshold", num(sets.threshold));
  s.emplace_back("error_bound", num(error_bound(pr.n, c.beta)));
}

IndexSetPartition partition_for(const ExperimentConfig& c) {
  const AmpPhase ap = resolve_amp_phase(c);
  return build_partition(dual_polarization(ap.amp, ap.phase, c.k, c.beta, polarize_options(c)));
}

void add_set_sizes(const IndexSetPartition& part, Summary& s) {
  s.emplace_back("n", num(part.n));
  s.emplace_back("S_in", num(part.s_in.size()));
  s.emplace_back("P1", num(part.p1.size()));
  s.emplace_back("P2", num(part.p2.size()));
  s.emplace_back("B", num(part.b.size()));
}

void run_sets(const ExperimentConfig& c, OutputWriter& out, Summary& s) {
  const IndexSetPartition part = partition_for(c);
  const RateReport r = eve_capacity(part);
  out.write("partition.csv", partition_csv(part));
  Summary rates{
      {"p_sym_degraded", num(r.p_sym_degraded)},
      {"p_sym_nondegraded", num(r.p_sym_nondegraded)},
      {"r_sym", num(r.r_sym)},
      {"c_bob", num(r.c_bob)},
      {"c_bob_union", num(r.c_bob_union)},
      {"c_eve", num(r.c_eve)},
      {"c_eve_p1", num(r.c_eve_p1)},
      {"eve_e1e2", num(r.eve_e1e2)},
      {"eve_e2d", num(r.eve_e2d)},
      {"phase_margin", num(nondegraded_phase_margin(part))},
      {"relay_private_capacity", num(relay_private_capacity(part))},
  };
  out.write("rates.csv", quantity_csv(rates));
  add_set_sizes(part, s);
  s.insert(s.end(), rates.begin(), rates.end());
  s.emplace_back("negative_rate", r.negative_rate ? "yes" : "no");
}

void run_capacity(const ExperimentConfig& c, OutputWriter& out, Summary& s) {
  const KrausChannel ch = make_kraus(*c.main_channel);
  if (ch.in_dim() != 2) throw ConfigError("capacity needs a qubit-input main_channel");
  Vector plus(2), minus(2);
  plus << 1.0, 1.0;
  minus << 1.0, -1.0;
  plus /= std::sqrt(2.0);
  minus /= std::sqrt(2.0);
  const DensityMatrix z0 = DensityMatrix::basis_state(2, 0), z1 = DensityMatrix::basis_state(2, 1);
  const DensityMatrix x0 = DensityMatrix::pure(plus), x1 = DensityMatrix::pure(minus);

  const BinaryCqChannel bob_amp(apply_kraus(ch, z0), apply_kraus(ch, z1));
  const BinaryCqChannel eve_amp(complementary_output(ch, z0), complementary_output(ch, z1));
  const BinaryCqChannel bob_phase(apply_kraus(ch, x0), apply_kraus(ch, x1));
  const BinaryCqChannel eve_phase(complementary_output(ch, x0), complementary_output(ch, x1));
  const CapacityReport amp = private_information(bob_amp, eve_amp);
  const CapacityReport phase = private_information(bob_phase, eve_phase);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  const double i_coh = coherent_information(ch, mixed);

  Summary rows{
      {"c_sym_amplitude", num(amp.c_sym)},
      {"i_ae_amplitude", num(amp.i_ae)},
      {"p_sym_amplitude", num(amp.p_sym_single_use)},
      {"c_sym_phase", num(phase.c_sym)},
      {"i_ae_phase", num(phase.i_ae)},
      {"p_sym_phase", num(phase.p_sym_single_use)},
      {"i_coh_maximally_mixed", num(i_coh)},
      {"assisted_single_use", num(assisted_single_use_capacity(bob_phase, eve_phase))},
      {"i_coh_unreliable_relay", num(coherent_information(unreliable_relay_channel(ch, c.p_e2), mixed))},
  };
  out.write("capacity.csv", quantity_csv(rows));
  s = rows;
}

void run_relay_sim(const ExperimentConfig& c, OutputWriter& out, Summary& s) {
  const AmpPhase ap = resolve_amp_phase(c);
  RelayChannelSpec spec{Dmc::from_bdmc(ap.phase), Dmc::from_bdmc(ap.amp), Dmc::from_bdmc(ap.amp), c.p_e2,
                        build_partition(dual_polarization(ap.amp, ap.phase, c.k, c.beta, polarize_options(c)))};
  // The direct link carries the phase bits through both noise stages.
  spec.e1d = compose(std::get<Dmc>(spec.e1e2), std::get<Dmc>(spec.e2d));
  spec.validate();
  const RelayTrialResult r = simulate_relay(spec, c.trials, c.seed);
  const double b_star = 0.5 * static_cast<double>(spec.partition.s_in.size());
  std::string csv = "p_e2,trials,successes,rate,expected_throughput,b_star_throughput\n";
  csv += join_row({num(c.p_e2), num(r.trials), num(r.successes), num(r.empirical_success_rate),
                   num(expected_throughput(spec)), num(b_star)});
  out.write("relay.csv", csv);

  const RelayDiagnostics d = relay_diagnostics(spec);
  add_set_sizes(spec.partition, s);
  s.emplace_back("successes", num(r.successes));
  s.emplace_back("empirical_throughput", num(r.mean_decodable_per_block));
  s.emplace_back("expected_throughput", num(expected_throughput(spec)));
  s.emplace_back("b_star_throughput", num(b_star));
  s.emplace_back("c_e1e2", num(d.c_e1e2));
  s.emplace_back("c_e2d", num(d.c_e2d));
  s.emplace_back("c_e1d", num(d.c_e1d));
  s.emplace_back("capacity_min", num(d.capacity_min));
  s.emplace_back("advantage", b_star > expected_throughput(spec) ? "superactivated relay" : "unassisted relay");
}

JointInputState joint_input(const ExperimentConfig& c) {
  if (c.rho_ac == "literal") return make_rho_ac_entangled(FlagVariant::literal);
  if (c.rho_ac == "product") return make_rho_ac_product(DensityMatrix::maximally_mixed(2));
  return make_rho_ac_entangled(FlagVariant::alternating);
}

KrausChannel main_for_input(const ExperimentConfig& c) {
  const KrausChannel main = make_kraus(*c.main_channel);
  if (main.in_dim() != 2) throw ConfigError("superactivation needs a qubit-input main_channel");
  return c.rho_ac == "product" ? main : lift_to_flagged_register(main);
}

const std::string kSuperHeader =
    "p,i_coh_joint,term_mm,term_me,term_em,term_ee,bound_2p1p,b,b_star,advantage\n";

struct SuperRow {
  SuperactivationReport rep;
  AssistedComparison cmp;
};

std::string super_row(const SuperRow& r) {
  const auto& t = r.rep.branch_terms;
  return join_row({num(r.rep.p), num(r.rep.i_coh_joint), num(t[0].i_coh), num(t[1].i_coh), num(t[2].i_coh),
                   num(t[3].i_coh), num(r.rep.bound_2p1p), num(r.cmp.b), num(r.cmp.b_star),
                   r.cmp.advantage ? "1" : "0"});
}

void add_bound_summary(double i_coh_main, Summary& s) {
  const BoundResult half = superactivated_bound(0.5, i_coh_main);
  s.emplace_back("i_coh_main", num(i_coh_main));
  s.emplace_back("bound_at_p_half", num(half.bound));
  s.emplace_back("p_star", num(half.p_star));
  s.emplace_back("bound_at_p_star", num(half.bound_at_p_star));
}

void run_superactivate(const ExperimentConfig& c, OutputWriter& out, Summary& s) {
  const IndexSetPartition part = partition_for(c);
  const SwitchChannel sc = build_switch_channel(c.p, main_for_input(c));
  const SuperRow row{joint_coherent_info(sc, joint_input(c)), compare_assisted(c.p_e2, part)};
  out.write("superactivation.csv", kSuperHeader + super_row(row));
  add_set_sizes(part, s);
  s.emplace_back("p", num(c.p));
  s.emplace_back("i_coh_joint", num(row.rep.i_coh_joint));
  add_bound_summary(row.rep.i_coh_main, s);
  s.emplace_back("b", num(row.cmp.b));
  s.emplace_back("b_star", num(row.cmp.b_star));
  s.emplace_back("advantage", row.cmp.advantage ? "yes (B* > B)" : "no (B* <= B)");
}

void run_sweep(const ExperimentConfig& c, OutputWriter& out, Summary& s) {
  const IndexSetPartition part = partition_for(c);
  const KrausChannel main = main_for_input(c);
  const JointInputState input = joint_input(c);
  std::vector<SuperRow> rows(kSweepPoints);
  // Rows land in their own slots, so the output order is fixed.
  parallel_accumulate<std::uint64_t>(kSweepPoints, [&](std::uint64_t i, std::uint64_t& done) {
    const double p = static_cast<double>(i + 1) / 100.0;
    rows[i] = {joint_coherent_info(build_switch_channel(p, main), input), compare_assisted(p, part)};
    ++done;
  });
  std::string csv = kSuperHeader;
  std::size_t advantaged = 0;
  double last_advantage = 0.0;
  for (const auto& r : rows) {
    csv += super_row(r);
    if (r.cmp.advantage) {
      ++advantaged;
      last_advantage = r.rep.p;
    }
  }
  out.write("sweep.csv", csv);
  add_set_sizes(part, s);
  s.emplace_back("grid_points", num(rows.size()));
  add_bound_summary(rows.front().rep.i_coh_main, s);
  s.emplace_back("advantage_points", num(advantaged));
  s.emplace_back("last_p_with_advantage", num(last_advantage));
}

}  // namespace

std::string command_name(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [cmd, n] : kCommands)
    if (name == n) return cmd;
  return std::nullopt;
}

json ExperimentConfig::echo() const {
  json j;
  j["command"] = command_name(command);
  const auto put = [&](const char* key, const std::optional<ChannelSpec>& spec) {
    if (spec) j[key] = spec->params;
  };
  put("channel", channel);
  put("amp_channel", amp_channel);
  put("phase_channel", phase_channel);
  put("pauli_channel", pauli_channel);
  put("main_channel", main_channel);
  j["k"] = k;
  j["beta"] = beta;
  j["p_e2"] = p_e2;
  j["p"] = p;
  j["trials"] = trials;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["alphabet_cap"] = alphabet_cap;
  j["approximate_merge"] = approximate_merge;
  j["quantize_bins"] = quantize_bins;
  j["rho_ac"] = rho_ac;
  return j;
}

ExperimentConfig parse_config(const json& j, const ConfigOverrides& overrides) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::vector<std::string> errors;
  ExperimentConfig c;

  static const std::set<std::string> known{"command", "channel",  "amp_channel", "phase_channel", "pauli_channel",
                                           "main_channel", "k", "beta", "p_e2", "p", "trials", "seed",
                                           "output_dir", "alphabet_cap", "approximate_merge", "quantize_bins", "rho_ac"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) errors.push_back("unknown key '" + key + "'");

  std::optional<Command> cmd = overrides.command;
  if (const auto it = j.find("command"); it != j.end()) {
    const auto parsed = it->is_string() ? parse_command(it->get<std::string>()) : std::nullopt;
    if (!parsed)
      errors.push_back("'command' must be one of polarize, sets, capacity, relay-sim, superactivate, sweep");
    else if (cmd && *cmd != *parsed)
      errors.push_back("config command '" + command_name(*parsed) + "' conflicts with command line '" +
                       command_name(*cmd) + "'");
    else
      cmd = parsed;
  }
  if (!cmd) errors.push_back("no command given");
  else c.command = *cmd;

  const auto is_num = [](const json& v) { return v.is_number(); };
  const auto is_int = [](const json& v) { return v.is_number_integer(); };
  const auto is_uint = [](const json& v) { return v.is_number_unsigned(); };
  const auto is_str = [](const json& v) { return v.is_string(); };
  const auto is_bool = [](const json& v) { return v.is_boolean(); };

  read_field(j, "k", c.k, errors, is_int, "an integer");
  read_field(j, "beta", c.beta, errors, is_num, "a number");
  read_field(j, "p_e2", c.p_e2, errors, is_num, "a number");
  read_field(j, "p", c.p, errors, is_num, "a number");
  if (const auto it = j.find("trials"); it != j.end() && it->is_number_integer() && it->get<std::int64_t>() < 1)
    errors.push_back("'trials' must be >= 1");
  else
    read_field(j, "trials", c.trials, errors, is_uint, "a positive integer");
  read_field(j, "seed", c.seed, errors, is_uint, "an unsigned 64-bit integer");
  read_field(j, "output_dir", c.output_dir, errors, is_str, "a string");
  read_field(j, "alphabet_cap", c.alphabet_cap, errors, is_uint, "a positive integer");
  read_field(j, "quantize_bins", c.quantize_bins, errors, is_uint, "a positive integer");
  read_field(j, "approximate_merge", c.approximate_merge, errors, is_bool, "a boolean");
  read_field(j, "rho_ac", c.rho_ac, errors, is_str, "a string");

  if (overrides.seed) c.seed = *overrides.seed;
  if (overrides.output_dir) c.output_dir = *overrides.output_dir;

  if (!(c.beta > 0.0 && c.beta < 0.5))
    errors.push_back("'beta' = " + format_number(c.beta) +
                     " is outside (0, 0.5); the good-set threshold 2^(-n^beta)/n requires beta < 0.5");
  if (c.k < 1 || c.k > kMaxK) errors.push_back("'k' must lie in [1, " + std::to_string(kMaxK) + "]");
  if (c.trials < 1) errors.push_back("'trials' must be >= 1");
  if (c.alphabet_cap < 2) errors.push_back("'alphabet_cap' must be >= 2");
  if (c.quantize_bins < 4) errors.push_back("'quantize_bins' must be >= 4");
  if (c.output_dir.empty()) errors.push_back("'output_dir' must not be empty");
  if (c.rho_ac != "alternating" && c.rho_ac != "literal" && c.rho_ac != "product")
    errors.push_back("'rho_ac' must be alternating, literal or product");

  const auto read_channel = [&](const char* key, std::optional<ChannelSpec>& dst, bool quantum) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
      dst = spec_from_json(*it);
      if (quantum) make_kraus(*dst);
      else make_bdmc(*dst);
    } catch (const Error& e) {
      errors.push_back(std::string("'") + key + "': " + e.what());
      dst.reset();
    }
  };
  const std::size_t errors_before_channels = errors.size();
  read_channel("channel", c.channel, false);
  read_channel("amp_channel", c.amp_channel, false);
  read_channel("phase_channel", c.phase_channel, false);
  read_channel("pauli_channel", c.pauli_channel, true);
  read_channel("main_channel", c.main_channel, true);

  if (cmd) {
    const bool bad_channels = errors.size() > errors_before_channels;
    if (c.command == Command::polarize && !c.channel && !j.contains("channel"))
      errors.push_back("polarize needs 'channel'");
    if ((c.command == Command::capacity || c.command == Command::superactivate || c.command == Command::sweep) &&
        !c.main_channel && !j.contains("main_channel"))
      errors.push_back(command_name(c.command) + " needs 'main_channel'");
    if (needs_amp_phase(c.command) && !bad_channels) {
      try {
        resolve_amp_phase(c);
      } catch (const Error& e) {
        errors.push_back(e.what());
      }
    }
    if ((c.command == Command::relay_sim || c.command == Command::superactivate) && !(c.p_e2 > 0.0 && c.p_e2 < 1.0))
      errors.push_back("'p_e2' must satisfy 0 < p_e2 < 1");
    if (c.command == Command::superactivate && !(c.p > 0.0 && c.p < 1.0))
      errors.push_back("'p' must satisfy 0 < p < 1");
    if (c.command == Command::capacity && !(c.p_e2 >= 0.0 && c.p_e2 <= 1.0))
      errors.push_back("'p_e2' must lie in [0, 1]");
  }

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(j, overrides);
}

std::string software_version() { return QRELAY_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

json RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["version"] = version;
  j["config"] = config;
  j["wall_seconds"] = wall_seconds;
  j["output_dir"] = output_dir;
  j["outputs"] = json::array();
  for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  j["summary"] = json::array();
  for (const auto& [k, v] : summary) j["summary"].push_back({k, v});
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.config = j.value("config", json::object());
    m.wall_seconds = j.value("wall_seconds", 0.0);
    m.output_dir = j.at("output_dir").get<std::string>();
    for (const auto& o : j.value("outputs", json::array()))
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>(),
                           o.at("bytes").get<std::uintmax_t>()});
    for (const auto& kv : j.value("summary", json::array()))
      m.summary.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open manifest " + path.string());
  try {
    return RunManifest::from_json(json::parse(f));
  } catch (const json::parse_error& e) {
    throw Error("cannot parse manifest " + path.string() + ": " + e.what());
  }
}

RunManifest run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  OutputWriter out(dir);
  Summary summary;
  try {
    switch (config.command) {
      case Command::polarize: run_polarize(config, out, summary); break;
      case Command::sets: run_sets(config, out, summary); break;
      case Command::capacity: run_capacity(config, out, summary); break;
      case Command::relay_sim: run_relay_sim(config, out, summary); break;
      case Command::superactivate: run_superactivate(config, out, summary); break;
      case Command::sweep: run_sweep(config, out, summary); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(command_name(config.command) + ": " + e.what());
  }

  RunManifest m;
  m.command = command_name(config.command);
  m.version = software_version();
  m.config = config.echo();
  m.output_dir = dir.string();
  m.outputs = out.files();
  m.summary = std::move(summary);
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream f(dir / "manifest.json", std::ios::trunc);
  if (!f) throw Error("cannot write manifest in " + dir.string());
  f << m.to_json().dump(2) << '\n';
  return m;
}

}  // namespace qrelay
