#include "qrelay/superactivation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrelay/errors.hpp"

namespace qrelay {

namespace {

constexpr double kErasureHalf = 0.5;

Matrix flag_ket(int which) {
  Matrix k = Matrix::Zero(2, 1);
  k(which, 0) = 1.0;
  return k;
}

// checked on the factors so the tensor product is never materialized past the cap
void check_joint_dims(const KrausChannel& a, const KrausChannel& b) {
  const auto out = static_cast<long long>(a.out_dim()) * b.out_dim();
  const auto ops = static_cast<long long>(a.size()) * static_cast<long long>(b.size());
  if (out > kMaxJointDim || ops > kMaxJointDim)
    throw DimensionError("joint system exceeds the dimension cap of " + std::to_string(kMaxJointDim));
}

}  // namespace

SwitchChannel build_switch_channel(double p, const KrausChannel& main) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgumentError("switch probability must satisfy 0 <= p <= 1");
  const KrausChannel erasure = KrausChannel::erasure(kErasureHalf, main.in_dim());
  const int data = std::max(main.out_dim(), erasure.out_dim());
  SwitchChannel sc{p, pad_output(main, data), pad_output(erasure, data), KrausChannel::identity(1)};

  std::vector<Matrix> ops;
  ops.reserve(main.size() + erasure.size());
  for (const auto& k : sc.branch_main.ops()) ops.push_back(std::sqrt(p) * kron(k, flag_ket(0)));
  for (const auto& k : sc.branch_erasure.ops()) ops.push_back(std::sqrt(1.0 - p) * kron(k, flag_ket(1)));
  sc.channel = KrausChannel(std::move(ops));
  return sc;
}

KrausChannel lift_to_flagged_register(const KrausChannel& qubit_main) {
  const Matrix id = Matrix::Identity(2, 2);
  std::vector<Matrix> ops;
  for (const auto& k : qubit_main.ops()) ops.push_back(kron(id, k));
  return KrausChannel(std::move(ops));
}

JointInputState make_rho_ac_entangled(FlagVariant variant) {
  // Flag pair A1 C1 (classically correlated, symmetric under exchange).
  Matrix flags = Matrix::Zero(4, 4);
  if (variant == FlagVariant::literal) {
    flags(0, 0) = 1.0;  // (|00><00| + |00><00|) / 2
  } else {
    flags(0, 0) = 0.5;
    flags(3, 3) = 0.5;
  }
  Vector psi_plus = Vector::Zero(4);
  psi_plus(0) = 1.0 / std::sqrt(2.0);
  psi_plus(3) = 1.0 / std::sqrt(2.0);
  const DensityMatrix a1c1a2c2(kron(flags, psi_plus * psi_plus.adjoint()));
  // (A1, C1, A2, C2) -> (A1, A2, C1, C2)
  const int dims[] = {2, 2, 2, 2};
  const int perm[] = {0, 2, 1, 3};
  return {permute_subsystems(a1c1a2c2, dims, perm), 4, 4,
          variant == FlagVariant::literal ? "entangled_flagged/literal" : "entangled_flagged/alternating"};
}

JointInputState make_rho_ac_product(const DensityMatrix& sigma) {
  return {tensor(sigma, sigma), sigma.dim(), sigma.dim(), "phase_set_state"};
}

DensityMatrix swap_parties(const JointInputState& input) {
  const int dims[] = {input.dim_a, input.dim_c};
  const int perm[] = {1, 0};
  return permute_subsystems(input.rho_ac, dims, perm);
}

SuperactivationReport joint_coherent_info(const SwitchChannel& sc, const JointInputState& input) {
  if (input.dim_a != sc.in_dim() || input.dim_c != sc.in_dim())
    throw DimensionError("joint input does not match the M (x) M input dimension");
  check_joint_dims(sc.channel, sc.channel);
  const KrausChannel joint = tensor(sc.channel, sc.channel);

  SuperactivationReport r;
  r.p = sc.p;
  r.i_coh_joint = coherent_information(joint, input.rho_ac);

  const double p = sc.p;
  const KrausChannel* branch[2] = {&sc.branch_main, &sc.branch_erasure};
  const double w[2] = {p, 1.0 - p};
  for (int first = 0; first < 2; ++first)
    for (int second = 0; second < 2; ++second) {
      check_joint_dims(*branch[first], *branch[second]);
      const KrausChannel pair = tensor(*branch[first], *branch[second]);
      BranchTerm& t = r.branch_terms[static_cast<std::size_t>(first * 2 + second)];
      t.weight = w[first] * w[second];
      t.i_coh = coherent_information(pair, input.rho_ac);
      r.decomposition_sum += t.weight * t.i_coh;
    }
  if (std::abs(r.decomposition_sum - r.i_coh_joint) > tol::kValidation)
    throw InvalidStateError("flag decomposition of I_coh(M (x) M) does not match the direct evaluation");

  const int dims[] = {input.dim_a, input.dim_c};
  const int keep_a[] = {0};
  r.i_coh_main = coherent_information(sc.branch_main, trace_out(input.rho_ac, dims, keep_a));
  r.bound_2p1p = 2.0 * p * (1.0 - p) * r.i_coh_main;
  r.p_sym_star_lower = 0.5 * r.i_coh_main;
  return r;
}

BoundResult superactivated_bound(double p, double i_coh_main) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgumentError("switch probability must satisfy 0 < p < 1");
  BoundResult out;
  out.bound = 2.0 * p * (1.0 - p) * i_coh_main;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 99; ++i) {
    const double q = i / 100.0;
    const double v = 2.0 * q * (1.0 - q) * i_coh_main;
    if (v > best) {
      best = v;
      out.p_star = q;
    }
  }
  out.bound_at_p_star = best;
  return out;
}

double assisted_single_use_capacity(const BinaryCqChannel& bob_phase, const BinaryCqChannel& eve) {
  const double i_phase = symmetric_cq_capacity(bob_phase);
  const double i_ae = mutual_information(cq_joint_state(eve), 2, eve.sigma0.dim());
  return 0.5 * (i_phase - i_ae);
}

AssistedComparison compare_assisted(double p_e2, const IndexSetPartition& part) {
  if (!(p_e2 > 0.0 && p_e2 < 1.0)) throw InvalidArgumentError("relay success probability must satisfy 0 < p_e2 < 1");
  if (part.n == 0) throw InvalidArgumentError("partition over an empty block");
  AssistedComparison c;
  c.p_e2 = p_e2;
  c.s_in = part.s_in.size();
  const auto s = static_cast<double>(c.s_in);
  c.b_star = 0.5 * s;
  c.b = p_e2 * s;
  c.advantage = c.b_star > c.b;
  c.rate_star = c.b_star / static_cast<double>(part.n);
  c.rate = c.b / static_cast<double>(part.n);
  return c;
}

KrausChannel unreliable_relay_channel(const KrausChannel& main, double p_e2) {
  if (!(p_e2 >= 0.0 && p_e2 <= 1.0)) throw InvalidArgumentError("relay success probability must lie in [0, 1]");
  const int out = main.out_dim() + 1;
  std::vector<Matrix> ops;
  for (const auto& k : main.ops()) {
    Matrix m = Matrix::Zero(out, main.in_dim());
    m.topRows(main.out_dim()) = std::sqrt(p_e2) * k;
    ops.push_back(std::move(m));
  }
  for (int j = 0; j < main.in_dim(); ++j) {
    Matrix m = Matrix::Zero(out, main.in_dim());
    m(out - 1, j) = std::sqrt(1.0 - p_e2);
    ops.push_back(std::move(m));
  }
  return KrausChannel(std::move(ops));
}

BranchFit fit_branch_weights(const std::vector<SuperactivationReport>& reports) {
  if (reports.size() < 3) throw InvalidArgumentError("need at least three switch probabilities to fit");
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(reports.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(reports.size()));
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double p = reports[i].p;
    const auto r = static_cast<Eigen::Index>(i);
    basis(r, 0) = p * p;
    basis(r, 1) = 2.0 * p * (1.0 - p);
    basis(r, 2) = (1.0 - p) * (1.0 - p);
    y(r) = reports[i].i_coh_joint;
  }
  const Eigen::Vector3d coef = basis.colPivHouseholderQr().solve(y);
  BranchFit fit{coef(0), coef(1), coef(2), (basis * coef - y).cwiseAbs().maxCoeff()};
  return fit;
}

}  // namespace qrelay
