#include "qrelay/density_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qrelay/errors.hpp"

namespace qrelay {

namespace {

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgumentError(what);
}

void check_probability(double q, const char* name) {
  require(q >= 0.0 && q <= 1.0, std::string(name) + " must lie in [0, 1]");
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

int product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

// Mixed-radix digits of a flat index, most significant subsystem first.
void unflatten(int index, std::span<const int> dims, std::vector<int>& digits) {
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    digits[s] = index % dims[s];
    index /= dims[s];
  }
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols())
    throw InvalidStateError("density matrix must be square and non-empty");
  if (!m_.allFinite()) throw InvalidStateError("density matrix has non-finite entries");
  const double herm = hermiticity_defect(m_);
  if (herm > tol::kValidation)
    throw InvalidStateError("density matrix is not Hermitian (defect " + std::to_string(herm) + ")");
  m_ = (0.5 * (m_ + m_.adjoint())).eval();
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tol::kValidation)
    throw InvalidStateError("density matrix trace " + std::to_string(tr) + " differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol::kValidation)
    throw InvalidStateError("density matrix has a negative eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw InvalidStateError("zero state vector");
  const Vector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim <= 0) throw DimensionError("dimension must be positive");
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::basis_state(int dim, int k) {
  if (k < 0 || k >= dim) throw DimensionError("basis index out of range");
  Matrix m = Matrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityMatrix(std::move(m));
}

std::vector<double> DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (double& l : out) {
    if (l < -tol::kValidation) throw InvalidStateError("eigenvalue below -1e-9");
    if (l < 0.0) l = 0.0;
  }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

KrausChannel::KrausChannel(std::vector<Matrix> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw InvalidArgumentError("Kraus channel needs at least one operator");
  out_dim_ = static_cast<int>(ops_.front().rows());
  in_dim_ = static_cast<int>(ops_.front().cols());
  if (in_dim_ == 0 || out_dim_ == 0) throw DimensionError("Kraus operators must be non-empty");
  Matrix sum = Matrix::Zero(in_dim_, in_dim_);
  for (const auto& k : ops_) {
    if (k.rows() != out_dim_ || k.cols() != in_dim_)
      throw DimensionError("Kraus operators have inconsistent shapes");
    sum += k.adjoint() * k;
  }
  const double defect = (sum - Matrix::Identity(in_dim_, in_dim_)).cwiseAbs().maxCoeff();
  if (defect > tol::kValidation)
    throw InvalidArgumentError("Kraus set is not complete (defect " + std::to_string(defect) + ")");
}

KrausChannel KrausChannel::identity(int dim) {
  if (dim <= 0) throw DimensionError("dimension must be positive");
  return KrausChannel({Matrix::Identity(dim, dim)});
}

KrausChannel KrausChannel::dephasing(double q) {
  check_probability(q, "dephasing probability");
  return KrausChannel({std::sqrt(1.0 - q) * Matrix::Identity(2, 2), std::sqrt(q) * pauli_z()});
}

KrausChannel KrausChannel::bit_flip(double q) {
  check_probability(q, "bit-flip probability");
  return KrausChannel({std::sqrt(1.0 - q) * Matrix::Identity(2, 2), std::sqrt(q) * pauli_x()});
}

KrausChannel KrausChannel::depolarizing(double q) {
  check_probability(q, "depolarizing probability");
  return pauli(1.0 - 0.75 * q, 0.25 * q, 0.25 * q, 0.25 * q);
}

KrausChannel KrausChannel::pauli(double p_i, double p_x, double p_y, double p_z) {
  for (double p : {p_i, p_x, p_y, p_z}) check_probability(p, "Pauli weight");
  require(std::abs(p_i + p_x + p_y + p_z - 1.0) <= tol::kIdentity, "Pauli weights must sum to 1");
  return KrausChannel({std::sqrt(p_i) * Matrix::Identity(2, 2), std::sqrt(p_x) * pauli_x(),
                       std::sqrt(p_y) * pauli_y(), std::sqrt(p_z) * pauli_z()});
}

KrausChannel KrausChannel::erasure(double epsilon, int in_dim) {
  check_probability(epsilon, "erasure probability");
  if (in_dim <= 0) throw DimensionError("dimension must be positive");
  std::vector<Matrix> ops;
  Matrix embed = Matrix::Zero(in_dim + 1, in_dim);
  embed.topRows(in_dim) = Matrix::Identity(in_dim, in_dim);
  ops.push_back(std::sqrt(1.0 - epsilon) * embed);
  for (int k = 0; k < in_dim; ++k) {
    Matrix flag = Matrix::Zero(in_dim + 1, in_dim);
    flag(in_dim, k) = std::sqrt(epsilon);
    ops.push_back(std::move(flag));
  }
  return KrausChannel(std::move(ops));
}

KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  std::vector<Matrix> ops;
  ops.reserve(a.size() * b.size());
  for (const auto& ka : a.ops())
    for (const auto& kb : b.ops()) ops.push_back(kron(ka, kb));
  return KrausChannel(std::move(ops));
}

KrausChannel compose(const KrausChannel& first, const KrausChannel& second) {
  if (first.out_dim() != second.in_dim())
    throw DimensionError("cannot compose: output dimension " + std::to_string(first.out_dim()) +
                         " != input dimension " + std::to_string(second.in_dim()));
  std::vector<Matrix> ops;
  ops.reserve(first.size() * second.size());
  for (const auto& k2 : second.ops())
    for (const auto& k1 : first.ops()) ops.push_back(k2 * k1);
  return KrausChannel(std::move(ops));
}

KrausChannel pad_output(const KrausChannel& ch, int out_dim) {
  if (out_dim < ch.out_dim()) throw DimensionError("padding cannot shrink the output");
  std::vector<Matrix> ops;
  for (const auto& k : ch.ops()) {
    Matrix p = Matrix::Zero(out_dim, ch.in_dim());
    p.topRows(ch.out_dim()) = k;
    ops.push_back(std::move(p));
  }
  return KrausChannel(std::move(ops));
}

DensityMatrix apply_kraus(const KrausChannel& channel, const DensityMatrix& rho) {
  if (rho.dim() != channel.in_dim())
    throw DimensionError("state dimension " + std::to_string(rho.dim()) +
                         " does not match channel input " + std::to_string(channel.in_dim()));
  Matrix out = Matrix::Zero(channel.out_dim(), channel.out_dim());
  for (const auto& k : channel.ops()) out.noalias() += k * rho.matrix() * k.adjoint();
  return DensityMatrix(std::move(out));
}

Isometry isometric_extension(const KrausChannel& channel) {
  const int env = static_cast<int>(channel.size());
  Isometry iso;
  iso.in_dim = channel.in_dim();
  iso.out_dim = channel.out_dim();
  iso.env_dim = env;
  iso.u = Matrix::Zero(static_cast<Eigen::Index>(channel.out_dim()) * env, channel.in_dim());
  for (int i = 0; i < env; ++i) {
    const Matrix& k = channel.ops()[i];
    for (int b = 0; b < channel.out_dim(); ++b) iso.u.row(b * env + i) = k.row(b);
  }
  const double defect =
      (iso.u.adjoint() * iso.u - Matrix::Identity(iso.in_dim, iso.in_dim)).cwiseAbs().maxCoeff();
  if (defect > tol::kValidation) throw InvalidArgumentError("Kraus set is not complete");
  return iso;
}

DensityMatrix complementary_output(const KrausChannel& channel, const DensityMatrix& rho) {
  if (rho.dim() != channel.in_dim()) throw DimensionError("state dimension does not match channel input");
  const auto env = static_cast<Eigen::Index>(channel.size());
  std::vector<Matrix> k_rho;
  k_rho.reserve(channel.size());
  for (const auto& k : channel.ops()) k_rho.push_back(k * rho.matrix());
  Matrix e(env, env);
  for (Eigen::Index i = 0; i < env; ++i)
    for (Eigen::Index j = i; j < env; ++j) {
      // Tr(K_i rho K_j^dagger) = sum_ab (K_i rho)_ab conj((K_j)_ab)
      const Complex v = (k_rho[i].array() * channel.ops()[j].array().conjugate()).sum();
      e(i, j) = v;
      e(j, i) = std::conj(v);
    }
  return DensityMatrix(std::move(e));
}

DensityMatrix trace_out(const DensityMatrix& rho, std::span<const int> subsystem_dims,
                        std::span<const int> keep) {
  if (subsystem_dims.empty() || product(subsystem_dims) != rho.dim())
    throw DimensionError("subsystem dimensions do not factor the state dimension");
  const int parts = static_cast<int>(subsystem_dims.size());
  std::vector<bool> kept(parts, false);
  for (int s : keep) {
    if (s < 0 || s >= parts || kept[s]) throw DimensionError("invalid subsystem index in keep set");
    kept[s] = true;
  }
  int keep_dim = 1;
  int drop_dim = 1;
  for (int s = 0; s < parts; ++s) (kept[s] ? keep_dim : drop_dim) *= subsystem_dims[s];

  // Flat index -> (kept index, dropped index), each in mixed radix preserving order.
  std::vector<int> kept_idx(rho.dim());
  std::vector<int> drop_idx(rho.dim());
  std::vector<int> digits(parts);
  for (int f = 0; f < rho.dim(); ++f) {
    unflatten(f, subsystem_dims, digits);
    int ki = 0;
    int di = 0;
    for (int s = 0; s < parts; ++s) {
      if (kept[s])
        ki = ki * subsystem_dims[s] + digits[s];
      else
        di = di * subsystem_dims[s] + digits[s];
    }
    kept_idx[f] = ki;
    drop_idx[f] = di;
  }
  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  const Matrix& m = rho.matrix();
  for (int r = 0; r < rho.dim(); ++r)
    for (int c = 0; c < rho.dim(); ++c)
      if (drop_idx[r] == drop_idx[c]) out(kept_idx[r], kept_idx[c]) += m(r, c);
  return DensityMatrix(std::move(out));
}

DensityMatrix permute_subsystems(const DensityMatrix& rho, std::span<const int> subsystem_dims,
                                 std::span<const int> perm) {
  const int parts = static_cast<int>(subsystem_dims.size());
  if (product(subsystem_dims) != rho.dim() || static_cast<int>(perm.size()) != parts)
    throw DimensionError("permutation does not match the subsystem structure");
  std::vector<int> seen(parts, 0);
  for (int p : perm) {
    if (p < 0 || p >= parts || seen[p]++) throw DimensionError("not a permutation");
  }
  std::vector<int> new_dims(parts);
  for (int j = 0; j < parts; ++j) new_dims[j] = subsystem_dims[perm[j]];

  std::vector<int> target(rho.dim());
  std::vector<int> digits(parts);
  for (int f = 0; f < rho.dim(); ++f) {
    unflatten(f, subsystem_dims, digits);
    int t = 0;
    for (int j = 0; j < parts; ++j) t = t * new_dims[j] + digits[perm[j]];
    target[f] = t;
  }
  Matrix out(rho.dim(), rho.dim());
  for (int r = 0; r < rho.dim(); ++r)
    for (int c = 0; c < rho.dim(); ++c) out(target[r], target[c]) = rho.matrix()(r, c);
  return DensityMatrix(std::move(out));
}

double entropy_of_spectrum(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double l : eigenvalues)
    if (l > 0.0) s -= l * std::log2(l);
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const auto spectrum = rho.eigenvalues();
  return entropy_of_spectrum(spectrum);
}

BinaryCqChannel::BinaryCqChannel(DensityMatrix s0, DensityMatrix s1)
    : sigma0(std::move(s0)), sigma1(std::move(s1)) {
  if (sigma0.dim() != sigma1.dim()) throw DimensionError("cq channel output states differ in dimension");
}

DensityMatrix cq_joint_state(const BinaryCqChannel& ch) {
  const int d = ch.sigma0.dim();
  Matrix joint = Matrix::Zero(2 * d, 2 * d);
  joint.topLeftCorner(d, d) = 0.5 * ch.sigma0.matrix();
  joint.bottomRightCorner(d, d) = 0.5 * ch.sigma1.matrix();
  return DensityMatrix(std::move(joint));
}

double symmetric_cq_capacity(const BinaryCqChannel& ch) {
  const DensityMatrix avg(0.5 * (ch.sigma0.matrix() + ch.sigma1.matrix()));
  return von_neumann_entropy(avg) - 0.5 * von_neumann_entropy(ch.sigma0) -
         0.5 * von_neumann_entropy(ch.sigma1);
}

double mutual_information(const DensityMatrix& rho_ab, int dim_a, int dim_b) {
  if (dim_a <= 0 || dim_b <= 0 || dim_a * dim_b != rho_ab.dim())
    throw DimensionError("bipartite dimensions do not factor the state");
  const int dims[] = {dim_a, dim_b};
  const int keep_a[] = {0};
  const int keep_b[] = {1};
  return von_neumann_entropy(trace_out(rho_ab, dims, keep_a)) +
         von_neumann_entropy(trace_out(rho_ab, dims, keep_b)) - von_neumann_entropy(rho_ab);
}

CapacityReport private_information(const BinaryCqChannel& bob, const BinaryCqChannel& eve) {
  CapacityReport r;
  r.i_ab = mutual_information(cq_joint_state(bob), 2, bob.sigma0.dim());
  r.i_ae = mutual_information(cq_joint_state(eve), 2, eve.sigma0.dim());
  r.c_sym = r.i_ab;
  r.p_sym_single_use = r.i_ab - r.i_ae;
  return r;
}

double coherent_information(const KrausChannel& channel, const DensityMatrix& input) {
  return von_neumann_entropy(apply_kraus(channel, input)) -
         von_neumann_entropy(complementary_output(channel, input));
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw InvalidArgumentError("matrix JSON must be a 2-D array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) throw InvalidArgumentError("ragged matrix JSON");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& e = j[r][c];
      if (e.is_number())
        m(r, c) = e.get<double>();
      else
        m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

}  // namespace qrelay
