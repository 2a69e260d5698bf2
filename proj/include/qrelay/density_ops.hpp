#pragma once

// Finite-dimensional quantum states and channels: Kraus application,
// isometric extension, partial traces, entropies and the mutual, private and
// coherent information quantities built from them. All information
// quantities are in bits.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace qrelay {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
inline constexpr double kValidation = 1e-9;
inline constexpr double kCrossCheck = 1e-10;
inline constexpr double kIdentity = 1e-12;
}  // namespace tol

// Hermitian, positive semidefinite, unit-trace matrix. Construction validates
// the invariants and throws InvalidStateError on violation.
class DensityMatrix {
public:
  explicit DensityMatrix(Matrix entries);

  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix basis_state(int dim, int k);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }

  // Eigenvalues in ascending order, with jitter in [-1e-9, 0) clipped to 0.
  std::vector<double> eigenvalues() const;

private:
  Matrix m_;
};

Matrix kron(const Matrix& a, const Matrix& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Completely positive trace-preserving map in Kraus form. Every operator is
// out_dim x in_dim and sum_i K_i^dagger K_i = I holds within 1e-9.
class KrausChannel {
public:
  explicit KrausChannel(std::vector<Matrix> ops);

  int in_dim() const noexcept { return in_dim_; }
  int out_dim() const noexcept { return out_dim_; }
  std::size_t size() const noexcept { return ops_.size(); }
  const std::vector<Matrix>& ops() const noexcept { return ops_; }

  static KrausChannel identity(int dim);
  // rho -> (1-q) rho + q Z rho Z
  static KrausChannel dephasing(double q);
  // rho -> (1-q) rho + q X rho X
  static KrausChannel bit_flip(double q);
  // rho -> (1-q) rho + q I/2
  static KrausChannel depolarizing(double q);
  // rho -> pI rho + pX X rho X + pY Y rho Y + pZ Z rho Z
  static KrausChannel pauli(double p_i, double p_x, double p_y, double p_z);
  // Output space is in_dim + 1; the last basis vector is the erasure flag.
  static KrausChannel erasure(double epsilon, int in_dim = 2);

private:
  std::vector<Matrix> ops_;
  int in_dim_ = 0;
  int out_dim_ = 0;
};

KrausChannel tensor(const KrausChannel& a, const KrausChannel& b);
// Serial composition: `first` is applied, then `second`.
KrausChannel compose(const KrausChannel& first, const KrausChannel& second);
// Same channel with its output embedded in a larger space (zero padding).
KrausChannel pad_output(const KrausChannel& ch, int out_dim);

// U = sum_i K_i (x) |i>_E with joint output ordered B (x) E.
struct Isometry {
  Matrix u;
  int in_dim = 0;
  int out_dim = 0;
  int env_dim = 0;
};

DensityMatrix apply_kraus(const KrausChannel& channel, const DensityMatrix& rho);
Isometry isometric_extension(const KrausChannel& channel);
// Environment state Tr_B(U rho U^dagger), evaluated as E_ij = Tr(K_i rho K_j^dagger).
DensityMatrix complementary_output(const KrausChannel& channel, const DensityMatrix& rho);

// Partial trace keeping the listed subsystems (in their original order).
DensityMatrix trace_out(const DensityMatrix& rho, std::span<const int> subsystem_dims,
                        std::span<const int> keep);
// Reorders subsystems: output subsystem j is input subsystem perm[j].
DensityMatrix permute_subsystems(const DensityMatrix& rho, std::span<const int> subsystem_dims,
                                 std::span<const int> perm);

double entropy_of_spectrum(std::span<const double> eigenvalues);
double von_neumann_entropy(const DensityMatrix& rho);

struct BinaryCqChannel {
  BinaryCqChannel(DensityMatrix s0, DensityMatrix s1);
  DensityMatrix sigma0;
  DensityMatrix sigma1;
};

// 1/2 |0><0| (x) sigma0 + 1/2 |1><1| (x) sigma1 on A (x) B.
DensityMatrix cq_joint_state(const BinaryCqChannel& ch);
double symmetric_cq_capacity(const BinaryCqChannel& ch);
double mutual_information(const DensityMatrix& rho_ab, int dim_a, int dim_b);

struct CapacityReport {
  double c_sym = 0.0;
  double p_sym_single_use = 0.0;
  double i_ab = 0.0;
  double i_ae = 0.0;
  std::optional<double> i_coh;
};

// I(A:B) - I(A:E) over the uniform binary input; may be negative.
CapacityReport private_information(const BinaryCqChannel& bob, const BinaryCqChannel& eve);

// S(B) - S(E) for the channel output and its environment.
double coherent_information(const KrausChannel& channel, const DensityMatrix& input);

// Row-major [re, im] pairs.
nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace qrelay
