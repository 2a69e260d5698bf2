#pragma once

// Reference computations for the tests. They deliberately avoid the library
// code paths: explicit index loops for partial traces, the general complex
// eigensolver for entropies, direct sums for mutual information.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXcd;

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline double entropy(const Matrix& rho) {
  Eigen::ComplexEigenSolver<Matrix> es(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i).real();
    if (l > 1e-15) s -= l * std::log2(l);
  }
  return s;
}

// rho on A (x) B, returns Tr_B rho
inline Matrix trace_b(const Matrix& rho, int da, int db) {
  Matrix out = Matrix::Zero(da, da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int k = 0; k < db; ++k) out(i, j) += rho(i * db + k, j * db + k);
  return out;
}

inline Matrix trace_a(const Matrix& rho, int da, int db) {
  Matrix out = Matrix::Zero(db, db);
  for (int i = 0; i < db; ++i)
    for (int j = 0; j < db; ++j)
      for (int k = 0; k < da; ++k) out(i, j) += rho(k * db + i, k * db + j);
  return out;
}

inline Matrix apply(const std::vector<Matrix>& kraus, const Matrix& rho) {
  Matrix out = Matrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

// Environment state built from the Stinespring vector sum_i K_i |psi> (x) |i>.
inline Matrix environment(const std::vector<Matrix>& kraus, const Matrix& rho) {
  const auto r = static_cast<Eigen::Index>(kraus.size());
  Matrix e(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) e(i, j) = (kraus[i] * rho * kraus[j].adjoint()).trace();
  return e;
}

inline double bdmc_mutual_info(const std::vector<double>& w0, const std::vector<double>& w1) {
  double i = 0.0;
  for (std::size_t y = 0; y < w0.size(); ++y) {
    const double q = 0.5 * (w0[y] + w1[y]);
    if (w0[y] > 0) i += 0.5 * w0[y] * std::log2(w0[y] / q);
    if (w1[y] > 0) i += 0.5 * w1[y] * std::log2(w1[y] / q);
  }
  return i;
}

inline double bdmc_bhattacharyya(const std::vector<double>& w0, const std::vector<double>& w1) {
  double z = 0.0;
  for (std::size_t y = 0; y < w0.size(); ++y) z += std::sqrt(w0[y] * w1[y]);
  return z;
}

// BEC Bhattacharyya vector grown level by level: slot 2i takes the bad
// child of slot i, slot 2i+1 the good child.
inline std::vector<double> bec_z(double eps, int k) {
  std::vector<double> z{eps};
  for (int level = 0; level < k; ++level) {
    std::vector<double> next(2 * z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      next[2 * i] = 2 * z[i] - z[i] * z[i];
      next[2 * i + 1] = z[i] * z[i];
    }
    z = std::move(next);
  }
  return z;
}

inline std::vector<double> random_row(std::mt19937_64& g, std::size_t m) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> r(m);
  double s = 0.0;
  for (auto& v : r) s += (v = ex(g));
  for (auto& v : r) v /= s;
  return r;
}

inline Matrix random_gaussian(std::mt19937_64& g, int rows, int cols) {
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = {nd(g), nd(g)};
  return m;
}

inline Matrix random_density(std::mt19937_64& g, int d) {
  const Matrix a = random_gaussian(g, d, d);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Random CPTP map: stacked Gaussian operators made isometric via V (V^dag V)^(-1/2).
inline std::vector<Matrix> random_kraus(std::mt19937_64& g, int din, int dout, int count) {
  const Matrix v = random_gaussian(g, dout * count, din);
  Eigen::SelfAdjointEigenSolver<Matrix> es(v.adjoint() * v);
  const Matrix inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  const Matrix iso = v * inv_sqrt;
  std::vector<Matrix> ops;
  for (int i = 0; i < count; ++i) ops.push_back(iso.middleRows(i * dout, dout));
  return ops;
}

// I(A:B) for 1/2 |0><0| (x) s0 + 1/2 |1><1| (x) s1 from the Holevo form.
inline double holevo(const Matrix& s0, const Matrix& s1) {
  return entropy(0.5 * (s0 + s1)) - 0.5 * entropy(s0) - 0.5 * entropy(s1);
}

}  // namespace oracle
