#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "einstab/errors.hpp"

namespace einstab {

inline constexpr double kOrthonormalTol = 1e-10;

/// Dimension of sym(R^d) = d(d+1)/2.
inline int sym_dim(int d) { return d * (d + 1) / 2; }

// Coordinates of a symmetric matrix in the orthonormal basis
// {E_ii} u {(E_ij + E_ji)/sqrt(2), i<j}, so that tr(AB) = dot(vec A, vec B).
inline Eigen::VectorXd sym_to_vec(const Eigen::MatrixXd& a) {
  const int d = static_cast<int>(a.rows());
  Eigen::VectorXd v(sym_dim(d));
  int idx = 0;
  const double s = std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    v[idx++] = a(i, i);
    for (int j = i + 1; j < d; ++j) v[idx++] = s * 0.5 * (a(i, j) + a(j, i));
  }
  return v;
}

inline Eigen::MatrixXd vec_to_sym(const Eigen::VectorXd& v, int d) {
  Eigen::MatrixXd a(d, d);
  int idx = 0;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    a(i, i) = v[idx++];
    for (int j = i + 1; j < d; ++j) {
      a(i, j) = a(j, i) = s * v[idx++];
    }
  }
  return a;
}

inline double symmetry_residual(const Eigen::MatrixXd& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

/// Orthonormal basis of the column span of `v`, dropping directions with
/// singular value below `rel_tol` times the largest or below `abs_tol`
/// (the absolute floor keeps numerically-zero inputs rank 0). Deterministic.
inline Eigen::MatrixXd column_span(const Eigen::MatrixXd& v, double rel_tol = 1e-10,
                                   double abs_tol = 1e-12) {
  if (v.cols() == 0) return Eigen::MatrixXd(v.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= abs_tol) return Eigen::MatrixXd(v.rows(), 0);
  const double cut = std::max(rel_tol * sv[0], abs_tol);
  int rank = 0;
  while (rank < sv.size() && sv[rank] > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis of the orthogonal complement of span(v) inside span(basis),
/// where both v and basis hold coordinate columns in a common ambient space and
/// basis has orthonormal columns.
inline Eigen::MatrixXd complement_within(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& v) {
  if (basis.cols() == 0) return basis;
  // Coordinates of v's projection expressed in the basis.
  Eigen::MatrixXd c = basis.transpose() * v;  // m x q
  const int m = static_cast<int>(basis.cols());
  Eigen::MatrixXd span_c = column_span(c);
  // Complement of span_c in R^m via full SVD.
  if (span_c.cols() == 0) return basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(span_c, Eigen::ComputeFullU);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd tail = u.rightCols(m - span_c.cols());
  return basis * tail;
}

struct EigenCluster {
  double value = 0.0;
  int multiplicity = 0;
};

/// Groups a sorted-or-not eigenvalue list into clusters; a new cluster starts
/// whenever the gap to the previous value exceeds `atol`.
inline std::vector<EigenCluster> cluster_eigenvalues(Eigen::VectorXd vals, double atol) {
  std::vector<EigenCluster> out;
  if (vals.size() == 0) return out;
  std::sort(vals.data(), vals.data() + vals.size());
  double sum = vals[0];
  int count = 1;
  double prev = vals[0];
  for (int i = 1; i < vals.size(); ++i) {
    if (vals[i] - prev > atol) {
      out.push_back({sum / count, count});
      sum = 0.0;
      count = 0;
    }
    sum += vals[i];
    ++count;
    prev = vals[i];
  }
  out.push_back({sum / count, count});
  return out;
}

/// Deterministic RNG used everywhere a generic element is drawn.
/// The default seed can be overridden with the EINSTAB_SEED environment variable.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("EINSTAB_SEED")) {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<std::uint64_t>(parsed);
  }
  return 0x3141592653589793ull;
}

inline Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// exp(t A) for symmetric A, via eigendecomposition.
inline Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& a, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvectors() * (t * es.eigenvalues().array()).exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

inline Eigen::MatrixXd random_symmetric(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = dist(rng);
  return symmetrize(a);
}

}  // namespace einstab
