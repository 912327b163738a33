#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "einstab/errors.hpp"
#include "einstab/isotropy.hpp"
#include "einstab/reductive.hpp"

namespace einstab {

/// Dense rank-3 array on p, entry (i, j, k) = <lambda(X_i, X_j), X_k>.
struct Tensor3 {
  int d = 0;
  std::vector<double> a;

  static Tensor3 zero(int dim) {
    Tensor3 t;
    t.d = dim;
    t.a.assign(static_cast<std::size_t>(dim) * dim * dim, 0.0);
    return t;
  }

  double& at(int i, int j, int k) {
    return a[(static_cast<std::size_t>(i) * d + j) * d + k];
  }
  double at(int i, int j, int k) const {
    return a[(static_cast<std::size_t>(i) * d + j) * d + k];
  }

  double norm2() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
  }

  double dot(const Tensor3& o) const {
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * o.a[t];
    return s;
  }
};

inline Tensor3 dense_mu(const StructureTensor& mu) {
  Tensor3 t = Tensor3::zero(mu.dim());
  for (const auto& e : mu.nonzeros()) t.at(e.i, e.j, e.k) = e.v;
  return t;
}

/// theta(A)lambda = A lambda(.,.) - lambda(A., .) - lambda(., A.), for any A in gl(p).
inline Tensor3 theta_action(const Eigen::MatrixXd& a, const Tensor3& lam) {
  const int d = lam.d;
  Tensor3 out = Tensor3::zero(d);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> l2(lam.a.data(), d * d, d);  // rows (i,j), cols k
  Eigen::Map<RowMat> o2(out.a.data(), d * d, d);
  o2 = l2 * a.transpose();                      // A lambda(.,.)
  Eigen::Map<const RowMat> l1(lam.a.data(), d, d * d);  // rows i, cols (j,k)
  Eigen::Map<RowMat> o1(out.a.data(), d, d * d);
  o1.noalias() -= a.transpose() * l1;           // -lambda(A., .)
  for (int i = 0; i < d; ++i) {                 // -lambda(., A.)
    Eigen::Map<const RowMat> li(lam.a.data() + static_cast<std::size_t>(i) * d * d, d, d);
    Eigen::Map<RowMat> oi(out.a.data() + static_cast<std::size_t>(i) * d * d, d, d);
    oi.noalias() -= a.transpose() * li;
  }
  return out;
}

/// Same action evaluated against the sparse bracket directly.
inline Tensor3 theta_action_sparse(const Eigen::MatrixXd& a, const StructureTensor& mu) {
  const int d = mu.dim();
  Tensor3 out = Tensor3::zero(d);
  for (const auto& e : mu.nonzeros()) {
    for (int k = 0; k < d; ++k) out.at(e.i, e.j, k) += a(k, e.k) * e.v;
    for (int i = 0; i < d; ++i) out.at(i, e.j, e.k) -= a(e.i, i) * e.v;
    for (int j = 0; j < d; ++j) out.at(e.i, j, e.k) -= a(e.j, j) * e.v;
  }
  return out;
}

namespace detail {

inline bool is_diagonal(const Eigen::MatrixXd& a, double tol = 1e-14) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j && std::abs(a(i, j)) > tol * scale) return false;
  return true;
}

// <theta(A)mu, theta(B)mu> for diagonal A, B: the action is entrywise on the sparsity.
inline double theta_diag_inner(const StructureTensor& mu, const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b) {
  double s = 0.0;
  for (const auto& e : mu.nonzeros()) {
    const double fa = a[e.k] - a[e.i] - a[e.j];
    const double fb = b[e.k] - b[e.i] - b[e.j];
    s += fa * fb * e.v * e.v;
  }
  return s;
}

}  // namespace detail

/// Moment map M_{mu_p} = -1/2 sum (ad_p X_i)^t ad_p X_i + 1/4 sum ad_p X_i (ad_p X_i)^t,
/// accumulated over the sparsity index.
inline Eigen::MatrixXd moment_map(const ReductiveSpace& r) {
  const int d = r.p_dim;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  const auto& nz = r.mu_p.nonzeros();
  // (ad_i^t ad_i)(a,b) = sum_c mu[i][a][c] mu[i][b][c]; bucket per (i, c)
  std::vector<std::vector<std::pair<int, double>>> by_k(d);
  for (int i = 0; i < d; ++i) {
    for (auto& v : by_k) v.clear();
    auto [lo, hi] = r.mu_p.first_range(i);
    for (std::size_t t = lo; t < hi; ++t) by_k[nz[t].k].push_back({nz[t].j, nz[t].v});
    for (const auto& bucket : by_k)
      for (const auto& [a, va] : bucket)
        for (const auto& [b, vb] : bucket) m(a, b) -= 0.5 * va * vb;
  }
  // (ad_i ad_i^t)(a,b) = sum_c mu[i][c][a] mu[i][c][b]; (i, c) runs are contiguous
  std::size_t t = 0;
  const std::size_t n = nz.size();
  while (t < n) {
    std::size_t u = t;
    while (u < n && nz[u].i == nz[t].i && nz[u].j == nz[t].j) ++u;
    for (std::size_t x = t; x < u; ++x)
      for (std::size_t y = t; y < u; ++y) m(nz[x].k, nz[y].k) += 0.25 * nz[x].v * nz[y].v;
    t = u;
  }
  return m;
}

/// Dense variant for a moved bracket.
inline Eigen::MatrixXd moment_map_of(const Tensor3& lam) {
  const int d = lam.d;
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  // X[(i,c), a] = lam[i][a][c]
  Eigen::MatrixXd x(d * d, d);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) x(i * d + c, a) = lam.at(i, a, c);
  Eigen::Map<const RowMat> y(lam.a.data(), d * d, d);  // Y[(i,c), a] = lam[i][c][a]
  Eigen::MatrixXd m = -0.5 * (x.transpose() * x);
  m.noalias() += 0.25 * (y.transpose() * y);
  return m;
}

/// Moved bracket h . mu = h mu(h^{-1}., h^{-1}.).
inline Tensor3 moved_bracket(const StructureTensor& mu, const Eigen::MatrixXd& h) {
  const int d = mu.dim();
  if (detail::is_diagonal(h)) {
    Tensor3 out = Tensor3::zero(d);
    for (const auto& e : mu.nonzeros())
      out.at(e.i, e.j, e.k) = e.v * h(e.k, e.k) / (h(e.i, e.i) * h(e.j, e.j));
    return out;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(h);
  if (std::abs(lu.determinant()) < 1e-300) throw SingularH("h is singular");
  Eigen::MatrixXd hinv = lu.solve(Eigen::MatrixXd::Identity(d, d));
  Tensor3 out = Tensor3::zero(d);
  // C1[a][b][k] = sum_m h(k,m) mu[a][b][m], sparse in (a, b)
  for (const auto& e : mu.nonzeros())
    for (int k = 0; k < d; ++k) out.at(e.i, e.j, k) += h(k, e.k) * e.v;
  // contract both input slots with h^{-1}
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Tensor3 tmp = Tensor3::zero(d);
  Eigen::Map<const RowMat> in1(out.a.data(), d, d * d);
  Eigen::Map<RowMat> out1(tmp.a.data(), d, d * d);
  out1 = hinv.transpose() * in1;  // slot 1
  Tensor3 res = Tensor3::zero(d);
  for (int i = 0; i < d; ++i) {  // slot 2
    Eigen::Map<const RowMat> li(tmp.a.data() + static_cast<std::size_t>(i) * d * d, d, d);
    Eigen::Map<RowMat> ri(res.a.data() + static_cast<std::size_t>(i) * d * d, d, d);
    ri = hinv.transpose() * li;
  }
  return res;
}

/// Killing operator of the full algebra restricted to p (working basis).
inline Eigen::MatrixXd killing_operator_p(const ReductiveSpace& r) {
  return detail::killing_on_p(r);
}

/// Moment map, Killing operator, Ricci operator, scalar curvature and the
/// Einstein residual of the background metric ip = identity.
struct CurvaturePack {
  Eigen::MatrixXd moment;
  Eigen::MatrixXd killing_op;
  Eigen::MatrixXd ricci;
  double scalar = 0.0;
  double rho = 0.0;
  double einstein_residual = 0.0;
};

inline CurvaturePack curvature_pack(const ReductiveSpace& r) {
  if (r.algebra.unimodularity_residual() > 1e-10)
    throw NotUnimodular("tr ad X != 0: G is not unimodular");
  CurvaturePack pack;
  pack.moment = moment_map(r);
  pack.killing_op = killing_operator_p(r);
  pack.ricci = pack.moment - 0.5 * pack.killing_op;
  double mu_norm2 = 0.0;
  for (const auto& e : r.mu_p.nonzeros()) mu_norm2 += e.v * e.v;
  pack.scalar = -0.25 * mu_norm2 - 0.5 * pack.killing_op.trace();
  const double tr_ricci = pack.ricci.trace();
  if (std::abs(pack.scalar - tr_ricci) > 1e-9 * std::max(1.0, std::abs(pack.scalar)))
    throw Error("scalar curvature routes disagree");
  pack.rho = pack.scalar / r.p_dim;
  Eigen::MatrixXd dev = pack.ricci - pack.rho * Eigen::MatrixXd::Identity(r.p_dim, r.p_dim);
  pack.einstein_residual = dev.norm() / std::max(1.0, pack.ricci.norm());
  return pack;
}

/// Ricci operator and scalar curvature of the moved metric g_h = <h., h.>.
struct MovedCurvature {
  Eigen::MatrixXd ricci;  // Ricci_{h.mu} in the working basis
  double scalar = 0.0;
  double einstein_residual = 0.0;
};

inline MovedCurvature moved_curvature(const ReductiveSpace& r, const Eigen::MatrixXd& kil_p,
                                      const Eigen::MatrixXd& h) {
  const int d = r.p_dim;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw SingularH("h is not positive definite");
  Eigen::MatrixXd hinv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  Tensor3 hmu = moved_bracket(r.mu_p, h);
  MovedCurvature out;
  out.ricci = moment_map_of(hmu) - 0.5 * hinv * kil_p * hinv;
  out.scalar = -0.25 * hmu.norm2() - 0.5 * (kil_p * hinv * hinv).trace();
  const double tr = out.ricci.trace();
  if (std::abs(out.scalar - tr) > 1e-8 * std::max(1.0, std::abs(out.scalar)))
    throw Error("scalar curvature routes disagree at moved metric");
  const double rho = out.scalar / d;
  out.einstein_residual = (out.ricci - rho * Eigen::MatrixXd::Identity(d, d)).norm() /
                          std::max(1.0, out.ricci.norm());
  return out;
}

inline double scalar_of_moved(const ReductiveSpace& r, const Eigen::MatrixXd& kil_p,
                              const Eigen::MatrixXd& h) {
  const int d = r.p_dim;
  if (detail::is_diagonal(h)) {
    double mu2 = 0.0;
    for (const auto& e : r.mu_p.nonzeros()) {
      const double w = h(e.k, e.k) / (h(e.i, e.i) * h(e.j, e.j));
      mu2 += w * w * e.v * e.v;
    }
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += kil_p(i, i) / (h(i, i) * h(i, i));
    return -0.25 * mu2 - 0.5 * tr;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw SingularH("h is not positive definite");
  Eigen::MatrixXd hinv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  return -0.25 * moved_bracket(r.mu_p, h).norm2() - 0.5 * (kil_p * hinv * hinv).trace();
}

/// d/dt scal(g_{h(t)}) at h(0) = h along h'(0) = A:  -2 <Ricci_{h.mu}, S(A h^{-1})>.
inline double scalar_first_variation(const ReductiveSpace& r, const Eigen::MatrixXd& h,
                                     const Eigen::MatrixXd& a) {
  Eigen::MatrixXd kil_p = killing_operator_p(r);
  MovedCurvature mc = moved_curvature(r, kil_p, h);
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  Eigen::MatrixXd hinv = llt.solve(Eigen::MatrixXd::Identity(r.p_dim, r.p_dim));
  Eigen::MatrixXd s = symmetrize(a * hinv);
  return -2.0 * (mc.ricci * s).trace();
}

/// Quadratic form <L_p A, A> = 1/2 |theta(A)mu_p|^2 + 2 tr(M A^2).
inline double lichnerowicz_quadratic(const ReductiveSpace& r, const Eigen::MatrixXd& moment,
                                     const Eigen::MatrixXd& a) {
  double theta2;
  if (detail::is_diagonal(a)) {
    theta2 = detail::theta_diag_inner(r.mu_p, a.diagonal(), a.diagonal());
  } else {
    theta2 = theta_action_sparse(a, r.mu_p).norm2();
  }
  return 0.5 * theta2 + 2.0 * (moment * a * a).trace();
}

/// Polarized form <L_p A, B> = 1/2 <theta(A)mu, theta(B)mu> + tr(M (AB + BA)).
inline double lichnerowicz_polarized(const ReductiveSpace& r, const Eigen::MatrixXd& moment,
                                     const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double cross;
  if (detail::is_diagonal(a) && detail::is_diagonal(b)) {
    cross = detail::theta_diag_inner(r.mu_p, a.diagonal(), b.diagonal());
  } else {
    cross = theta_action_sparse(a, r.mu_p).dot(theta_action_sparse(b, r.mu_p));
  }
  return 0.5 * cross + (moment * (a * b + b * a)).trace();
}

/// Second variation of scal at an Einstein background along A in sym(p)^K:
/// <(2 rho id - L_p) A, A>. Requires the background to be Einstein.
inline double scalar_second_variation(const ReductiveSpace& r, const CurvaturePack& pack,
                                      const Eigen::MatrixXd& a, double einstein_tol = 1e-8) {
  if (pack.einstein_residual > einstein_tol)
    throw NotEinstein("background metric is not Einstein within tolerance");
  return 2.0 * pack.rho * (a * a).trace() - lichnerowicz_quadratic(r, pack.moment, a);
}

}  // namespace einstab
