#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "einstab/errors.hpp"
#include "einstab/structure_tensor.hpp"

namespace einstab {

/// Homogeneous-space model g = k (+) p in a working basis adapted to the split:
/// indices [0, k_dim) span k, indices [k_dim, dim) span p, and the inner product
/// on p is the identity (the p-basis is Q-orthonormal by construction).
struct ReductiveSpace {
  StructureTensor algebra;        // full bracket in the working basis
  int k_dim = 0;
  int p_dim = 0;
  Eigen::MatrixXd basis_in_parent;  // working basis columns in the input algebra's basis
  StructureTensor mu_p;             // p-projected bracket, indices relative to p
  Eigen::MatrixXd ip;               // inner product on p (identity)

  /// ad_p X_i as a dense p x p matrix, i relative to p.
  Eigen::MatrixXd adp(int i) const { return mu_p.ad(i); }

  Eigen::SparseMatrix<double> adp_sparse(int i) const { return mu_p.ad_sparse(i); }

  Eigen::MatrixXd adp(const Eigen::VectorXd& x) const { return mu_p.ad(x); }

  /// ad Z_a restricted to p, a relative to k.
  Eigen::MatrixXd adk(int a) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p_dim, p_dim);
    auto [lo, hi] = algebra.first_range(a);
    const auto& nz = algebra.nonzeros();
    for (std::size_t t = lo; t < hi; ++t)
      if (nz[t].j >= k_dim && nz[t].k >= k_dim)
        m(nz[t].k - k_dim, nz[t].j - k_dim) += nz[t].v;
    return m;
  }

  /// max_i |ad_p X_i + (ad_p X_i)^t|; zero iff the model is naturally reductive.
  double natural_reductivity_residual() const {
    double worst = 0.0;
    for (int i = 0; i < p_dim; ++i) {
      Eigen::MatrixXd a = adp(i);
      worst = std::max(worst, (a + a.transpose()).cwiseAbs().maxCoeff());
    }
    return worst;
  }

  bool naturally_reductive(double tol = 1e-10) const {
    return natural_reductivity_residual() <= tol;
  }

  /// Component of [k, p] along k; zero by reductivity.
  double reductivity_residual() const {
    double worst = 0.0;
    const auto& nz = algebra.nonzeros();
    for (const auto& e : nz)
      if (e.i < k_dim && e.j >= k_dim && e.k < k_dim) worst = std::max(worst, std::abs(e.v));
    return worst;
  }
};

namespace detail {

inline StructureTensor p_block(const StructureTensor& l, int k_dim) {
  std::vector<BracketEntry> entries;
  for (const auto& e : l.nonzeros())
    if (e.i >= k_dim && e.j >= k_dim && e.k >= k_dim)
      entries.push_back({e.i - k_dim, e.j - k_dim, e.k - k_dim, e.v});
  return StructureTensor::from_entries(l.dim() - k_dim, entries);
}

inline void check_subalgebra(const StructureTensor& l, const std::vector<int>& k_indices,
                             double tol = 1e-12) {
  std::vector<char> in_k(l.dim(), 0);
  for (int a : k_indices) {
    if (a < 0 || a >= l.dim()) throw RangeError("k index out of range");
    if (in_k[a]) throw RangeError("duplicate k index");
    in_k[a] = 1;
  }
  for (const auto& e : l.nonzeros())
    if (in_k[e.i] && in_k[e.j] && !in_k[e.k] && std::abs(e.v) > tol)
      throw NotASubalgebra("[k, k] leaves span(k_indices)");
}

}  // namespace detail

/// Splits g = k (+) p with p the Q-orthogonal complement of span(k_indices) and
/// returns the model in a basis where Q|_p is the identity. Q must be symmetric,
/// non-degenerate and ad-invariant; Q|_p must be positive definite.
inline ReductiveSpace reductive_split(const StructureTensor& l, const std::vector<int>& k_indices,
                                      const BilinearForm& q_form) {
  const int n = l.dim();
  const int kd = static_cast<int>(k_indices.size());
  const int pd = n - kd;
  const Eigen::MatrixXd& q = q_form.matrix;
  if (q.rows() != n || q.cols() != n) throw RangeError("Q has wrong size");
  if (symmetry_residual(q) > 1e-10 * std::max(1.0, q.cwiseAbs().maxCoeff()))
    throw Error("Q is not symmetric");

  detail::check_subalgebra(l, k_indices);

  const double q_scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
    if (svd.singularValues()(n - 1) <= 1e-10 * svd.singularValues()(0))
      throw DegenerateRestriction("Q is degenerate");
  }
  if (ad_invariance_residual(l, q) > 1e-8 * q_scale) throw Error("Q is not ad-invariant");

  std::vector<char> in_k(n, 0);
  for (int a : k_indices) in_k[a] = 1;

  // Q-orthogonal projector onto the complement of k, applied to the leftover
  // coordinate vectors in index order.
  Eigen::MatrixXd p_cols(n, pd);
  if (kd > 0) {
    Eigen::MatrixXd b(n, kd);
    b.setZero();
    for (int a = 0; a < kd; ++a) b(k_indices[a], a) = 1.0;
    Eigen::MatrixXd qk = b.transpose() * q * b;  // Q restricted to k
    Eigen::FullPivLU<Eigen::MatrixXd> lu(qk);
    if (!lu.isInvertible()) throw DegenerateRestriction("Q restricted to k is degenerate");
    Eigen::MatrixXd qe(kd, pd);  // Q(k_a, e_i) for complement slots
    int col = 0;
    for (int i = 0; i < n; ++i) {
      if (in_k[i]) continue;
      for (int a = 0; a < kd; ++a) qe(a, col) = q(k_indices[a], i);
      ++col;
    }
    Eigen::MatrixXd coeff = lu.solve(qe);  // kd x pd
    col = 0;
    for (int i = 0; i < n; ++i) {
      if (in_k[i]) continue;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      v[i] = 1.0;
      v -= b * coeff.col(col);
      p_cols.col(col++) = v;
    }
  } else {
    p_cols = Eigen::MatrixXd::Identity(n, n);
  }

  // Q-orthonormalize p. A Cholesky factor keeps already-orthogonal inputs axis-aligned.
  Eigen::MatrixXd gram = p_cols.transpose() * q * p_cols;
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(gram));
  if (llt.info() != Eigen::Success)
    throw DegenerateRestriction("Q restricted to p is not positive definite");
  Eigen::MatrixXd lfac = llt.matrixL();
  Eigen::MatrixXd p_on = lfac.triangularView<Eigen::Lower>()
                             .transpose()
                             .solve<Eigen::OnTheRight>(p_cols);

  ReductiveSpace r;
  r.k_dim = kd;
  r.p_dim = pd;
  r.basis_in_parent.resize(n, n);
  for (int a = 0; a < kd; ++a) {
    r.basis_in_parent.col(a).setZero();
    r.basis_in_parent(k_indices[a], a) = 1.0;
  }
  r.basis_in_parent.rightCols(pd) = p_on;
  r.algebra = change_basis(l, r.basis_in_parent);
  r.mu_p = detail::p_block(r.algebra, kd);
  r.ip = Eigen::MatrixXd::Identity(pd, pd);
  if (r.reductivity_residual() > 1e-12 * std::max(1.0, q_scale))
    throw Error("reductivity violated after split");
  return r;
}

/// Jensen deformation: for a simple H with semisimple subalgebra k (spanned by
/// k_indices), builds the G = H x K model of the metric
/// g_t = -Kil_h|_a + t(-Kil_h)|_k with isotropy the diagonal copy of k and
/// p_t = p_a (+) p_k. Naturally reductive for every t not in {0, 1}.
inline ReductiveSpace jensen_deformed_space(const StructureTensor& h,
                                            const std::vector<int>& k_indices, double t) {
  if (!(t > 0.0) || t == 1.0) throw RangeError("jensen deformation requires t > 0, t != 1");
  detail::check_subalgebra(h, k_indices);
  const int nh = h.dim();
  const int nk = static_cast<int>(k_indices.size());

  StructureTensor k_alg = subalgebra(h, k_indices);
  {
    BilinearForm kil_k = killing_form(k_alg);
    Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(-kil_k.matrix));
    if (llt.info() != Eigen::Success) throw KillingNotDefinite("k is not compact semisimple");
  }

  StructureTensor g = direct_sum(h, k_alg);
  Eigen::MatrixXd kil_h = killing_form(h).matrix;

  const double s = t / (1.0 - t);
  const int ng = nh + nk;
  // Q_t = -Kil_h on the H factor, (t/(1-t)) (-Kil_h)|_k on the K factor.
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(ng, ng);
  q.topLeftCorner(nh, nh) = -kil_h;
  for (int a = 0; a < nk; ++a)
    for (int b = 0; b < nk; ++b) q(nh + a, nh + b) = -s * kil_h(k_indices[a], k_indices[b]);

  // Adapted basis: diagonal k, then the a-complement slots of h, then the p_k slots.
  std::vector<char> in_k(nh, 0);
  for (int a : k_indices) in_k[a] = 1;
  Eigen::MatrixXd trans = Eigen::MatrixXd::Zero(ng, ng);
  int col = 0;
  for (int a = 0; a < nk; ++a, ++col) {
    trans(k_indices[a], col) = 1.0;
    trans(nh + a, col) = 1.0;
  }
  for (int i = 0; i < nh; ++i)
    if (!in_k[i]) trans(i, col++) = 1.0;
  for (int a = 0; a < nk; ++a, ++col) {
    trans(k_indices[a], col) = s;
    trans(nh + a, col) = -1.0;
  }

  StructureTensor g_adapted = change_basis(g, trans);
  Eigen::MatrixXd q_adapted = trans.transpose() * q * trans;
  std::vector<int> diag_k(nk);
  for (int a = 0; a < nk; ++a) diag_k[a] = a;
  ReductiveSpace r = reductive_split(g_adapted, diag_k, {q_adapted, BilinearForm::Label::custom_q});
  r.basis_in_parent = trans * r.basis_in_parent;  // back to the h (+) k basis
  if (r.natural_reductivity_residual() > 1e-10)
    throw Error("jensen model failed natural reductivity check");
  return r;
}

}  // namespace einstab
