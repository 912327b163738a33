#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <vector>

#include "einstab/curvature.hpp"
#include "einstab/errors.hpp"
#include "einstab/isotropy.hpp"

namespace einstab {

/// Matrix of L_p (or of the Casimir on sym(g)) in an explicit orthonormal basis.
struct LichnerowiczMatrix {
  enum class Method { general, naturally_reductive, structural_constants, casimir };
  Method method = Method::general;
  InvariantSubspace basis;
  Eigen::MatrixXd matrix;
};

inline const char* method_name(LichnerowiczMatrix::Method m) {
  switch (m) {
    case LichnerowiczMatrix::Method::general: return "general";
    case LichnerowiczMatrix::Method::naturally_reductive: return "naturally_reductive";
    case LichnerowiczMatrix::Method::structural_constants: return "structural_constants";
    case LichnerowiczMatrix::Method::casimir: return "casimir";
  }
  return "?";
}

/// L_p in the given orthonormal basis of (a subspace of) sym(p)^K, through the
/// polarized quadratic form 1/2 <theta(A)mu, theta(B)mu> + tr(M(AB + BA)).
inline LichnerowiczMatrix lich_general(const ReductiveSpace& r, const InvariantSubspace& s) {
  const int m = s.dim();
  Eigen::MatrixXd moment = moment_map(r);
  Eigen::MatrixXd out(m, m);

  bool all_diag = true;
  for (const auto& a : s.ops) all_diag = all_diag && detail::is_diagonal(a);

  if (all_diag) {
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        out(i, j) = out(j, i) = lichnerowicz_polarized(r, moment, s.ops[i], s.ops[j]);
  } else {
    // cache theta images when they fit, otherwise recompute pairwise
    const std::size_t cube = static_cast<std::size_t>(r.p_dim) * r.p_dim * r.p_dim;
    if (cube * m * sizeof(double) <= (64u << 20)) {
      std::vector<Tensor3> thetas;
      thetas.reserve(m);
      for (const auto& a : s.ops) thetas.push_back(theta_action_sparse(a, r.mu_p));
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          const double v = 0.5 * thetas[i].dot(thetas[j]) +
                           (moment * (s.ops[i] * s.ops[j] + s.ops[j] * s.ops[i])).trace();
          out(i, j) = out(j, i) = v;
        }
    } else {
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
          out(i, j) = out(j, i) = lichnerowicz_polarized(r, moment, s.ops[i], s.ops[j]);
    }
  }
  return {LichnerowiczMatrix::Method::general, s, std::move(out)};
}

namespace detail {

inline std::vector<Eigen::SparseMatrix<double>> adp_sparse_list(const ReductiveSpace& r) {
  std::vector<Eigen::SparseMatrix<double>> ks;
  ks.reserve(r.p_dim);
  for (int i = 0; i < r.p_dim; ++i) ks.push_back(r.adp_sparse(i));
  return ks;
}

// image = factor * sum_i [K_i, [K_i, A]] for dense symmetric A and sparse K_i.
inline Eigen::MatrixXd double_commutator_image(
    const std::vector<Eigen::SparseMatrix<double>>& ks, const Eigen::MatrixXd& a,
    double factor) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (const auto& k : ks) {
    Eigen::MatrixXd b = k * a;
    b.noalias() -= a * k;
    out.noalias() += k * b;
    out.noalias() -= b * k;
  }
  return factor * out;
}

}  // namespace detail

/// Naturally reductive form L_p A = -1/2 sum_i [ad_p X_i, [ad_p X_i, A]];
/// positive semidefinite. Hard error unless every ad_p X_i is skew.
inline LichnerowiczMatrix lich_naturally_reductive(const ReductiveSpace& r,
                                                   const InvariantSubspace& s) {
  if (!r.naturally_reductive(1e-10))
    throw NotNaturallyReductive("some ad_p X is not skew-symmetric");
  auto ks = detail::adp_sparse_list(r);
  const int m = s.dim();
  Eigen::MatrixXd out(m, m);
  for (int j = 0; j < m; ++j) {
    Eigen::MatrixXd img = detail::double_commutator_image(ks, s.ops[j], -0.5);
    Eigen::VectorXd col = s.coords.transpose() * sym_to_vec(img);
    out.col(j) = col;
  }
  out = symmetrize(out);
  return {LichnerowiczMatrix::Method::naturally_reductive, s, std::move(out)};
}

/// Structural constants [ijk] = sum over Q-orthonormal summand bases of
/// <mu_p(X^i, X^j), X^k>^2; permutation-symmetric for naturally reductive models.
struct StructuralConstants {
  int r = 0;
  std::vector<double> table;  // r^3
  double perm_residual = 0.0;
  bool naturally_reductive = false;

  double at(int i, int j, int k) const {
    return table[(static_cast<std::size_t>(i) * r + j) * r + k];
  }
};

inline StructuralConstants structural_constants(const ReductiveSpace& r,
                                                const IsotropyDecomposition& dec) {
  StructuralConstants sc;
  sc.r = dec.r();
  sc.table.assign(static_cast<std::size_t>(sc.r) * sc.r * sc.r, 0.0);
  for (int i = 0; i < sc.r; ++i) {
    const Eigen::MatrixXd& vi = dec.summand_bases[i];
    for (int alpha = 0; alpha < dec.dims[i]; ++alpha) {
      Eigen::MatrixXd ad_u = r.adp(Eigen::VectorXd(vi.col(alpha)));
      for (int j = 0; j < sc.r; ++j) {
        Eigen::MatrixXd b = ad_u * dec.summand_bases[j];  // columns mu(u, v_beta)
        for (int k = 0; k < sc.r; ++k) {
          const double v = (dec.summand_bases[k].transpose() * b).squaredNorm();
          sc.table[(static_cast<std::size_t>(i) * sc.r + j) * sc.r + k] += v;
        }
      }
    }
  }
  sc.naturally_reductive = r.naturally_reductive(1e-10);
  double worst = 0.0;
  for (int i = 0; i < sc.r; ++i)
    for (int j = 0; j < sc.r; ++j)
      for (int k = 0; k < sc.r; ++k) {
        const double v = sc.at(i, j, k);
        worst = std::max({worst, std::abs(v - sc.at(j, i, k)), std::abs(v - sc.at(k, j, i)),
                          std::abs(v - sc.at(i, k, j))});
      }
  sc.perm_residual = worst;
  if (sc.naturally_reductive && worst > 1e-9)
    throw Error("[ijk] permutation symmetry violated on a naturally reductive model");
  return sc;
}

/// Multiplicity-free matrix of L_p in the basis {I_{p_k}/sqrt(d_k)}:
/// diagonal (1/d_k) sum_{j != k; i} [ijk], off-diagonal -(1/sqrt(d_j d_k)) sum_i [ijk].
inline LichnerowiczMatrix lich_multiplicity_free(const StructuralConstants& sc,
                                                 const IsotropyDecomposition& dec) {
  if (!dec.multiplicity_free)
    throw NotMultiplicityFree("isotropy representation has equivalent summands");
  if (!sc.naturally_reductive)
    throw NotNaturallyReductive("structural-constant form requires a naturally reductive model");
  const int r = sc.r;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, r);
  for (int k = 0; k < r; ++k) {
    double diag = 0.0;
    for (int j = 0; j < r; ++j) {
      if (j == k) continue;
      for (int i = 0; i < r; ++i) diag += sc.at(i, j, k);
    }
    out(k, k) = diag / dec.dims[k];
    for (int j = 0; j < r; ++j) {
      if (j == k) continue;
      double sum = 0.0;
      for (int i = 0; i < r; ++i) sum += sc.at(i, j, k);
      out(j, k) = -sum / std::sqrt(double(dec.dims[j]) * double(dec.dims[k]));
    }
  }
  out = symmetrize(out);
  const int p_dim = static_cast<int>(dec.summand_bases[0].rows());
  return {LichnerowiczMatrix::Method::structural_constants, projector_sym_space(dec, p_dim),
          std::move(out)};
}

/// Casimir operator Cas_tau = -sum tau(X_i)^2 on sym(g), tau(X)A = [ad X, A],
/// in a -Kil-orthonormal basis. L_p of the Killing metric equals Cas_tau / 2.
inline LichnerowiczMatrix casimir_sym(const StructureTensor& l) {
  const int d = l.dim();
  Eigen::MatrixXd kil = killing_form(l).matrix;
  Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(-kil));
  if (llt.info() != Eigen::Success)
    throw KillingNotDefinite("-Kil is not positive definite: g is not compact semisimple");
  Eigen::MatrixXd lfac = llt.matrixL();
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(d, d);
  t = lfac.triangularView<Eigen::Lower>().transpose().solve(t);  // columns: L^{-T}
  StructureTensor on = change_basis(l, t);

  // sparse row/column structure of each ad X_i in the orthonormal basis
  std::vector<std::vector<std::vector<std::pair<int, double>>>> cols(d), rows(d);
  for (int i = 0; i < d; ++i) {
    cols[i].assign(d, {});
    rows[i].assign(d, {});
    auto [lo, hi] = on.first_range(i);
    for (std::size_t s = lo; s < hi; ++s) {
      const auto& e = on.nonzeros()[s];
      cols[i][e.j].push_back({e.k, e.v});  // column j, row k
      rows[i][e.k].push_back({e.j, e.v});
    }
  }

  const int n = sym_dim(d);
  Eigen::MatrixXd cas(n, n);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n);
  for (int i = 0; i < d; ++i) {
    pairs.push_back({i, i});
    for (int j = i + 1; j < d; ++j) pairs.push_back({i, j});
  }
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd img(d, d);
  std::vector<std::tuple<int, int, double>> b;
  for (int q = 0; q < n; ++q) {
    auto [p, s] = pairs[q];
    const double w = (p == s) ? 1.0 : inv_s2;
    img.setZero();
    for (int i = 0; i < d; ++i) {
      // B = [K_i, E_ps + E_sp] (scaled)
      b.clear();
      for (const auto& [row, v] : cols[i][p]) b.push_back({row, s, w * v});
      if (p != s)
        for (const auto& [row, v] : cols[i][s]) b.push_back({row, p, w * v});
      for (const auto& [col, v] : rows[i][s]) b.push_back({p, col, -w * v});
      if (p != s)
        for (const auto& [col, v] : rows[i][p]) b.push_back({s, col, -w * v});
      // img -= [K_i, B] = K_i B - B K_i
      for (const auto& [br, bc, bv] : b) {
        for (const auto& [row, v] : cols[i][br]) img(row, bc) -= v * bv;
        for (const auto& [col, v] : rows[i][bc]) img(br, col) += bv * v;
      }
    }
    cas.col(q) = sym_to_vec(symmetrize(img));
  }
  cas = symmetrize(cas);
  InvariantSubspace basis = InvariantSubspace::from_coords(InvariantSubspace::Label::sym_k, d,
                                                           Eigen::MatrixXd::Identity(n, n));
  return {LichnerowiczMatrix::Method::casimir, std::move(basis), std::move(cas)};
}

/// Smallest eigenvalue above the kernel (the "first eigenvalue" of a PSD operator).
inline double first_positive_eigenvalue(const Eigen::MatrixXd& m, double rel_tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double scale = std::max(std::abs(es.eigenvalues()(m.rows() - 1)), 1.0);
  for (int i = 0; i < m.rows(); ++i)
    if (es.eigenvalues()(i) > rel_tol * scale) return es.eigenvalues()(i);
  throw Error("operator has no positive eigenvalue");
}

}  // namespace einstab
