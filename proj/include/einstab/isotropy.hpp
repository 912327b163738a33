#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "einstab/errors.hpp"
#include "einstab/linalg.hpp"
#include "einstab/reductive.hpp"

namespace einstab {

/// Orthonormal (tr AB) family of symmetric operators on p spanning an
/// Ad(K)-invariant subspace of sym(p).
struct InvariantSubspace {
  enum class Label { sym_k, sym0_k, trivial_variations, w_space };
  Label label = Label::sym_k;
  int p_dim = 0;
  std::vector<Eigen::MatrixXd> ops;
  Eigen::MatrixXd coords;  // sym_dim(p_dim) x dim(), orthonormal columns

  int dim() const { return static_cast<int>(ops.size()); }

  /// Coordinates of a symmetric operator in this basis; throws BasisMismatch if
  /// the operator is not in the span.
  Eigen::VectorXd coordinates(const Eigen::MatrixXd& a, double tol = 1e-8) const {
    Eigen::VectorXd v = sym_to_vec(a);
    Eigen::VectorXd c = coords.transpose() * v;
    if ((v - coords * c).norm() > tol * std::max(1.0, v.norm()))
      throw BasisMismatch("operator is not in the subspace span");
    return c;
  }

  static InvariantSubspace from_coords(Label label, int p_dim, Eigen::MatrixXd c) {
    InvariantSubspace s;
    s.label = label;
    s.p_dim = p_dim;
    s.coords = std::move(c);
    s.ops.reserve(s.coords.cols());
    for (int j = 0; j < s.coords.cols(); ++j) s.ops.push_back(vec_to_sym(s.coords.col(j), p_dim));
    return s;
  }
};

/// Decomposition p = p_1 (+) ... (+) p_r into Ad(K)-invariant irreducible summands.
struct IsotropyDecomposition {
  std::vector<Eigen::MatrixXd> summand_bases;  // p_dim x d_k, orthonormal columns
  std::vector<int> dims;
  std::vector<double> b_constants;  // -Kil_g|_{p_k} = b_k <.,.>
  bool multiplicity_free = false;

  int r() const { return static_cast<int>(dims.size()); }
  Eigen::MatrixXd projector(int k) const { return summand_bases[k] * summand_bases[k].transpose(); }
};

namespace detail {

inline std::vector<Eigen::MatrixXd> adk_list(const ReductiveSpace& r) {
  std::vector<Eigen::MatrixXd> ks;
  ks.reserve(r.k_dim);
  for (int a = 0; a < r.k_dim; ++a) ks.push_back(r.adk(a));
  return ks;
}

// Gram operator T of the stacked commutator constraints A -> [K_a, A] on sym(p):
// T[q,q'] = sum_a <[K_a, B_q], [K_a, B_q']> over the full gl(p) inner product,
// so Ker T = sym(p)^K for arbitrary (not necessarily skew) generators. Images
// are accumulated sparsely, grouped by gl position.
inline Eigen::MatrixXd commutator_gram(const std::vector<Eigen::MatrixXd>& ks, int d) {
  const int n = sym_dim(d);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n);
  for (int i = 0; i < d; ++i) {
    pairs.push_back({i, i});
    for (int j = i + 1; j < d; ++j) pairs.push_back({i, j});
  }
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(d) * d);
  for (const auto& k : ks) {
    for (auto& row : rows) row.clear();
    // sparse column/row structure of K
    std::vector<std::vector<std::pair<int, double>>> kcol(d), krow(d);
    for (int c = 0; c < d; ++c)
      for (int rr = 0; rr < d; ++rr)
        if (k(rr, c) != 0.0) {
          kcol[c].push_back({rr, k(rr, c)});
          krow[rr].push_back({c, k(rr, c)});
        }
    for (int q = 0; q < n; ++q) {
      auto [i, j] = pairs[q];
      const double w = (i == j) ? 1.0 : inv_s2;
      // [K, w(E_ij + E_ji)] entries at (r, j), (r, i), (i, c), (j, c)
      for (const auto& [rr, v] : kcol[i]) rows[static_cast<std::size_t>(rr) * d + j].push_back({q, w * v});
      if (i != j)
        for (const auto& [rr, v] : kcol[j]) rows[static_cast<std::size_t>(rr) * d + i].push_back({q, w * v});
      for (const auto& [c, v] : krow[j]) rows[static_cast<std::size_t>(i) * d + c].push_back({q, -w * v});
      if (i != j)
        for (const auto& [c, v] : krow[i]) rows[static_cast<std::size_t>(j) * d + c].push_back({q, -w * v});
    }
    for (const auto& row : rows) {
      if (row.empty()) continue;
      // collapse duplicate q entries at this position, then rank-1 accumulate
      std::vector<std::pair<int, double>> merged(row);
      std::sort(merged.begin(), merged.end());
      std::size_t m = 0;
      for (std::size_t u = 0; u < merged.size(); ++u) {
        if (m > 0 && merged[m - 1].first == merged[u].first)
          merged[m - 1].second += merged[u].second;
        else
          merged[m++] = merged[u];
      }
      merged.resize(m);
      for (std::size_t u = 0; u < m; ++u)
        for (std::size_t v2 = u; v2 < m; ++v2) {
          t(merged[u].first, merged[v2].first) += merged[u].second * merged[v2].second;
          if (u != v2) t(merged[v2].first, merged[u].first) += merged[u].second * merged[v2].second;
        }
    }
  }
  return t;
}

struct KernelResult {
  Eigen::MatrixXd basis;  // n x r, orthonormal
  double lambda_max = 0.0;
};

// Kernel of a PSD operator with a spectral gap. Dense eigendecomposition for
// small sizes, shifted block inverse iteration above that. The zero/nonzero
// split is gap-checked so roundoff can never silently change the kernel.
inline KernelResult psd_kernel(const Eigen::MatrixXd& t, std::uint64_t seed) {
  const int n = static_cast<int>(t.rows());
  KernelResult out;
  if (n == 0) return out;

  const double kern_rel = 1e-11;
  const double gap_factor = 100.0;

  if (n <= 400) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd& ev = es.eigenvalues();
    out.lambda_max = std::max(ev(n - 1), 0.0);
    const double tol = kern_rel * std::max(out.lambda_max, 1e-300);
    int r = 0;
    while (r < n && ev(r) <= tol) ++r;
    if (r < n && ev(r) <= gap_factor * tol)
      throw Error("kernel threshold ambiguous: spectral gap too small");
    out.basis = es.eigenvectors().leftCols(r);
    return out;
  }

  if (n > 4000)
    throw ModelTooLarge("invariant operator space too large for the generic kernel path");

  // lambda_max estimate by power iteration
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  Eigen::VectorXd v = gaussian_vector(n, rng).normalized();
  for (int it = 0; it < 30; ++it) v = (t * v).normalized();
  out.lambda_max = v.dot(t * v);
  const double tol = kern_rel * std::max(out.lambda_max, 1e-300);

  Eigen::MatrixXd shifted = t;
  const double eps = 1e-8 * out.lambda_max;
  shifted.diagonal().array() += eps;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw Error("kernel factorization failed");

  int block = 24;
  while (true) {
    block = std::min(block, n);
    Eigen::MatrixXd x(n, block);
    for (int j = 0; j < block; ++j) x.col(j) = gaussian_vector(n, rng);
    for (int it = 0; it < 4; ++it) {
      x = ldlt.solve(x);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
      x = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    }
    Eigen::MatrixXd small = x.transpose() * t * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(small));
    const Eigen::VectorXd& mu = es.eigenvalues();
    int r = 0;
    while (r < block && mu(r) <= tol) ++r;
    if (r == block && block < std::min(n, 512)) {
      block *= 2;
      continue;
    }
    if (r == block) throw ModelTooLarge("kernel dimension exceeds the iteration block");
    if (mu(r) <= gap_factor * tol)
      throw Error("kernel threshold ambiguous: spectral gap too small");
    out.basis = x * es.eigenvectors().leftCols(r);
    return out;
  }
}

inline Eigen::MatrixXd killing_on_p(const ReductiveSpace& r) {
  Eigen::MatrixXd kil = killing_form(r.algebra).matrix;
  return kil.bottomRightCorner(r.p_dim, r.p_dim);
}

}  // namespace detail

/// Orthonormal basis of sym(p)^K = {A = A^t : [ad Z|_p, A] = 0 for Z in k},
/// computed as the kernel of the stacked commutator operator.
inline InvariantSubspace invariant_sym_space(const ReductiveSpace& r,
                                             std::uint64_t seed = default_seed()) {
  const int d = r.p_dim;
  const int n = sym_dim(d);
  if (r.k_dim == 0)
    return InvariantSubspace::from_coords(InvariantSubspace::Label::sym_k, d,
                                          Eigen::MatrixXd::Identity(n, n));
  auto ks = detail::adk_list(r);
  Eigen::MatrixXd t = detail::commutator_gram(ks, d);
  detail::KernelResult kr = detail::psd_kernel(t, seed);
  InvariantSubspace s =
      InvariantSubspace::from_coords(InvariantSubspace::Label::sym_k, d, kr.basis);
  for (const auto& a : s.ops)
    for (const auto& k : ks)
      if ((k * a - a * k).cwiseAbs().maxCoeff() > 1e-8)
        throw Error("invariant basis fails the commutant residual check");
  return s;
}

namespace detail {

inline int leading_index(const Eigen::MatrixXd& basis) {
  Eigen::VectorXd diag = (basis * basis.transpose()).diagonal();
  for (int i = 0; i < diag.size(); ++i)
    if (diag[i] > 1e-6) return i;
  return static_cast<int>(diag.size());
}

inline void sort_summands(IsotropyDecomposition& dec) {
  const int r = dec.r();
  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> leads(r);
  for (int k = 0; k < r; ++k) leads[k] = leading_index(dec.summand_bases[k]);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(leads[a], dec.dims[a]) < std::tie(leads[b], dec.dims[b]);
  });
  IsotropyDecomposition out;
  out.multiplicity_free = dec.multiplicity_free;
  for (int k : order) {
    out.summand_bases.push_back(dec.summand_bases[k]);
    out.dims.push_back(dec.dims[k]);
    out.b_constants.push_back(dec.b_constants[k]);
  }
  dec = std::move(out);
}

inline void fill_b_constants(const ReductiveSpace& r, IsotropyDecomposition& dec) {
  Eigen::MatrixXd kil_p = killing_on_p(r);
  dec.b_constants.clear();
  for (const auto& v : dec.summand_bases) {
    Eigen::MatrixXd block = -v.transpose() * kil_p * v;
    const double b = block.trace() / block.rows();
    if ((block - b * Eigen::MatrixXd::Identity(block.rows(), block.cols())).cwiseAbs().maxCoeff() >
        1e-8)
      throw Error("-Kil is not a summand scalar: decomposition is not irreducible");
    dec.b_constants.push_back(b);
  }
}

inline void check_invariance(const std::vector<Eigen::MatrixXd>& ks,
                             const std::vector<Eigen::MatrixXd>& bases) {
  for (const auto& v : bases) {
    Eigen::MatrixXd p = v * v.transpose();
    for (const auto& k : ks)
      if (((Eigen::MatrixXd::Identity(p.rows(), p.cols()) - p) * (k * v)).cwiseAbs().maxCoeff() >
          1e-8)
        throw Error("summand is not ad(k)-invariant");
  }
}

inline std::vector<Eigen::MatrixXd> generic_eigenspaces(const ReductiveSpace& r,
                                                        const InvariantSubspace& sym_k,
                                                        std::mt19937_64& rng, int* count) {
  Eigen::VectorXd gamma = gaussian_vector(sym_k.dim(), rng);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(r.p_dim, r.p_dim);
  for (int i = 0; i < sym_k.dim(); ++i) c += gamma[i] * sym_k.ops[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double spread = std::max(ev(r.p_dim - 1) - ev(0), 1.0);
  std::vector<Eigen::MatrixXd> out;
  int start = 0;
  for (int i = 1; i <= r.p_dim; ++i) {
    if (i == r.p_dim || ev(i) - ev(i - 1) > 1e-7 * spread) {
      out.push_back(es.eigenvectors().middleCols(start, i - start));
      start = i;
    }
  }
  *count = static_cast<int>(out.size());
  return out;
}

}  // namespace detail

/// Joint eigenspace decomposition of a generic element of sym(p)^K, with the
/// summand count cross-checked against an independent draw.
inline IsotropyDecomposition isotropy_decomposition(const ReductiveSpace& r,
                                                    const InvariantSubspace& sym_k,
                                                    std::uint64_t seed = default_seed()) {
  auto ks = detail::adk_list(r);
  std::mt19937_64 rng(seed);
  int attempts = 0;
  while (true) {
    int r1 = 0, r2 = 0;
    std::vector<Eigen::MatrixXd> bases = detail::generic_eigenspaces(r, sym_k, rng, &r1);
    detail::generic_eigenspaces(r, sym_k, rng, &r2);
    if (r1 == r2) {
      IsotropyDecomposition dec;
      dec.summand_bases = std::move(bases);
      for (const auto& v : dec.summand_bases) dec.dims.push_back(static_cast<int>(v.cols()));
      detail::check_invariance(ks, dec.summand_bases);
      detail::fill_b_constants(r, dec);
      dec.multiplicity_free = (sym_k.dim() == dec.r());
      detail::sort_summands(dec);
      return dec;
    }
    if (++attempts >= 2) throw DecompositionUnstable("generic draws disagree on summand count");
  }
}

/// Decomposition from construction-time labels (index groups of the working
/// p-basis). Invariance, irreducibility and pairwise inequivalence are verified,
/// so the multiplicity_free flag is as trustworthy as on the generic path.
inline IsotropyDecomposition labeled_decomposition(const ReductiveSpace& r,
                                                   const std::vector<std::vector<int>>& groups) {
  auto ks = detail::adk_list(r);
  IsotropyDecomposition dec;
  std::vector<char> used(r.p_dim, 0);
  for (const auto& g : groups) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(r.p_dim, g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (g[c] < 0 || g[c] >= r.p_dim || used[g[c]]) throw RangeError("bad summand index group");
      used[g[c]] = 1;
      v(g[c], c) = 1.0;
    }
    dec.summand_bases.push_back(std::move(v));
    dec.dims.push_back(static_cast<int>(g.size()));
  }
  if (std::accumulate(dec.dims.begin(), dec.dims.end(), 0) != r.p_dim)
    throw RangeError("summand index groups must cover p");
  detail::check_invariance(ks, dec.summand_bases);
  detail::fill_b_constants(r, dec);

  // multiplicity-free <=> dim sym(p_j + p_k)^K = 2 for every pair (each summand
  // irreducible and no two equivalent); verified on the restricted actions.
  bool mult_free = true;
  const int rr = dec.r();
  for (int j = 0; j < rr && mult_free; ++j) {
    for (int k = j + 1; k < rr && mult_free; ++k) {
      Eigen::MatrixXd v(r.p_dim, dec.dims[j] + dec.dims[k]);
      v << dec.summand_bases[j], dec.summand_bases[k];
      std::vector<Eigen::MatrixXd> restricted;
      restricted.reserve(ks.size());
      for (const auto& ka : ks) restricted.push_back(v.transpose() * ka * v);
      Eigen::MatrixXd t = detail::commutator_gram(restricted, static_cast<int>(v.cols()));
      detail::KernelResult kr = detail::psd_kernel(t, 0);
      if (kr.basis.cols() != 2) mult_free = false;
    }
  }
  dec.multiplicity_free = mult_free;
  return dec;
}

/// Orthonormal basis {P_k / sqrt(d_k)} of the summand-scalar operators; equals
/// all of sym(p)^K exactly when the decomposition is multiplicity-free.
inline InvariantSubspace projector_sym_space(const IsotropyDecomposition& dec, int p_dim) {
  Eigen::MatrixXd coords(sym_dim(p_dim), dec.r());
  for (int k = 0; k < dec.r(); ++k)
    coords.col(k) = sym_to_vec(dec.projector(k) / std::sqrt(double(dec.dims[k])));
  return InvariantSubspace::from_coords(InvariantSubspace::Label::sym_k, p_dim, coords);
}

/// Orthonormal basis of p_0 = {X in p : [k, X] = 0}.
inline Eigen::MatrixXd p0_space(const ReductiveSpace& r, std::uint64_t seed = default_seed()) {
  if (r.k_dim == 0) return Eigen::MatrixXd::Identity(r.p_dim, r.p_dim);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(r.p_dim, r.p_dim);
  for (int a = 0; a < r.k_dim; ++a) {
    Eigen::MatrixXd k = r.adk(a);
    t.noalias() += k.transpose() * k;
  }
  return detail::psd_kernel(t, seed).basis;
}

/// span{S(ad_p X) : X in p_0}: the trivial (gauge) directions of the metric.
inline InvariantSubspace trivial_variation_space(const ReductiveSpace& r,
                                                 std::uint64_t seed = default_seed()) {
  Eigen::MatrixXd p0 = p0_space(r, seed);
  Eigen::MatrixXd cols(sym_dim(r.p_dim), p0.cols());
  for (int j = 0; j < p0.cols(); ++j)
    cols.col(j) = sym_to_vec(symmetrize(r.adp(Eigen::VectorXd(p0.col(j)))));
  return InvariantSubspace::from_coords(InvariantSubspace::Label::trivial_variations, r.p_dim,
                                        column_span(cols, 1e-10));
}

/// W = orthogonal complement of span{I} + trivial variations inside sym(p)^K.
inline InvariantSubspace tt_space(const ReductiveSpace& r, const InvariantSubspace& sym_k,
                                  const InvariantSubspace& trivial) {
  Eigen::MatrixXd excluded(sym_dim(r.p_dim), 1 + trivial.dim());
  excluded.col(0) = sym_to_vec(Eigen::MatrixXd::Identity(r.p_dim, r.p_dim)).normalized();
  excluded.rightCols(trivial.dim()) = trivial.coords;
  Eigen::MatrixXd w = complement_within(sym_k.coords, excluded);
  InvariantSubspace s = InvariantSubspace::from_coords(InvariantSubspace::Label::w_space,
                                                       r.p_dim, std::move(w));
  return s;
}

/// max over a p_0-basis X of |tr(A S(ad_p X))|; ~0 certifies that the tensor
/// attached to A is divergence-free.
inline double divergence_pairing_check(const ReductiveSpace& r, const Eigen::MatrixXd& a,
                                       std::uint64_t seed = default_seed()) {
  Eigen::MatrixXd p0 = p0_space(r, seed);
  double worst = 0.0;
  for (int j = 0; j < p0.cols(); ++j) {
    Eigen::MatrixXd s = symmetrize(r.adp(Eigen::VectorXd(p0.col(j))));
    worst = std::max(worst, std::abs((a * s).trace()));
  }
  return worst;
}

}  // namespace einstab
