#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "einstab/errors.hpp"
#include "einstab/linalg.hpp"

namespace einstab {

/// One nonzero structure constant: c[i][j][k] = coefficient of e_k in [e_i, e_j].
struct BracketEntry {
  int i, j, k;
  double v;
};

/// Antisymmetric product table of a finite-dimensional algebra in a fixed basis.
/// Stores the sparsity index (both orientations) sorted by (i, j, k); contraction
/// loops iterate it rather than a dense cube.
class StructureTensor {
 public:
  StructureTensor() = default;

  /// Builds from entries given in one or both orientations. Fills the antisymmetric
  /// mirror, rejects i == j with nonzero value and inconsistent duplicates.
  static StructureTensor from_entries(int dim, const std::vector<BracketEntry>& entries,
                                      double tol = 1e-12) {
    StructureTensor t;
    t.dim_ = dim;
    std::map<std::tuple<int, int, int>, double> acc;
    for (const auto& e : entries) {
      if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= dim || e.j >= dim || e.k >= dim)
        throw RangeError("bracket index out of range");
      if (std::abs(e.v) <= tol) continue;
      if (e.i == e.j) throw Error("nonzero bracket [e_i, e_i]");
      auto key = std::make_tuple(e.i, e.j, e.k);
      auto mirror = std::make_tuple(e.j, e.i, e.k);
      auto it = acc.find(key);
      if (it != acc.end()) {
        if (std::abs(it->second - e.v) > tol) throw Error("inconsistent duplicate bracket entry");
        continue;
      }
      auto mit = acc.find(mirror);
      if (mit != acc.end()) {
        if (std::abs(mit->second + e.v) > tol) throw Error("antisymmetry violated in input");
        continue;
      }
      acc[key] = e.v;
      acc[mirror] = -e.v;
    }
    t.nnz_.reserve(acc.size());
    for (const auto& [key, v] : acc)
      t.nnz_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
    t.build_index();
    return t;
  }

  int dim() const { return dim_; }

  /// All nonzeros, both orientations, sorted by (i, j, k).
  const std::vector<BracketEntry>& nonzeros() const { return nnz_; }

  double c(int i, int j, int k) const {
    auto [lo, hi] = pair_range(i, j);
    for (std::size_t t = lo; t < hi; ++t)
      if (nnz_[t].k == k) return nnz_[t].v;
    return 0.0;
  }

  /// Entries of [e_i, e_j] as (k, value) pairs.
  std::pair<std::size_t, std::size_t> pair_range(int i, int j) const {
    BracketEntry probe{i, j, 0, 0.0};
    auto cmp = [](const BracketEntry& a, const BracketEntry& b) {
      return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
    };
    auto lo = std::lower_bound(nnz_.begin(), nnz_.end(), probe, cmp);
    probe.k = dim_;
    auto hi = std::lower_bound(nnz_.begin(), nnz_.end(), probe, cmp);
    return {static_cast<std::size_t>(lo - nnz_.begin()), static_cast<std::size_t>(hi - nnz_.begin())};
  }

  /// Range of entries with first index i (the sparse data of ad e_i).
  std::pair<std::size_t, std::size_t> first_range(int i) const {
    return {first_offset_[i], first_offset_[i + 1]};
  }

  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (const auto& e : nnz_) out[e.k] += e.v * x[e.i] * y[e.j];
    return out;
  }

  /// Dense matrix of ad e_i: column j holds [e_i, e_j].
  Eigen::MatrixXd ad(int i) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    auto [lo, hi] = first_range(i);
    for (std::size_t t = lo; t < hi; ++t) m(nnz_[t].k, nnz_[t].j) += nnz_[t].v;
    return m;
  }

  Eigen::MatrixXd ad(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (const auto& e : nnz_) m(e.k, e.j) += e.v * x[e.i];
    return m;
  }

  Eigen::SparseMatrix<double> ad_sparse(int i) const {
    std::vector<Eigen::Triplet<double>> trip;
    auto [lo, hi] = first_range(i);
    trip.reserve(hi - lo);
    for (std::size_t t = lo; t < hi; ++t) trip.emplace_back(nnz_[t].k, nnz_[t].j, nnz_[t].v);
    Eigen::SparseMatrix<double> m(dim_, dim_);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
  }

  /// max_k |tr ad e_k|; zero for unimodular algebras.
  double unimodularity_residual() const {
    Eigen::VectorXd tr = Eigen::VectorXd::Zero(dim_);
    for (const auto& e : nnz_)
      if (e.j == e.k) tr[e.i] += e.v;
    return dim_ == 0 ? 0.0 : tr.cwiseAbs().maxCoeff();
  }

  /// Largest componentwise Jacobi residual over all index triples,
  /// evaluated as max over pairs (i, j) of |[ad e_i, ad e_j] - ad [e_i, e_j]|.
  double jacobi_residual() const {
    // Per-column entry lists of every ad e_i, for sparse products.
    std::vector<std::vector<std::pair<int, double>>> col(static_cast<std::size_t>(dim_) * dim_);
    for (const auto& e : nnz_) col[static_cast<std::size_t>(e.i) * dim_ + e.j].push_back({e.k, e.v});

    Eigen::MatrixXd scratch = Eigen::MatrixXd::Zero(dim_, dim_);
    std::vector<std::pair<int, int>> touched;
    double worst = 0.0;
    auto add_product = [&](int a, int b, double sign) {
      // sign * ad(e_a) ad(e_b): entry (k, m) += c[a][l][k] c[b][m][l]
      for (int m = 0; m < dim_; ++m) {
        for (const auto& [l, v2] : col[static_cast<std::size_t>(b) * dim_ + m]) {
          for (const auto& [k, v1] : col[static_cast<std::size_t>(a) * dim_ + l]) {
            if (scratch(k, m) == 0.0) touched.push_back({k, m});
            scratch(k, m) += sign * v1 * v2;
          }
        }
      }
    };
    for (int i = 0; i < dim_; ++i) {
      for (int j = i + 1; j < dim_; ++j) {
        touched.clear();
        add_product(i, j, 1.0);
        add_product(j, i, -1.0);
        auto [lo, hi] = pair_range(i, j);
        for (std::size_t t = lo; t < hi; ++t) {
          const int m = nnz_[t].k;
          const double w = nnz_[t].v;
          for (int q = 0; q < dim_; ++q) {
            for (const auto& [k, v] : col[static_cast<std::size_t>(m) * dim_ + q]) {
              if (scratch(k, q) == 0.0) touched.push_back({k, q});
              scratch(k, q) -= w * v;
            }
          }
        }
        for (const auto& [k, m] : touched) {
          worst = std::max(worst, std::abs(scratch(k, m)));
          scratch(k, m) = 0.0;
        }
      }
    }
    return worst;
  }

 private:
  void build_index() {
    auto cmp = [](const BracketEntry& a, const BracketEntry& b) {
      return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
    };
    std::sort(nnz_.begin(), nnz_.end(), cmp);
    first_offset_.assign(dim_ + 1, 0);
    for (const auto& e : nnz_) ++first_offset_[e.i + 1];
    for (int i = 0; i < dim_; ++i) first_offset_[i + 1] += first_offset_[i];
  }

  int dim_ = 0;
  std::vector<BracketEntry> nnz_;
  std::vector<std::size_t> first_offset_;
};

/// Direct sum a (+) b; b's indices are shifted by dim a.
inline StructureTensor direct_sum(const StructureTensor& a, const StructureTensor& b) {
  std::vector<BracketEntry> entries(a.nonzeros());
  const int off = a.dim();
  for (const auto& e : b.nonzeros()) entries.push_back({e.i + off, e.j + off, e.k + off, e.v});
  return StructureTensor::from_entries(a.dim() + b.dim(), entries);
}

/// Restriction of the bracket to the span of the given basis indices
/// (the index set must be closed under bracket; checked by the caller).
inline StructureTensor subalgebra(const StructureTensor& l, const std::vector<int>& idx) {
  std::vector<int> pos(l.dim(), -1);
  for (std::size_t a = 0; a < idx.size(); ++a) pos[idx[a]] = static_cast<int>(a);
  std::vector<BracketEntry> entries;
  for (const auto& e : l.nonzeros())
    if (pos[e.i] >= 0 && pos[e.j] >= 0 && pos[e.k] >= 0)
      entries.push_back({pos[e.i], pos[e.j], pos[e.k], e.v});
  return StructureTensor::from_entries(static_cast<int>(idx.size()), entries);
}

namespace detail {

// Detects T = scaled permutation (one nonzero per row and column); returns
// (perm, scale) with column j = scale[j] * e_{perm[j]}.
inline bool scaled_permutation(const Eigen::MatrixXd& t, std::vector<int>& perm,
                               std::vector<double>& scale) {
  const int n = static_cast<int>(t.cols());
  perm.assign(n, -1);
  scale.assign(n, 0.0);
  std::vector<bool> row_used(n, false);
  for (int j = 0; j < n; ++j) {
    int hit = -1;
    for (int i = 0; i < n; ++i) {
      if (t(i, j) != 0.0) {
        if (hit >= 0) return false;
        hit = i;
      }
    }
    if (hit < 0 || row_used[hit]) return false;
    row_used[hit] = true;
    perm[j] = hit;
    scale[j] = t(hit, j);
  }
  return true;
}

}  // namespace detail

/// Structure constants in the new basis given by the columns of T (in the old basis).
inline StructureTensor change_basis(const StructureTensor& l, const Eigen::MatrixXd& t,
                                    double drop_tol = 1e-13) {
  const int n = l.dim();
  std::vector<BracketEntry> out;

  std::vector<int> perm;
  std::vector<double> scale;
  if (detail::scaled_permutation(t, perm, scale)) {
    std::vector<int> inv(n);
    for (int j = 0; j < n; ++j) inv[perm[j]] = j;
    for (const auto& e : l.nonzeros()) {
      const int i = inv[e.i], j = inv[e.j], k = inv[e.k];
      if (i < j) out.push_back({i, j, k, e.v * scale[i] * scale[j] / scale[k]});
    }
    return StructureTensor::from_entries(n, out);
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(t);
  // Bracket tables of the old basis, one sparse column list per (a, b).
  for (int i = 0; i < n; ++i) {
    // [f_i, e_b] for all b at once: W = sum_a T_{a i} ad(e_a), then [f_i, f_j] = W * T_{:,j}.
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      if (t(a, i) == 0.0) continue;
      auto [lo, hi] = l.first_range(a);
      for (std::size_t s = lo; s < hi; ++s)
        w(l.nonzeros()[s].k, l.nonzeros()[s].j) += t(a, i) * l.nonzeros()[s].v;
    }
    Eigen::MatrixXd img = lu.solve(w * t.rightCols(n - i - 1));
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double v = img(k, j - i - 1);
        if (std::abs(v) > drop_tol) out.push_back({i, j, k, v});
      }
    }
  }
  return StructureTensor::from_entries(n, out);
}

/// Symmetric bilinear form on the algebra, tagged with its provenance.
struct BilinearForm {
  enum class Label { killing, custom_q };
  Eigen::MatrixXd matrix;
  Label label = Label::custom_q;
};

/// Killing form B(a, b) = tr(ad e_a o ad e_b), assembled from the sparsity index.
inline BilinearForm killing_form(const StructureTensor& l) {
  const int n = l.dim();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  // tr(ad_a ad_b) = sum_{j,k} c[a][j][k] c[b][k][j]
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    dense.setZero();
    auto [lo, hi] = l.first_range(a);
    const auto& nz = l.nonzeros();
    for (std::size_t t = lo; t < hi; ++t) dense(nz[t].j, nz[t].k) = nz[t].v;
    for (int bb = a; bb < n; ++bb) {
      double acc = 0.0;
      auto [lo2, hi2] = l.first_range(bb);
      for (std::size_t t = lo2; t < hi2; ++t) acc += nz[t].v * dense(nz[t].k, nz[t].j);
      b(a, bb) = b(bb, a) = acc;
    }
  }
  return BilinearForm{b, BilinearForm::Label::killing};
}

/// max over basis triples of |Q([e_i, e_j], e_k) + Q(e_j, [e_i, e_k])|.
inline double ad_invariance_residual(const StructureTensor& l, const Eigen::MatrixXd& q) {
  const int n = l.dim();
  // R(i): ad(e_i)^T Q + Q ad(e_i) must vanish.
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd ad_i = l.ad(i);
    worst = std::max(worst, (ad_i.transpose() * q + q * ad_i).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace einstab
