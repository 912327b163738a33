#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "einstab/errors.hpp"
#include "einstab/structure_tensor.hpp"

namespace einstab {

enum class Family { su, so, sp };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::su: return "su";
    case Family::so: return "so";
    case Family::sp: return "sp";
  }
  return "?";
}

// Frozen basis conventions (0-based indices a < b throughout):
//
//  su(n), n >= 2, dim n^2-1, traceless anti-Hermitian n x n:
//    S_ab = E_ab - E_ba            (lexicographic in (a,b)),
//    T_ab = i(E_ab + E_ba)         (lexicographic),
//    D_a  = i(E_aa - E_{a+1,a+1}), a = 0..n-2.
//
//  so(n), n >= 3, dim n(n-1)/2, real antisymmetric n x n:
//    A_ab = E_ab - E_ba            (lexicographic).
//
//  sp(n), n >= 1, dim n(2n+1), quaternionic anti-Hermitian realized as
//  2n x 2n complex [[A, B], [-conj(B), conj(A)]], A in u(n), B complex symmetric:
//    S_ab -> diag(S_ab, S_ab), T_ab -> diag(T_ab, -T_ab)  (lexicographic),
//    U_a  -> diag(iE_aa, -iE_aa),
//    P_ab -> [[0, C_ab], [-C_ab, 0]],  Q_ab -> [[0, iC_ab], [iC_ab, 0]],
//    where C_ab = E_ab + E_ba for a < b and C_aa = E_aa (a <= b, lexicographic).
//
// These conventions are load-bearing: golden files and the JSON ingestion format
// both refer to basis indices in this order.

namespace detail {

using Cplx = std::complex<double>;
using SparseCMat = std::map<std::pair<int, int>, Cplx>;

inline void put(SparseCMat& m, int r, int c, Cplx v) {
  if (v != Cplx(0.0, 0.0)) m[{r, c}] += v;
}

inline SparseCMat commutator(const SparseCMat& x, const SparseCMat& y) {
  SparseCMat out;
  for (const auto& [rc1, v1] : x)
    for (const auto& [rc2, v2] : y) {
      if (rc1.second == rc2.first) out[{rc1.first, rc2.second}] += v1 * v2;
      if (rc2.second == rc1.first) out[{rc2.first, rc1.second}] -= v2 * v1;
    }
  for (auto it = out.begin(); it != out.end();)
    it = (std::abs(it->second) < 1e-15) ? out.erase(it) : std::next(it);
  return out;
}

inline double re_inner(const SparseCMat& a, const SparseCMat& b) {
  // Re tr(a b^dagger) over the common support.
  const SparseCMat& small = a.size() <= b.size() ? a : b;
  const SparseCMat& big = a.size() <= b.size() ? b : a;
  double acc = 0.0;
  for (const auto& [rc, v] : small) {
    auto it = big.find(rc);
    if (it != big.end()) acc += std::real(v * std::conj(it->second));
  }
  return acc;
}

inline std::vector<SparseCMat> su_basis(int n) {
  std::vector<SparseCMat> basis;
  const Cplx i(0.0, 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      SparseCMat m;
      put(m, a, b, 1.0);
      put(m, b, a, -1.0);
      basis.push_back(std::move(m));
    }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      SparseCMat m;
      put(m, a, b, i);
      put(m, b, a, i);
      basis.push_back(std::move(m));
    }
  for (int a = 0; a + 1 < n; ++a) {
    SparseCMat m;
    put(m, a, a, i);
    put(m, a + 1, a + 1, -i);
    basis.push_back(std::move(m));
  }
  return basis;
}

inline std::vector<SparseCMat> so_basis(int n) {
  std::vector<SparseCMat> basis;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      SparseCMat m;
      put(m, a, b, 1.0);
      put(m, b, a, -1.0);
      basis.push_back(std::move(m));
    }
  return basis;
}

inline std::vector<SparseCMat> sp_basis(int n) {
  std::vector<SparseCMat> basis;
  const Cplx i(0.0, 1.0);
  auto diag_embed = [&](int a, int b, Cplx v_top, Cplx v_bottom) {
    SparseCMat m;
    put(m, a, b, v_top);
    put(m, n + a, n + b, v_bottom);
    return m;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      SparseCMat m = diag_embed(a, b, 1.0, 1.0);
      SparseCMat m2 = diag_embed(b, a, -1.0, -1.0);
      for (const auto& [rc, v] : m2) m[rc] += v;
      basis.push_back(std::move(m));
    }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      SparseCMat m = diag_embed(a, b, i, -i);
      SparseCMat m2 = diag_embed(b, a, i, -i);
      for (const auto& [rc, v] : m2) m[rc] += v;
      basis.push_back(std::move(m));
    }
  for (int a = 0; a < n; ++a) basis.push_back(diag_embed(a, a, i, -i));
  auto offdiag_embed = [&](int a, int b, Cplx v) {
    // [[0, vC], [conj(v)... ]] with the sp(n) constraint block -conj(B).
    SparseCMat m;
    put(m, a, n + b, v);
    if (a != b) put(m, b, n + a, v);
    put(m, n + a, b, -std::conj(v));
    if (a != b) put(m, n + b, a, -std::conj(v));
    return m;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) basis.push_back(offdiag_embed(a, b, 1.0));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) basis.push_back(offdiag_embed(a, b, i));
  return basis;
}

inline StructureTensor expand_brackets(const std::vector<SparseCMat>& basis) {
  const int dim = static_cast<int>(basis.size());
  int rows = 0;
  for (const auto& m : basis)
    for (const auto& [rc, v] : m) rows = std::max({rows, rc.first + 1, rc.second + 1});
  // position -> basis elements supported there
  std::map<std::pair<int, int>, std::vector<int>> support;
  for (int k = 0; k < dim; ++k)
    for (const auto& [rc, v] : basis[k]) support[rc].push_back(k);

  std::vector<BracketEntry> entries;
  std::vector<int> candidates;
  std::vector<char> seen(dim, 0);
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      SparseCMat br = commutator(basis[a], basis[b]);
      if (br.empty()) continue;
      candidates.clear();
      for (const auto& [rc, v] : br) {
        auto it = support.find(rc);
        if (it == support.end()) throw Error("bracket leaves the basis span");
        for (int k : it->second)
          if (!seen[k]) {
            seen[k] = 1;
            candidates.push_back(k);
          }
      }
      // close under shared support: non-orthogonal chains (the su Cartan)
      // contribute through positions the bracket itself does not touch
      for (std::size_t head = 0; head < candidates.size(); ++head) {
        for (const auto& [rc, v] : basis[candidates[head]]) {
          for (int k : support[rc])
            if (!seen[k]) {
              seen[k] = 1;
              candidates.push_back(k);
            }
        }
      }
      const int m = static_cast<int>(candidates.size());
      Eigen::MatrixXd gram(m, m);
      Eigen::VectorXd rhs(m);
      for (int p = 0; p < m; ++p) {
        rhs[p] = re_inner(br, basis[candidates[p]]);
        for (int q = p; q < m; ++q)
          gram(p, q) = gram(q, p) = re_inner(basis[candidates[p]], basis[candidates[q]]);
      }
      Eigen::VectorXd coef = gram.ldlt().solve(rhs);
      // reconstruction check: the candidates must span the bracket exactly
      SparseCMat rec = br;
      for (int p = 0; p < m; ++p)
        for (const auto& [rc, v] : basis[candidates[p]]) rec[rc] -= coef[p] * v;
      for (const auto& [rc, v] : rec)
        if (std::abs(v) > 1e-10) throw Error("bracket expansion failed");
      for (int p = 0; p < m; ++p) {
        seen[candidates[p]] = 0;
        if (std::abs(coef[p]) > 1e-12) entries.push_back({a, b, candidates[p], coef[p]});
      }
    }
  }
  return StructureTensor::from_entries(dim, entries);
}

}  // namespace detail

/// Matrix realization of the frozen basis (complex dense; for tests and documentation).
inline std::vector<Eigen::MatrixXcd> classical_basis_matrices(Family family, int n) {
  std::vector<detail::SparseCMat> sparse;
  int rows = 0;
  switch (family) {
    case Family::su:
      if (n < 2) throw RangeError("su(n) requires n >= 2");
      sparse = detail::su_basis(n);
      rows = n;
      break;
    case Family::so:
      if (n < 3) throw RangeError("so(n) requires n >= 3");
      sparse = detail::so_basis(n);
      rows = n;
      break;
    case Family::sp:
      if (n < 1) throw RangeError("sp(n) requires n >= 1");
      sparse = detail::sp_basis(n);
      rows = 2 * n;
      break;
  }
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(sparse.size());
  for (const auto& m : sparse) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(rows, rows);
    for (const auto& [rc, v] : m) d(rc.first, rc.second) = v;
    out.push_back(std::move(d));
  }
  return out;
}

/// Compact real form of the classical family in the frozen basis above.
inline StructureTensor build_classical(Family family, int n) {
  switch (family) {
    case Family::su:
      if (n < 2) throw RangeError("su(n) requires n >= 2");
      return detail::expand_brackets(detail::su_basis(n));
    case Family::so:
      if (n < 3) throw RangeError("so(n) requires n >= 3");
      return detail::expand_brackets(detail::so_basis(n));
    case Family::sp:
      if (n < 1) throw RangeError("sp(n) requires n >= 1");
      return detail::expand_brackets(detail::sp_basis(n));
  }
  throw RangeError("unknown family");
}

inline int classical_dim(Family family, int n) {
  switch (family) {
    case Family::su: return n * n - 1;
    case Family::so: return n * (n - 1) / 2;
    case Family::sp: return n * (2 * n + 1);
  }
  return 0;
}

}  // namespace einstab
