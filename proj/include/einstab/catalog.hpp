#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "einstab/classical.hpp"
#include "einstab/curvature.hpp"
#include "einstab/errors.hpp"
#include "einstab/isotropy.hpp"
#include "einstab/lichnerowicz.hpp"
#include "einstab/stability.hpp"

namespace einstab {

// ---------------------------------------------------------------------------
// The three standard block families: SU(nk)/S(U(k)^n), Sp(nk)/Sp(k)^n,
// SO(nk)/S(O(k)^n), n >= 3 (k >= 1, 1, 3), with the standard metric Q = -Kil.
// ---------------------------------------------------------------------------

struct FamilySpec {
  Family family = Family::su;
  int n = 3;
  int k = 1;
  // derived closed forms
  int d = 0;           // summand dimension (2k^2, 4k^2, k^2)
  double c_over_d = 0.0;
  double two_rho = 0.0;
  double lambda_p = 0.0;
  double lambda_p_max = 0.0;
  int mult_lambda_p = 0;
  int mult_lambda_max = 0;

  int r() const { return n * (n - 1) / 2; }
  std::string name() const {
    std::string f = family == Family::su ? "SU" : family == Family::sp ? "Sp" : "SO";
    std::string iso = family == Family::su   ? "S(U(" + std::to_string(k) + ")^" + std::to_string(n) + ")"
                      : family == Family::sp ? "Sp(" + std::to_string(k) + ")^" + std::to_string(n)
                                             : "S(O(" + std::to_string(k) + ")^" + std::to_string(n) + ")";
    return f + "(" + std::to_string(n * k) + ")/" + iso;
  }
};

inline FamilySpec make_family_spec(Family family, int n, int k) {
  if (n < 3) throw RangeError("block families require n >= 3");
  if (k < 1 || (family == Family::so && k < 3))
    throw RangeError("block size k out of range for the family");
  FamilySpec s;
  s.family = family;
  s.n = n;
  s.k = k;
  const int nk = n * k;
  switch (family) {
    case Family::su:
      s.d = 2 * k * k;
      s.c_over_d = 1.0 / (2.0 * n);
      break;
    case Family::sp:
      s.d = 4 * k * k;
      s.c_over_d = k / (2.0 * (nk + 1.0));
      break;
    case Family::so:
      s.d = k * k;
      s.c_over_d = k / (2.0 * (nk - 2.0));
      break;
  }
  s.two_rho = 1.0 - s.c_over_d * (n - 2);
  if (n == 3) {
    s.lambda_p = s.lambda_p_max = 3.0 * s.c_over_d;
    s.mult_lambda_p = 2;
    s.mult_lambda_max = 2;
  } else {
    s.lambda_p = n * s.c_over_d;
    s.lambda_p_max = 2.0 * (n - 1) * s.c_over_d;
    s.mult_lambda_p = n - 1;
    s.mult_lambda_max = n * (n - 3) / 2;
  }
  return s;
}

/// Closed-form stability report of the standard metric, fed through the same
/// classifier as the numeric pipeline.
inline StabilityReport family_analytic(const FamilySpec& s, double eig_tol = 1e-6) {
  const int dim_w = s.r() - 1;
  Eigen::VectorXd diag(dim_w);
  int pos = 0;
  for (int i = 0; i < s.mult_lambda_p; ++i) diag[pos++] = s.lambda_p;
  if (s.n > 3)
    for (int i = 0; i < s.mult_lambda_max; ++i) diag[pos++] = s.lambda_p_max;
  if (pos != dim_w) throw Error("family spectrum multiplicities do not fill W");
  return classify(Eigen::MatrixXd(diag.asDiagonal()), s.two_rho / 2.0, eig_tol);
}

namespace detail {

// natural su(N) basis positions
inline int pair_index(int nn, int a, int b) { return a * nn - a * (a + 1) / 2 + (b - a - 1); }

struct FamilyLayout {
  std::vector<int> k_indices;
  std::vector<std::vector<int>> p_groups;        // natural-basis slots per block pair, lex
  Eigen::MatrixXd adaptation;                    // identity except the su Cartan reorg
};

inline FamilyLayout family_layout(Family family, int n, int k) {
  const int nn = n * k;
  const int dim = classical_dim(family, nn);
  FamilyLayout lay;
  lay.adaptation = Eigen::MatrixXd::Identity(dim, dim);
  auto block = [k](int x) { return x / k; };
  const int npairs = n * (n - 1) / 2;
  lay.p_groups.assign(npairs, {});
  auto group_of = [n](int bi, int bj) {
    return bi * n - bi * (bi + 1) / 2 + (bj - bi - 1);
  };

  auto route_pair_slots = [&](int base) {
    // slots base + pair_index(a, b) for a < b
    for (int a = 0; a < nn; ++a)
      for (int b = a + 1; b < nn; ++b) {
        const int slot = base + pair_index(nn, a, b);
        if (block(a) == block(b))
          lay.k_indices.push_back(slot);
        else
          lay.p_groups[group_of(block(a), block(b))].push_back(slot);
      }
  };

  switch (family) {
    case Family::su: {
      route_pair_slots(0);                       // S_ab
      route_pair_slots(nn * (nn - 1) / 2);       // T_ab
      // Cartan: in-block D_a stay; block-boundary columns become the traceless
      // block-trace combinations, so the whole Cartan lands in k.
      const int cartan_base = nn * (nn - 1);
      for (int a = 0; a + 1 < nn; ++a) lay.k_indices.push_back(cartan_base + a);
      for (int j = 0; j + 1 < n; ++j) {
        const int col = cartan_base + j * k + k - 1;  // boundary D slot of block j
        lay.adaptation.col(col).setZero();
        int alpha = 0;
        for (int a = 0; a + 1 < nn; ++a) {
          if (block(a) == j) ++alpha;
          if (block(a) == j + 1) --alpha;
          if (alpha != 0) lay.adaptation(cartan_base + a, col) = alpha;
        }
      }
      break;
    }
    case Family::so: {
      route_pair_slots(0);  // A_ab
      break;
    }
    case Family::sp: {
      const int c2 = nn * (nn - 1) / 2;
      route_pair_slots(0);    // S_ab
      route_pair_slots(c2);   // T_ab
      for (int a = 0; a < nn; ++a) lay.k_indices.push_back(2 * c2 + a);  // U_a
      // symmetric off-diagonal blocks P, Q at a <= b
      const int sym_base = 2 * c2 + nn;
      const int symn = nn * (nn + 1) / 2;
      for (int part = 0; part < 2; ++part) {
        int slot = sym_base + part * symn;
        for (int a = 0; a < nn; ++a)
          for (int b = a; b < nn; ++b, ++slot) {
            if (block(a) == block(b))
              lay.k_indices.push_back(slot);
            else
              lay.p_groups[group_of(block(a), block(b))].push_back(slot);
          }
      }
      break;
    }
  }
  return lay;
}

}  // namespace detail

/// Standard-metric model of the block family, with the block-pair summand
/// labels tracked from the construction.
struct FamilyModel {
  ReductiveSpace space;
  std::vector<std::vector<int>> summand_groups;  // working p indices per pair, lex order
};

inline FamilyModel build_family_model(const FamilySpec& spec) {
  const int nn = spec.n * spec.k;
  StructureTensor g = build_classical(spec.family, nn);
  detail::FamilyLayout lay = detail::family_layout(spec.family, spec.n, spec.k);
  if (spec.family == Family::su) g = change_basis(g, lay.adaptation);

  BilinearForm q = killing_form(g);
  q.matrix = -q.matrix;
  FamilyModel model;
  model.space = reductive_split(g, lay.k_indices, q);

  // slot -> working p index: the complement keeps ascending slot order
  std::vector<int> p_index(g.dim(), -1);
  {
    std::vector<char> in_k(g.dim(), 0);
    for (int a : lay.k_indices) in_k[a] = 1;
    int next = 0;
    for (int s = 0; s < g.dim(); ++s)
      if (!in_k[s]) p_index[s] = next++;
  }
  for (const auto& group : lay.p_groups) {
    std::vector<int> working;
    working.reserve(group.size());
    for (int s : group) working.push_back(p_index[s]);
    model.summand_groups.push_back(std::move(working));
  }
  return model;
}

/// Numeric pipeline result for one family instance.
struct FamilyNumericResult {
  FamilySpec spec;
  StabilityReport report;
  CurvaturePack pack;
  IsotropyDecomposition decomposition;
  double method_max_diff = 0.0;      // pairwise max entry diff, 3 assembly routes
  double johnson_residual = 0.0;     // [L_p] vs (c/d)(2(n-2)I - Adj(J(n,2,1)))
  double b_max_err = 0.0;            // max |b_k - 1|
  double jacobi_residual = 0.0;
};

inline Eigen::MatrixXd johnson_adjacency(int n) {
  if (n < 3) throw RangeError("Johnson graph J(n,2,1) requires n >= 3");
  const int v = n * (n - 1) / 2;
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(v, v);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) pairs.push_back({a, b});
  for (int x = 0; x < v; ++x)
    for (int y = x + 1; y < v; ++y) {
      auto [a, b] = pairs[x];
      auto [c, d] = pairs[y];
      const int common = (a == c) + (a == d) + (b == c) + (b == d);
      if (common == 1) adj(x, y) = adj(y, x) = 1.0;
    }
  return adj;
}

/// Closed-form Johnson graph spectrum, cross-checked against a dense
/// diagonalization of the explicitly built adjacency matrix.
inline std::vector<EigenCluster> johnson_graph_spectrum(int n) {
  std::vector<EigenCluster> out;
  if (n == 3) {
    out = {{-1.0, 2}, {2.0, 1}};
  } else {
    out = {{-2.0, n * (n - 3) / 2}, {double(n - 4), n - 1}, {2.0 * (n - 2), 1}};
  }
  Eigen::MatrixXd adj = johnson_adjacency(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adj);
  std::vector<EigenCluster> numeric = cluster_eigenvalues(es.eigenvalues(), 1e-8 * n);
  if (numeric.size() != out.size()) throw Error("Johnson spectrum cluster count mismatch");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (numeric[i].multiplicity != out[i].multiplicity ||
        std::abs(numeric[i].value - out[i].value) > 1e-10)
      throw Error("Johnson spectrum does not match the closed form");
  }
  return out;
}

inline FamilyNumericResult family_numeric(const FamilySpec& spec,
                                          std::uint64_t seed = default_seed(),
                                          double eig_tol = 1e-6) {
  if (spec.n * spec.k > 12) throw RangeError("family_numeric supports nk <= 12");
  FamilyNumericResult res;
  res.spec = spec;
  FamilyModel model = build_family_model(spec);
  const ReductiveSpace& r = model.space;
  res.jacobi_residual = r.algebra.jacobi_residual();
  if (res.jacobi_residual > 1e-10) throw Error("Jacobi residual too large after split");

  IsotropyDecomposition dec = labeled_decomposition(r, model.summand_groups);
  if (!dec.multiplicity_free) throw Error("family model failed the multiplicity-free check");
  // cross-validate against the generic decomposition where it is tractable
  if (sym_dim(r.p_dim) <= 2500) {
    InvariantSubspace s = invariant_sym_space(r, seed);
    IsotropyDecomposition generic = isotropy_decomposition(r, s, seed);
    if (generic.r() != dec.r()) throw Error("generic and labeled summand counts disagree");
    for (int a = 0; a < dec.r(); ++a) {
      double best = 1e300;
      Eigen::MatrixXd p = dec.projector(a);
      for (int b = 0; b < generic.r(); ++b)
        best = std::min(best, (p - generic.projector(b)).cwiseAbs().maxCoeff());
      if (best > 1e-8) throw Error("generic and labeled summands disagree");
    }
  }
  for (double b : dec.b_constants) res.b_max_err = std::max(res.b_max_err, std::abs(b - 1.0));
  if (res.b_max_err > 1e-8) throw Error("standard metric must have b_k = 1");

  res.pack = curvature_pack(r);
  if (res.pack.einstein_residual > 1e-8) throw NotEinstein("standard family metric not Einstein");

  InvariantSubspace pbasis = projector_sym_space(dec, r.p_dim);
  LichnerowiczMatrix general = lich_general(r, pbasis);
  LichnerowiczMatrix nat = lich_naturally_reductive(r, pbasis);
  StructuralConstants sc = structural_constants(r, dec);
  LichnerowiczMatrix strc = lich_multiplicity_free(sc, dec);
  res.method_max_diff = std::max((general.matrix - nat.matrix).cwiseAbs().maxCoeff(),
                                 (general.matrix - strc.matrix).cwiseAbs().maxCoeff());
  res.method_max_diff =
      std::max(res.method_max_diff, (nat.matrix - strc.matrix).cwiseAbs().maxCoeff());

  // Johnson-graph identity in the lexicographic block-pair order
  Eigen::MatrixXd expect =
      spec.c_over_d * (2.0 * (spec.n - 2) * Eigen::MatrixXd::Identity(spec.r(), spec.r()) -
                       johnson_adjacency(spec.n));
  res.johnson_residual = (strc.matrix - expect).cwiseAbs().maxCoeff();

  InvariantSubspace trivial = trivial_variation_space(r, seed);
  if (trivial.dim() != 0) throw Error("naturally reductive model has trivial variations");
  InvariantSubspace w = tt_space(r, pbasis, trivial);
  res.report = classify(restrict_to_w(strc, w), res.pack.rho, eig_tol);
  res.decomposition = std::move(dec);
  return res;
}

// ---------------------------------------------------------------------------
// Jensen deformations g_t = -Kil_h|_a + t(-Kil_h)|_k on a simple H, viewed as
// naturally reductive spaces of G = H x K. Shipped embeddings only.
// ---------------------------------------------------------------------------

enum class JensenEmbedding { so6_so3so3, so8_so4so4, sp2_sp1sp1 };

inline const char* jensen_name(JensenEmbedding e) {
  switch (e) {
    case JensenEmbedding::so6_so3so3: return "SO(6)/SO(3)xSO(3)";
    case JensenEmbedding::so8_so4so4: return "SO(8)/SO(4)xSO(4)";
    case JensenEmbedding::sp2_sp1sp1: return "Sp(2)/Sp(1)xSp(1)";
  }
  return "?";
}

struct JensenSpec {
  std::string name;
  int d = 0;      // dim a
  int k_dim = 0;  // dim k
  int r = 0;      // simple ideals of k
  std::vector<int> d_j;
  double c = 0.0;
  double t_e = 0.0;
  double two_rho = 0.0;
  double lambda_p = 0.0;
  double lambda_p_max = 0.0;
};

inline JensenSpec make_jensen_spec(std::string name, int d, int k_dim, std::vector<int> d_j,
                                   double c) {
  JensenSpec s;
  s.name = std::move(name);
  s.d = d;
  s.k_dim = k_dim;
  s.d_j = std::move(d_j);
  s.r = static_cast<int>(s.d_j.size());
  s.c = c;
  if (!(c < double(d + 2 * k_dim) / double(2 * d + 2 * k_dim)))
    throw RangeError("Killing ratio violates c < (d+2k)/(2d+2k), so t_E >= 1");
  s.t_e = d * c / ((d + 2.0 * k_dim) * (1.0 - c));
  s.two_rho = c / (2.0 * s.t_e) + (1.0 - c) * s.t_e / 2.0;
  s.lambda_p = s.r >= 2 ? s.t_e * (1.0 - c) : s.t_e * (1.0 - c) * (1.0 + double(k_dim) / d);
  s.lambda_p_max = s.t_e * (1.0 - c) * (1.0 + double(k_dim) / d);
  return s;
}

inline JensenSpec jensen_reference_spec(JensenEmbedding e) {
  switch (e) {
    case JensenEmbedding::so6_so3so3:
      return make_jensen_spec(jensen_name(e), 9, 6, {3, 3}, 0.25);
    case JensenEmbedding::so8_so4so4:
      return make_jensen_spec(jensen_name(e), 16, 12, {3, 3, 3, 3}, 1.0 / 3.0);
    case JensenEmbedding::sp2_sp1sp1:
      return make_jensen_spec(jensen_name(e), 4, 6, {3, 3}, 2.0 / 3.0);
  }
  throw RangeError("unknown embedding");
}

inline StabilityReport jensen_analytic(const JensenSpec& s, double eig_tol = 1e-6) {
  Eigen::VectorXd diag(s.r);
  for (int j = 0; j + 1 < s.r; ++j) diag[j] = s.t_e * (1.0 - s.c);
  diag[s.r - 1] = s.t_e * (1.0 - s.c) * (1.0 + double(s.k_dim) / s.d);
  return classify(Eigen::MatrixXd(diag.asDiagonal()), s.two_rho / 2.0, eig_tol);
}

namespace detail {

inline std::vector<int> block_subalgebra_indices(Family f, int nn, int split) {
  std::vector<int> idx;
  auto side = [split](int x) { return x < split ? 0 : 1; };
  switch (f) {
    case Family::so: {
      int pos = 0;
      for (int a = 0; a < nn; ++a)
        for (int b = a + 1; b < nn; ++b, ++pos)
          if (side(a) == side(b)) idx.push_back(pos);
      break;
    }
    case Family::sp: {
      const int c2 = nn * (nn - 1) / 2;
      int pos = 0;
      for (int a = 0; a < nn; ++a)
        for (int b = a + 1; b < nn; ++b, ++pos)
          if (side(a) == side(b)) {
            idx.push_back(pos);
            idx.push_back(c2 + pos);
          }
      for (int a = 0; a < nn; ++a) idx.push_back(2 * c2 + a);
      const int sym_base = 2 * c2 + nn;
      const int symn = nn * (nn + 1) / 2;
      int spos = 0;
      for (int a = 0; a < nn; ++a)
        for (int b = a; b < nn; ++b, ++spos)
          if (side(a) == side(b)) {
            idx.push_back(sym_base + spos);
            idx.push_back(sym_base + symn + spos);
          }
      break;
    }
    case Family::su:
      throw RangeError("no su block embedding is shipped for Jensen metrics");
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct JensenHk {
  StructureTensor h;
  std::vector<int> k_indices;
  int d = 0;
};

inline JensenHk jensen_algebra(JensenEmbedding e) {
  JensenHk out;
  switch (e) {
    case JensenEmbedding::so6_so3so3:
      out.h = build_classical(Family::so, 6);
      out.k_indices = block_subalgebra_indices(Family::so, 6, 3);
      break;
    case JensenEmbedding::so8_so4so4:
      out.h = build_classical(Family::so, 8);
      out.k_indices = block_subalgebra_indices(Family::so, 8, 4);
      break;
    case JensenEmbedding::sp2_sp1sp1:
      out.h = build_classical(Family::sp, 2);
      out.k_indices = block_subalgebra_indices(Family::sp, 2, 1);
      break;
  }
  out.d = out.h.dim() - static_cast<int>(out.k_indices.size());
  return out;
}

}  // namespace detail

/// The deformed model at an arbitrary deformation parameter t.
inline ReductiveSpace build_jensen_model(JensenEmbedding e, double t) {
  detail::JensenHk hk = detail::jensen_algebra(e);
  return jensen_deformed_space(hk.h, hk.k_indices, t);
}

struct JensenNumericResult {
  JensenSpec measured;               // c, t_e, two_rho, ... extracted numerically
  StabilityReport report;            // at t = t_e
  double ijk_max_err = 0.0;          // [jjj], [jaa] vs closed forms at t_e
  double einstein_residual = 0.0;
  double method_max_diff = 0.0;
};

/// Probes the model at t0 = 1/3 to measure the Killing ratio c and the summand
/// layout, derives t_E from them, rebuilds at t_E and runs the full pipeline.
inline JensenNumericResult jensen_numeric(JensenEmbedding e,
                                          std::uint64_t seed = default_seed(),
                                          double eig_tol = 1e-6) {
  detail::JensenHk hk = detail::jensen_algebra(e);
  const double t0 = 1.0 / 3.0;

  auto measure = [&](const ReductiveSpace& r, double t, JensenSpec& spec) {
    InvariantSubspace s = invariant_sym_space(r, seed);
    IsotropyDecomposition dec = isotropy_decomposition(r, s, seed);
    int a_idx = -1;
    for (int j = 0; j < dec.r(); ++j)
      if (dec.dims[j] == hk.d) {
        if (a_idx >= 0) throw Error("ambiguous a-summand (matching dimensions)");
        a_idx = j;
      }
    if (a_idx < 0) throw Error("a-summand not found in the decomposition");
    std::vector<double> cs;
    std::vector<int> dj;
    for (int j = 0; j < dec.r(); ++j) {
      if (j == a_idx) continue;
      const double b = dec.b_constants[j];
      cs.push_back((b * t - t * t) / ((1.0 - t) * (1.0 - t)));
      dj.push_back(dec.dims[j]);
    }
    double cmin = cs[0], cmax = cs[0];
    for (double c : cs) {
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    if (cmax - cmin > 1e-8) throw NonUniformC("ideal Killing ratios differ across k-summands");
    spec = make_jensen_spec(jensen_name(e), hk.d, r.p_dim - hk.d, dj, 0.5 * (cmin + cmax));
    return std::pair{dec, a_idx};
  };

  JensenSpec probe_spec;
  {
    ReductiveSpace probe = jensen_deformed_space(hk.h, hk.k_indices, t0);
    measure(probe, t0, probe_spec);
  }

  JensenNumericResult res;
  ReductiveSpace r = jensen_deformed_space(hk.h, hk.k_indices, probe_spec.t_e);
  auto [dec, a_idx] = measure(r, probe_spec.t_e, res.measured);
  if (!dec.multiplicity_free) throw Error("Jensen isotropy is not multiplicity-free");

  CurvaturePack pack = curvature_pack(r);
  res.einstein_residual = pack.einstein_residual;
  if (pack.einstein_residual > 1e-8)
    throw NotEinstein("numeric t_E did not produce an Einstein metric");
  res.measured.two_rho = 2.0 * pack.rho;

  StructuralConstants sc = structural_constants(r, dec);
  const double t = res.measured.t_e, c = res.measured.c;
  for (int j = 0; j < dec.r(); ++j) {
    if (j == a_idx) continue;
    const double dj = dec.dims[j];
    const double jjj = (2.0 * t - 1.0) * (2.0 * t - 1.0) / t * c * dj;
    const double jaa = t * (1.0 - c) * dj;
    res.ijk_max_err = std::max(res.ijk_max_err, std::abs(sc.at(j, j, j) - jjj));
    res.ijk_max_err = std::max(res.ijk_max_err, std::abs(sc.at(j, a_idx, a_idx) - jaa));
  }

  InvariantSubspace pbasis = projector_sym_space(dec, r.p_dim);
  LichnerowiczMatrix general = lich_general(r, pbasis);
  LichnerowiczMatrix nat = lich_naturally_reductive(r, pbasis);
  LichnerowiczMatrix strc = lich_multiplicity_free(sc, dec);
  res.method_max_diff = std::max((general.matrix - nat.matrix).cwiseAbs().maxCoeff(),
                                 (general.matrix - strc.matrix).cwiseAbs().maxCoeff());

  InvariantSubspace w = tt_space(r, pbasis, trivial_variation_space(r, seed));
  res.report = classify(restrict_to_w(strc, w), pack.rho, eig_tol);
  return res;
}

// ---------------------------------------------------------------------------
// Killing (bi-invariant) metrics on the compact simple classical groups.
// ---------------------------------------------------------------------------

struct KillingReportResult {
  Family family = Family::su;
  int n = 0;
  double lambda_tau = 0.0;  // first positive Casimir eigenvalue on sym(g)
  StabilityReport report;
  double einstein_residual = 0.0;
};

inline KillingReportResult killing_metric_report(Family family, int n,
                                                 std::uint64_t seed = default_seed(),
                                                 double eig_tol = 1e-6) {
  const int dim = classical_dim(family, n);
  if (dim > 45) throw RangeError("Killing catalog covers dim g <= 45");
  StructureTensor g = build_classical(family, n);
  BilinearForm q = killing_form(g);
  q.matrix = -q.matrix;
  ReductiveSpace r = reductive_split(g, {}, q);
  CurvaturePack pack = curvature_pack(r);

  LichnerowiczMatrix cas = casimir_sym(g);
  KillingReportResult res;
  res.family = family;
  res.n = n;
  res.lambda_tau = first_positive_eigenvalue(cas.matrix);
  res.einstein_residual = pack.einstein_residual;

  InvariantSubspace s = invariant_sym_space(r, seed);
  InvariantSubspace w = tt_space(r, s, trivial_variation_space(r, seed));
  LichnerowiczMatrix lp{LichnerowiczMatrix::Method::naturally_reductive, s, 0.5 * cas.matrix};
  res.report = classify(restrict_to_w(lp, w), pack.rho, eig_tol);
  return res;
}

// ---------------------------------------------------------------------------
// Table runners: reference values vs the numeric pipeline, row by row.
// ---------------------------------------------------------------------------

struct Table1Row {
  Family family = Family::su;
  int n = 0;
  double lambda_tau_ref = 0.0;
  double lambda_tau = 0.0;
  Classification stab_ref = Classification::g_stable;
  Classification stab = Classification::g_stable;
  int nullity_ref = -1;  // checked only for su(n)
  int nullity = 0;
  int coindex_lower_ref = -1;  // checked only for sp(n)
  int coindex = 0;
  double seconds = 0.0;

  bool pass_lambda() const { return std::abs(lambda_tau - lambda_tau_ref) <= 1e-6; }
  bool pass_stab() const {
    return stab == stab_ref && (nullity_ref < 0 || nullity == nullity_ref) &&
           (coindex_lower_ref < 0 || coindex >= coindex_lower_ref);
  }
  bool pass() const { return pass_lambda() && pass_stab(); }
  std::string name() const {
    return std::string(family_name(family)) + "(" + std::to_string(n) + ")";
  }
};

inline std::vector<Table1Row> run_table1(std::uint64_t seed = default_seed()) {
  struct Ref {
    Family f;
    int n;
    double lambda;
    Classification stab;
  };
  const std::vector<Ref> refs = {
      {Family::su, 2, 3.0, Classification::g_stable},
      {Family::su, 3, 1.0, Classification::g_neutrally_stable},
      {Family::su, 4, 1.0, Classification::g_neutrally_stable},
      {Family::su, 5, 1.0, Classification::g_neutrally_stable},
      {Family::so, 7, 7.0 / 5.0, Classification::g_stable},
      {Family::so, 8, 4.0 / 3.0, Classification::g_stable},
      {Family::so, 9, 9.0 / 7.0, Classification::g_stable},
      {Family::sp, 2, 2.0 / 3.0, Classification::g_unstable},
      {Family::sp, 3, 3.0 / 4.0, Classification::g_unstable},
  };
  std::vector<Table1Row> rows;
  for (const auto& ref : refs) {
    Table1Row row;
    row.family = ref.f;
    row.n = ref.n;
    row.lambda_tau_ref = ref.lambda;
    row.stab_ref = ref.stab;
    if (ref.f == Family::su && ref.n >= 3) row.nullity_ref = ref.n * ref.n - 1;
    if (ref.f == Family::sp) row.coindex_lower_ref = ref.n * (2 * ref.n - 1) - 1;
    const auto start = std::chrono::steady_clock::now();
    KillingReportResult res = killing_metric_report(ref.f, ref.n, seed);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.lambda_tau = res.lambda_tau;
    row.stab = res.report.classification;
    row.nullity = res.report.nullity;
    row.coindex = res.report.coindex;
    rows.push_back(row);
  }
  return rows;
}

struct Table2Row {
  FamilySpec spec;
  CriticalPointType crit_ref = CriticalPointType::saddle;
  int coindex_ref = 0;
  CriticalPointType crit = CriticalPointType::saddle;
  int coindex = 0;
  double eig_err = 0.0;
  double method_max_diff = 0.0;
  double johnson_residual = 0.0;
  double seconds = 0.0;
  std::string error;

  bool pass() const {
    return error.empty() && crit == crit_ref && coindex == coindex_ref && eig_err <= 1e-8;
  }
};

inline std::vector<Table2Row> table2_rows() {
  struct Ref {
    Family f;
    int n, k;
    CriticalPointType crit;
    int coindex;
  };
  const std::vector<Ref> refs = {
      {Family::su, 3, 1, CriticalPointType::local_min, 2},
      {Family::su, 3, 2, CriticalPointType::local_min, 2},
      {Family::su, 4, 1, CriticalPointType::degenerate, 3},
      {Family::su, 4, 2, CriticalPointType::degenerate, 3},
      {Family::su, 5, 1, CriticalPointType::saddle, 4},
      {Family::sp, 3, 1, CriticalPointType::local_min, 2},
      {Family::sp, 3, 2, CriticalPointType::local_min, 2},
      {Family::sp, 4, 1, CriticalPointType::local_min, 5},
      {Family::sp, 5, 1, CriticalPointType::local_min, 9},
      {Family::sp, 5, 2, CriticalPointType::degenerate, 4},
      {Family::sp, 6, 1, CriticalPointType::degenerate, 5},
      {Family::so, 3, 3, CriticalPointType::local_min, 2},
      {Family::so, 4, 3, CriticalPointType::saddle, 3},
  };
  std::vector<Table2Row> rows;
  for (const auto& ref : refs) {
    Table2Row row;
    row.spec = make_family_spec(ref.f, ref.n, ref.k);
    row.crit_ref = ref.crit;
    row.coindex_ref = ref.coindex;
    rows.push_back(row);
  }
  return rows;
}

inline void run_table2_row(Table2Row& row, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  try {
    FamilyNumericResult num = family_numeric(row.spec, seed);
    StabilityReport ana = family_analytic(row.spec);
    row.crit = num.report.critical_point_type;
    row.coindex = num.report.coindex;
    row.method_max_diff = num.method_max_diff;
    row.johnson_residual = num.johnson_residual;
    double err = std::abs(num.report.two_rho - ana.two_rho);
    if (num.report.spectrum_on_w.size() != ana.spectrum_on_w.size()) {
      err = 1.0;
    } else {
      for (std::size_t i = 0; i < ana.spectrum_on_w.size(); ++i) {
        err = std::max(err, std::abs(num.report.spectrum_on_w[i].value -
                                     ana.spectrum_on_w[i].value));
        if (num.report.spectrum_on_w[i].multiplicity != ana.spectrum_on_w[i].multiplicity)
          err = std::max(err, 1.0);
      }
    }
    row.eig_err = err;
  } catch (const std::exception& ex) {
    row.error = ex.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline std::vector<Table2Row> run_table2(int jobs = 1, std::uint64_t seed = default_seed()) {
  std::vector<Table2Row> rows = table2_rows();
  if (jobs <= 1) {
    for (auto& row : rows) run_table2_row(row, seed);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      run_table2_row(rows[i], seed);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return rows;
}

struct JensenRow {
  JensenEmbedding emb = JensenEmbedding::so6_so3so3;
  JensenSpec ref;
  JensenNumericResult num;
  double t_e_err = 0.0;
  double two_rho_err = 0.0;
  double spec_err = 0.0;
  double seconds = 0.0;
  std::string error;

  bool pass() const {
    return error.empty() && t_e_err <= 1e-8 && two_rho_err <= 1e-8 && spec_err <= 1e-8 &&
           num.ijk_max_err <= 1e-8 && num.report.coindex == ref.r &&
           num.report.classification == Classification::g_strongly_unstable &&
           num.report.critical_point_type == CriticalPointType::local_min;
  }
};

inline std::vector<JensenRow> run_jensen(std::uint64_t seed = default_seed()) {
  std::vector<JensenRow> rows;
  for (JensenEmbedding e : {JensenEmbedding::so6_so3so3, JensenEmbedding::so8_so4so4,
                            JensenEmbedding::sp2_sp1sp1}) {
    JensenRow row;
    row.emb = e;
    row.ref = jensen_reference_spec(e);
    const auto start = std::chrono::steady_clock::now();
    try {
      row.num = jensen_numeric(e, seed);
      row.t_e_err = std::abs(row.num.measured.t_e - row.ref.t_e);
      row.two_rho_err = std::abs(row.num.measured.two_rho - row.ref.two_rho);
      StabilityReport ana = jensen_analytic(row.ref);
      double err = 0.0;
      if (row.num.report.spectrum_on_w.size() != ana.spectrum_on_w.size()) {
        err = 1.0;
      } else {
        for (std::size_t i = 0; i < ana.spectrum_on_w.size(); ++i) {
          err = std::max(err, std::abs(row.num.report.spectrum_on_w[i].value -
                                       ana.spectrum_on_w[i].value));
          if (row.num.report.spectrum_on_w[i].multiplicity != ana.spectrum_on_w[i].multiplicity)
            err = std::max(err, 1.0);
        }
      }
      row.spec_err = err;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace einstab
