#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "einstab/curvature.hpp"
#include "einstab/errors.hpp"
#include "einstab/lichnerowicz.hpp"

namespace einstab {

enum class Classification {
  g_stable,
  g_unstable,
  g_neutrally_stable,
  g_strongly_unstable,
  g_degenerate
};

enum class CriticalPointType { local_max, local_min, saddle, degenerate };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::g_stable: return "G-stable";
    case Classification::g_unstable: return "G-unstable";
    case Classification::g_neutrally_stable: return "G-neutrally stable";
    case Classification::g_strongly_unstable: return "G-strongly unstable";
    case Classification::g_degenerate: return "G-degenerate";
  }
  return "?";
}

inline const char* critical_point_name(CriticalPointType c) {
  switch (c) {
    case CriticalPointType::local_max: return "local maximum";
    case CriticalPointType::local_min: return "local minimum";
    case CriticalPointType::saddle: return "saddle";
    case CriticalPointType::degenerate: return "degenerate";
  }
  return "?";
}

/// Spectrum of L_p on W against the threshold 2 rho, with the stability verdict.
struct StabilityReport {
  double rho = 0.0;
  double two_rho = 0.0;
  std::vector<EigenCluster> spectrum_on_w;
  double lambda_p = std::numeric_limits<double>::quiet_NaN();
  double lambda_p_max = std::numeric_limits<double>::quiet_NaN();
  int nullity = 0;
  int coindex = 0;
  int dim_w = 0;
  Classification classification = Classification::g_stable;
  CriticalPointType critical_point_type = CriticalPointType::local_max;
};

/// Gram-projected matrix W^t L W of the operator on a subspace of its basis span.
inline Eigen::MatrixXd restrict_to_w(const LichnerowiczMatrix& l, const InvariantSubspace& w) {
  if (w.p_dim != l.basis.p_dim) throw BasisMismatch("operator and subspace live on different p");
  const int m = w.dim();
  Eigen::MatrixXd c(l.basis.dim(), m);
  for (int j = 0; j < m; ++j) c.col(j) = l.basis.coordinates(w.ops[j]);  // throws BasisMismatch
  return symmetrize(c.transpose() * l.matrix * c);
}

/// Eigenvalue clustering and classification against 2 rho. `tol` is relative:
/// clustering uses tol * ||L||, ties at |lambda - 2 rho| <= tol * max(1, |2 rho|)
/// count into the nullity rather than being guessed to a side.
inline StabilityReport classify(const Eigen::MatrixXd& l_on_w, double rho, double tol = 1e-6) {
  if (tol <= 0.0) throw RangeError("tolerance must be positive");
  StabilityReport rep;
  rep.rho = rho;
  rep.two_rho = 2.0 * rho;
  rep.dim_w = static_cast<int>(l_on_w.rows());
  if (rep.dim_w == 0) {
    rep.classification = Classification::g_stable;
    rep.critical_point_type = CriticalPointType::local_max;
    return rep;
  }
  if (symmetry_residual(l_on_w) > 1e-8 * std::max(1.0, l_on_w.cwiseAbs().maxCoeff()))
    throw Error("restricted operator is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l_on_w);
  const double scale =
      std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(rep.dim_w - 1)));
  rep.spectrum_on_w = cluster_eigenvalues(es.eigenvalues(), tol * std::max(1.0, scale));
  rep.lambda_p = rep.spectrum_on_w.front().value;
  rep.lambda_p_max = rep.spectrum_on_w.back().value;

  const double near = tol * std::max(1.0, std::abs(rep.two_rho));
  int above = 0;
  for (const auto& c : rep.spectrum_on_w) {
    if (std::abs(c.value - rep.two_rho) <= near)
      rep.nullity += c.multiplicity;
    else if (c.value < rep.two_rho)
      rep.coindex += c.multiplicity;
    else
      above += c.multiplicity;
  }

  if (rep.nullity > 0) {
    rep.classification = rep.coindex > 0 ? Classification::g_degenerate
                                         : Classification::g_neutrally_stable;
    rep.critical_point_type = CriticalPointType::degenerate;
  } else if (above == 0) {
    rep.classification = Classification::g_strongly_unstable;
    rep.critical_point_type = CriticalPointType::local_min;
  } else if (rep.coindex == 0) {
    rep.classification = Classification::g_stable;
    rep.critical_point_type = CriticalPointType::local_max;
  } else {
    rep.classification = Classification::g_unstable;
    rep.critical_point_type = CriticalPointType::saddle;
  }
  return rep;
}

/// k1 (+) k2 and p1 (+) p2 of two models, reordered so k comes first.
inline ReductiveSpace product_space(const ReductiveSpace& r1, const ReductiveSpace& r2) {
  StructureTensor g = direct_sum(r1.algebra, r2.algebra);
  const int n1 = r1.algebra.dim(), n2 = r2.algebra.dim();
  const int kd = r1.k_dim + r2.k_dim;
  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  int col = 0;
  for (int a = 0; a < r1.k_dim; ++a) perm(a, col++) = 1.0;
  for (int a = 0; a < r2.k_dim; ++a) perm(n1 + a, col++) = 1.0;
  for (int i = 0; i < r1.p_dim; ++i) perm(r1.k_dim + i, col++) = 1.0;
  for (int i = 0; i < r2.p_dim; ++i) perm(n1 + r2.k_dim + i, col++) = 1.0;
  ReductiveSpace out;
  out.algebra = change_basis(g, perm);
  out.k_dim = kd;
  out.p_dim = r1.p_dim + r2.p_dim;
  out.basis_in_parent = perm;
  out.mu_p = detail::p_block(out.algebra, kd);
  out.ip = Eigen::MatrixXd::Identity(out.p_dim, out.p_dim);
  return out;
}

/// The canonical destabilizing direction [n2 I_{p1}, -n1 I_{p2}] of a product of
/// Einstein models with a common rho > 0; lies in W and in Ker L_p, so the
/// second variation along it is 2 rho |A|^2 > 0.
inline Eigen::MatrixXd product_instability_witness(const ReductiveSpace& r1,
                                                   const ReductiveSpace& r2,
                                                   double einstein_tol = 1e-8) {
  CurvaturePack p1 = curvature_pack(r1);
  CurvaturePack p2 = curvature_pack(r2);
  if (p1.einstein_residual > einstein_tol || p2.einstein_residual > einstein_tol)
    throw NotEinsteinProduct("both factors must be Einstein");
  if (std::abs(p1.rho - p2.rho) > einstein_tol * std::max(1.0, std::abs(p1.rho)))
    throw NotEinsteinProduct("factors have different Einstein constants");
  const int n1 = r1.p_dim, n2 = r2.p_dim;
  Eigen::VectorXd diag(n1 + n2);
  diag.head(n1).setConstant(double(n2));
  diag.tail(n2).setConstant(-double(n1));
  Eigen::MatrixXd a = diag.asDiagonal();
  a /= a.norm();

  ReductiveSpace prod = product_space(r1, r2);
  if (std::abs(a.trace()) > 1e-12) throw Error("witness is not trace-free");
  Eigen::MatrixXd moment = moment_map(prod);
  const double q = lichnerowicz_quadratic(prod, moment, a);
  if (std::abs(q) > 1e-10 * std::max(1.0, moment.norm()))
    throw Error("witness is not in the kernel of L_p");
  return a;
}

/// One step record of the projected-Euler flow of scal on the det = 1 slice.
struct FlowSample {
  Eigen::MatrixXd h;
  double scalar = 0.0;
  double einstein_residual = 0.0;
};

/// Explicit-Euler ascent (direction = +1) or descent (-1) of scal over
/// sym_+(p)^K intersected with {det h = 1}. The determinant is reprojected each
/// step; losing positive definiteness raises StepTooLarge.
inline std::vector<FlowSample> gradient_flow(const ReductiveSpace& r, Eigen::MatrixXd h0,
                                             int steps, double dt, double direction = 1.0) {
  if (dt <= 0.0) throw RangeError("dt must be positive");
  const int d = r.p_dim;
  Eigen::MatrixXd kil_p = killing_operator_p(r);
  {
    Eigen::LLT<Eigen::MatrixXd> llt(h0);
    if (llt.info() != Eigen::Success) throw StepTooLarge("h0 is not positive definite");
  }
  h0 /= std::pow(h0.determinant(), 1.0 / d);

  std::vector<FlowSample> out;
  out.reserve(steps + 1);
  Eigen::MatrixXd h = h0;
  for (int k = 0; k <= steps; ++k) {
    MovedCurvature mc = moved_curvature(r, kil_p, h);
    out.push_back({h, mc.scalar, mc.einstein_residual});
    if (k == steps) break;
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    Eigen::MatrixXd hinv = llt.solve(Eigen::MatrixXd::Identity(d, d));
    Eigen::MatrixXd grad = -2.0 * symmetrize(hinv * mc.ricci);
    grad -= ((grad * hinv).trace() / (hinv * hinv).trace()) * hinv;
    h += direction * dt * grad;
    Eigen::LLT<Eigen::MatrixXd> check(h);
    if (check.info() != Eigen::Success)
      throw StepTooLarge("flow left the positive cone; reduce dt");
    h /= std::pow(h.determinant(), 1.0 / d);
  }
  return out;
}

}  // namespace einstab
