#include "bimodal/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace bimodal {
namespace {

void require_planar(const Triple& x, const char* context) {
  if (x.n() != 2) throw Error(ErrorCode::WrongDimension, "operation needs n = 2", context);
}

/// True when p and q are both outside the zero band and share a sign.
bool same_strict_sign(const ZeroTest& z, double p, double q, int degree) {
  return !z.zero(p, degree) && !z.zero(q, degree) && (p > 0) == (q > 0);
}

/// Joint left-kernel analysis of the bordered matrices at a given lambda.
/// Unknowns (v1, v2, mu1, mu2); equations v^T (lambda I - A_i) + mu_i C = 0
/// for i = 1, 2 and v^T B = 0.
struct KernelVerdict {
  bool has_kernel = false;
  bool ok = true;
  bool boundary = false;
};

KernelVerdict bordered_kernel(const Triple& x, double lambda, const ZeroTest& z) {
  Eigen::Matrix<double, 5, 4> J = Eigen::Matrix<double, 5, 4>::Zero();
  const Eigen::Matrix2d M1 = lambda * Eigen::Matrix2d::Identity() - x.A1();
  const Eigen::Matrix2d M2 = lambda * Eigen::Matrix2d::Identity() - x.A2();
  for (int k = 0; k < 2; ++k) {
    J(k, 0) = M1(0, k);
    J(k, 1) = M1(1, k);
    J(2 + k, 0) = M2(0, k);
    J(2 + k, 1) = M2(1, k);
  }
  J(0, 2) = 1.0;  // mu1 * C, first column only
  J(2, 3) = 1.0;
  J(4, 0) = x.b1();
  J(4, 1) = x.b2();

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > z.eps() * sv(0)) ++rank;
  const Eigen::MatrixXd W = svd.matrixV().rightCols(4 - rank);

  KernelVerdict verdict;
  if (W.cols() == 0) return verdict;
  verdict.has_kernel = true;
  if (W.cols() >= 2) {
    // mu1 mu2 restricted to a kernel of dimension >= 2 is an indefinite
    // quadratic form, so some v != 0 gives mu1 mu2 <= 0.
    verdict.ok = false;
    return verdict;
  }
  Eigen::Vector4d w = W.col(0);
  const double vnorm = w.head<2>().norm();
  if (vnorm == 0.0) return verdict;
  w /= vnorm;
  const double bnorm = x.B().norm();
  const double band = bnorm > z.band(1) ? z.band(2) / bnorm : z.band(1);
  const double mu1 = w(2), mu2 = w(3);
  if (std::abs(mu1) <= band || std::abs(mu2) <= band) {
    verdict.boundary = true;
    verdict.ok = false;
  } else {
    verdict.ok = (mu1 > 0) == (mu2 > 0);
  }
  return verdict;
}

std::array<double, 2> trace_det(const Eigen::Matrix2d& M) {
  return {M.trace(), M.determinant()};
}

double decay_rate(const Eigen::MatrixXd& M) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return -es.eigenvalues().real().maxCoeff();
}

/// CF2 construction in the chart x = b1 f1 + b2 f2, y = -(a4 b1 f1 + a1 b2 f2),
/// which is invertible since its determinant is b1 Delta1 != 0.
Eigen::RowVector2d cf2_feedback(const Triple& c) {
  const double a1 = c.a1(), a4 = c.a4(), g1 = c.gamma1();
  const double b1 = c.b1(), b2 = c.b2();
  const double delta1 = (a4 - a1) * b2;
  const double delta2 = b1 + (a4 - g1) * b2;
  auto to_gain = [&](double x, double y) {
    return Eigen::RowVector2d(-(a1 * x + y) / ((a4 - a1) * b1), (a4 * x + y) / ((a4 - a1) * b2));
  };
  auto det2 = [&](double x, double y) {
    const Eigen::RowVector2d F = to_gain(x, y);
    return (c.A2() + c.B() * F).determinant();
  };
  const double x = std::min(-a1 - a4, -g1 - a4) - 1.0;
  // det(A1 + BF) = a1 a4 - y; det(A2 + BF) = det2(x, 0) - (Delta2 / Delta1) y.
  const double ratio = delta2 / delta1;
  const double y_bound = std::min(a1 * a4, det2(x, 0.0) / ratio);
  const double y = y_bound - std::max(1.0, 1.0 / ratio);
  return to_gain(x, y);
}

/// Trace/determinant feasibility for the remaining controllable strata.
/// Trace and determinant of A + BF are affine in F:
///   tr = tr A + F B,  det = det A + F adj(A) B.
/// The search fixes F B = x (trace slack >= 1), walks the line
/// F = F0 + s w with w orthogonal to B, and lowers x until both determinant
/// constraints admit a common s.
Eigen::RowVector2d line_search_feedback(const Triple& c) {
  const Eigen::Vector2d B = c.B();
  const std::array<Eigen::Matrix2d, 2> A = {c.A1(), c.A2()};
  auto adj = [](const Eigen::Matrix2d& M) {
    Eigen::Matrix2d out;
    out << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
    return out;
  };
  const Eigen::RowVector2d F0_dir = B.transpose() / B.squaredNorm();
  const Eigen::RowVector2d w(-B(1), B(0));
  const double x_seed = std::min(-A[0].trace(), -A[1].trace()) - 1.0;

  for (int attempt = 0; attempt < 60; ++attempt) {
    const double x = x_seed - (attempt == 0 ? 0.0 : std::ldexp(1.0, attempt - 1));
    const Eigen::RowVector2d F0 = x * F0_dir;
    // det_i(s) = alpha_i + beta_i s
    std::array<double, 2> alpha{}, beta{};
    for (int i = 0; i < 2; ++i) {
      const Eigen::Vector2d g = adj(A[i]) * B;
      alpha[i] = A[i].determinant() + F0 * g;
      beta[i] = w * g;
    }
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (int i = 0; i < 2; ++i) {
      const double scale = 1e-12 * (1.0 + std::abs(alpha[i]));
      if (std::abs(beta[i]) <= scale) {
        if (alpha[i] <= 0.0) feasible = false;
      } else if (beta[i] > 0) {
        lo = std::max(lo, -alpha[i] / beta[i]);
      } else {
        hi = std::min(hi, -alpha[i] / beta[i]);
      }
    }
    if (!feasible || !(lo < hi)) continue;
    // Aim for det_i >= 1 on each constraint, else take the midpoint.
    double s_lo = lo, s_hi = hi;
    for (int i = 0; i < 2; ++i) {
      if (std::abs(beta[i]) <= 1e-12 * (1.0 + std::abs(alpha[i]))) continue;
      const double s_one = (1.0 - alpha[i]) / beta[i];
      if (beta[i] > 0) s_lo = std::max(s_lo, s_one);
      else s_hi = std::min(s_hi, s_one);
    }
    double s;
    if (s_lo <= s_hi && std::isfinite(s_lo)) s = s_lo;
    else if (s_lo <= s_hi && std::isfinite(s_hi)) s = s_hi;
    else if (std::isfinite(lo) && std::isfinite(hi)) s = 0.5 * (lo + hi);
    else if (std::isfinite(lo)) s = lo + 1.0;
    else s = hi - 1.0;
    return F0 + s * w;
  }
  throw Error(ErrorCode::FeasibilitySearchFailed,
              "no common stabilizing gain found for a controllable triple",
              "stabilizing_feedback");
}

}  // namespace

std::string_view to_string(ControllabilityMethod method) {
  return method == ControllabilityMethod::ExplicitPlanar ? "explicit-planar" : "theorem-oracle";
}

Eigen::VectorXd e_vector(const Triple& x) { return x.A2().col(0) - x.A1().col(0); }

bool kalman_controllable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double eps) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd K(n, n * B.cols());
  K.leftCols(B.cols()) = B;
  for (Eigen::Index i = 1; i < n; ++i) {
    K.middleCols(i * B.cols(), B.cols()) = A * K.middleCols((i - 1) * B.cols(), B.cols());
  }
  return numerical_rank(K, eps) == n;
}

ControllabilityReport is_controllable_explicit(const Triple& x, double eps) {
  if (x.n() != 2) {
    throw Error(ErrorCode::NotApplicable, "explicit test needs n = 2", "is_controllable_explicit");
  }
  const ZeroTest z(eps, x.scale());
  if (!z.zero(x.a3())) {
    throw Error(ErrorCode::NotApplicable, "explicit test needs an unobservable triple (a3 = 0)",
                "is_controllable_explicit");
  }
  const auto inv = planar_invariants(x);
  const bool b1_zero = z.zero(inv.b1);
  const bool boundary = b1_zero || z.zero(inv.delta1, 2) || z.zero(inv.delta2, 2);
  const bool controllable = !b1_zero && same_strict_sign(z, inv.delta1, inv.delta2, 2);

  Eigen::MatrixXd Be(2, 2);
  Be << x.B(), e_vector(x);
  return {controllable, boundary, inv.b1, inv.delta1, inv.delta2, e_vector(x),
          kalman_controllable(x.A1(), Be, eps), std::nullopt,
          ControllabilityMethod::ExplicitPlanar};
}

ControllabilityReport is_controllable_theorem(const Triple& x, double eps) {
  require_planar(x, "is_controllable_theorem");
  const ZeroTest z(eps, x.scale());
  const auto inv = planar_invariants(x);
  const Eigen::VectorXd e = e_vector(x);

  Eigen::MatrixXd Be(2, 2);
  Be << x.B(), e;
  const bool condition1 = kalman_controllable(x.A1(), Be, eps);

  // det [B | (lambda I - A1) e2] = b1 (lambda - a4) + a3 b2.
  bool condition2 = true;
  bool boundary = false;
  if (z.zero(x.b1()) && z.zero(x.a3() * x.b2(), 2)) {
    condition2 = false;
    boundary = !(x.b1() == 0.0 && x.a3() * x.b2() == 0.0);
  } else {
    std::vector<double> candidates;
    for (const auto* A : {&x.A1(), &x.A2()}) {
      const Eigen::EigenSolver<Eigen::MatrixXd> es(*A, false);
      for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const auto lambda = es.eigenvalues()(k);
        if (z.zero(lambda.imag())) candidates.push_back(lambda.real());
      }
    }
    if (!z.zero(x.b1())) candidates.push_back(x.a4() - x.a3() * x.b2() / x.b1());
    for (const double lambda : candidates) {
      const auto verdict = bordered_kernel(x, lambda, z);
      boundary = boundary || verdict.boundary;
      if (verdict.has_kernel && !verdict.ok) condition2 = false;
    }
  }
  return {condition1 && condition2, boundary, inv.b1, inv.delta1, inv.delta2, e,
          condition1, condition2, ControllabilityMethod::TheoremOracle};
}

bool stratum_controllability(CanonicalLabel label, std::span<const double> params, double eps) {
  if (label == CanonicalLabel::CF1) {
    throw Error(ErrorCode::NotApplicable, "CF1 is observable; the table covers CF2-CF14",
                "stratum_controllability");
  }
  // Validates the parameter count and guards.
  (void)canonical_representative(label, params, eps);
  double magnitude = 0.0;
  for (const double p : params) magnitude = std::max(magnitude, std::abs(p));
  const ZeroTest z(eps, 1.0 + magnitude);
  const auto& p = params;
  switch (label) {
    case CanonicalLabel::CF2: {
      const double delta1 = (p[1] - p[0]) * p[4];
      const double delta2 = p[3] + (p[1] - p[2]) * p[4];
      return !z.zero(p[3]) && same_strict_sign(z, delta1, delta2, 2);
    }
    case CanonicalLabel::CF3:
      return !z.zero(p[3]) && same_strict_sign(z, p[1] - p[0], p[1] - p[2], 1);
    case CanonicalLabel::CF5:
      // Delta2 = (a4 - gamma1) * Delta2/Delta12 on the canonical form.
      return same_strict_sign(z, p[2], (p[0] - p[1]) * p[3], 2);
    case CanonicalLabel::CF5p:
      return same_strict_sign(z, p[2], (p[1] - p[0]) * p[3], 2);
    case CanonicalLabel::CF8:
      return !z.zero(p[1]) && p[1] > 0;
    default:
      return false;
  }
}

Feedback evaluate_feedback(const Triple& x, const Eigen::RowVectorXd& F) {
  Feedback out{F, {}, {}, {}, 0.0};
  for (int i = 0; i < 2; ++i) {
    const Eigen::MatrixXd M = (i == 0 ? x.A1() : x.A2()) + x.B() * F;
    const auto [tr, det] = trace_det(M);
    out.trace_margins[static_cast<std::size_t>(i)] = -tr;
    out.det_margins[static_cast<std::size_t>(i)] = det;
    out.decay_rates[static_cast<std::size_t>(i)] = decay_rate(M);
  }
  out.delta = std::min({out.trace_margins[0], out.trace_margins[1], out.det_margins[0],
                        out.det_margins[1], out.decay_rates[0], out.decay_rates[1]});
  return out;
}

Feedback stabilizing_feedback(const Triple& x, double eps) {
  require_planar(x, "stabilizing_feedback");
  const auto report = is_controllable_explicit(x, eps);
  if (!report.controllable) {
    throw Error(ErrorCode::NotControllable, "triple is not controllable", "stabilizing_feedback");
  }
  const auto cls = classify(x, eps);
  const Triple& canonical = cls.form.triple;
  const Eigen::RowVector2d F_canonical = cls.form.label == CanonicalLabel::CF2
                                             ? cf2_feedback(canonical)
                                             : line_search_feedback(canonical);
  // S^-1 (A + B F) S = A' + B' (F S), so F = F' S^-1.
  const Eigen::RowVectorXd F = F_canonical * cls.S.inverse_matrix();
  Feedback out = evaluate_feedback(x, F);
  if (!(out.delta > 0.0)) {
    throw Error(ErrorCode::FeasibilitySearchFailed,
                "synthesized gain does not stabilize both modes (margin " +
                    std::to_string(out.delta) + ")",
                "stabilizing_feedback");
  }
  return out;
}

}  // namespace bimodal
