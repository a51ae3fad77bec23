#pragma once

#include <array>
#include <optional>
#include <span>

#include "bimodal/classify.hpp"
#include "bimodal/core.hpp"

namespace bimodal {

enum class ControllabilityMethod { ExplicitPlanar, TheoremOracle };

std::string_view to_string(ControllabilityMethod method);

struct ControllabilityReport {
  bool controllable;
  /// A deciding quantity (b1, Delta1, Delta2 or a mu value) fell inside the
  /// tolerance band; the verdict then takes the degenerate side.
  bool boundary;
  double b1;
  double delta1;
  double delta2;
  Eigen::VectorXd e;
  bool kalman_rank_condition1;
  std::optional<bool> mu_condition2;
  ControllabilityMethod method;
};

/// The column e with e C = A2 - A1, i.e. the first column of A2 - A1.
Eigen::VectorXd e_vector(const Triple& x);

/// Kalman rank test rank [B, AB, ..., A^{n-1}B] == n.
bool kalman_controllable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         double eps = kDefaultEps);

/// Planar unobservable test: controllable iff b1 != 0 and Delta1 Delta2 > 0.
/// NotApplicable for observable triples or n != 2.
ControllabilityReport is_controllable_explicit(const Triple& x, double eps = kDefaultEps);

/// Two-condition characterization for planar triples:
///   (1) (A1, [B | e]) is controllable;
///   (2) every real lambda and v != 0 with
///         (v^T mu_i) [[lambda I - A_i, B], [C, 0]] = 0,  i = 1, 2,
///       has mu1 mu2 > 0.
/// Condition (2) is checked on the joint left kernel of both bordered
/// matrices at every candidate lambda: the real eigenvalues of A1 and A2 and
/// the root of det [B | (lambda I - A1) e2], the only points where the
/// kernel can carry v != 0. When that determinant vanishes identically the
/// multipliers are unconstrained and (2) fails.
ControllabilityReport is_controllable_theorem(const Triple& x, double eps = kDefaultEps);

/// Controllability of an unobservable stratum evaluated on its canonical
/// parameters. NotApplicable for CF1.
bool stratum_controllability(CanonicalLabel label, std::span<const double> params,
                             double eps = kDefaultEps);

struct Feedback {
  Eigen::RowVectorXd F;
  std::array<double, 2> trace_margins;  // -tr(A_i + B F)
  std::array<double, 2> det_margins;    // det(A_i + B F)
  std::array<double, 2> decay_rates;    // -max Re eig(A_i + B F)
  /// Smallest of the margins and decay rates above; positive.
  double delta;
};

/// Common gain F making A1 + BF and A2 + BF Hurwitz for a controllable
/// unobservable planar triple. Computed on the canonical form and mapped back
/// through the reducing change.
Feedback stabilizing_feedback(const Triple& x, double eps = kDefaultEps);

/// Trace, determinant and decay margins of F for both modes.
Feedback evaluate_feedback(const Triple& x, const Eigen::RowVectorXd& F);

}  // namespace bimodal
