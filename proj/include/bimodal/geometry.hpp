#pragma once

// Orbit geometry under the admissible-change action: tangent spaces, normal
// spaces for the scalar product
//   <(A1, A2, B), (A1', A2', B')> = tr(A1^T A1') + tr(A2^T A2') + tr(B^T B'),
// and the miniversal deformations they induce.

#include <span>
#include <vector>

#include "bimodal/core.hpp"

namespace bimodal {

/// A tangent vector (X1, X2, Y) of the triple manifold; columns 2..n of X1
/// and X2 coincide.
struct TripleDirection {
  Eigen::MatrixXd X1;
  Eigen::MatrixXd X2;
  Eigen::VectorXd Y;
};

/// Dimension of the manifold of continuous triples, n^2 + 2n.
constexpr int ambient_dimension(int n) { return n * n + 2 * n; }

/// Coordinates in R^{2n^2+n}: A1 row-major, then A2 row-major, then B. The
/// Euclidean product of two such vectors is the scalar product above.
Eigen::VectorXd flatten(const TripleDirection& v);
Eigen::VectorXd flatten(const Triple& x);
TripleDirection unflatten(const Eigen::Ref<const Eigen::VectorXd>& v, int n);

double scalar_product(const TripleDirection& x, const TripleDirection& y);

/// Derivatives of the action along S(e) = I + eZ for the elementary Z with a
/// zero first row, ordered U entries first, then T entries row-major:
///   (A1 Z - Z A1, A2 Z - Z A2, -Z B).
std::vector<TripleDirection> tangent_generators(const Triple& x);

/// Orthonormal basis of the orbit's tangent space. Its size is the orbit
/// dimension. Singular values up to eps * scale(x) count as zero, here and
/// in the normal-space routines.
std::vector<TripleDirection> tangent_basis(const Triple& x, double eps = kDefaultEps);

/// Rows 2..n of A1^T X1 - X1 A1^T + A2^T X2 - X2 A2^T - Y B^T. A direction
/// is normal to the orbit exactly when this block vanishes.
Eigen::MatrixXd normal_condition(const Triple& x, const TripleDirection& v);

/// Normal space as the solution set of normal_condition inside the manifold.
Eigen::MatrixXd normal_space_from_condition(const Triple& x, double eps = kDefaultEps);
/// Normal space as the orthogonal complement of the tangent generators.
Eigen::MatrixXd normal_space_from_complement(const Triple& x, double eps = kDefaultEps);

/// Orthonormal normal-space basis. Both constructions above are computed and
/// compared; InconsistentGeometry is thrown if they disagree.
std::vector<TripleDirection> normal_basis(const Triple& x, double eps = kDefaultEps);

/// Sine of the largest principal angle between the column spans of two
/// matrices with orthonormal columns; 1 when the dimensions differ.
double max_principal_angle_sine(const Eigen::MatrixXd& Q1, const Eigen::MatrixXd& Q2);

/// Stacks flattened directions as columns.
Eigen::MatrixXd as_columns(std::span<const TripleDirection> directions);

/// Linearized action on directions: (S^-1 X1 S, S^-1 X2 S, S^-1 Y).
TripleDirection apply_change(const Change& S, const TripleDirection& v);

/// eta -> base + sum eta_i V_i with V an orthonormal basis of the normal space.
struct MiniversalDeformation {
  Triple base;
  std::vector<TripleDirection> directions;

  int d() const { return static_cast<int>(directions.size()); }
  Triple operator()(std::span<const double> eta) const;
};

MiniversalDeformation miniversal(const Triple& x, double eps = kDefaultEps);

/// Unobservable three-parameter deformation of the CF10' triple
/// (a4 I, [[a4, 0], [1, a4]], (b1, 0)):
///   phi(x1, x2, x5) = ([[a4 + x1, 0], [x2, a4]], [[a4 + x5, 0], [1, a4]],
///                      (b1, -(a4 / b1) x5)).
class Cf10pFamily {
 public:
  Cf10pFamily(double a4, double b1);

  double a4() const { return a4_; }
  double b1() const { return b1_; }
  Triple operator()(double x1, double x2, double x5) const;

  /// Directions d phi / d x1, d x2, d x5 (the family is affine).
  std::vector<TripleDirection> directions() const;

 private:
  double a4_;
  double b1_;
};

Cf10pFamily unobservable_miniversal_cf10p(double a4, double b1);

}  // namespace bimodal
