#pragma once

// Bimodal piecewise-linear triples (A1, A2, B) with output row C = e1^T, the
// group of admissible basis changes acting on them, and the planar invariants.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "bimodal/error.hpp"

namespace bimodal {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kDefaultEps = 1e-9;

/// Thickened zero test. A quantity that is a homogeneous polynomial of degree
/// k in the triple entries is treated as zero when |q| <= eps * scale^k, with
/// scale = 1 + max |entry|.
class ZeroTest {
 public:
  ZeroTest(double eps, double scale) : eps_(eps), scale_(scale) {}

  double band(int degree = 1) const { return eps_ * std::pow(scale_, degree); }
  bool zero(double q, int degree = 1) const { return std::abs(q) <= band(degree); }
  bool equal(double p, double q) const { return zero(p - q, 1); }
  double eps() const { return eps_; }
  double scale() const { return scale_; }

 private:
  double eps_;
  double scale_;
};

template <typename Scalar>
class BimodalTriple {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  /// Requires exact continuity: columns 2..n of A1 and A2 are identical.
  BimodalTriple(Matrix A1, Matrix A2, Vector B)
      : A1_(std::move(A1)), A2_(std::move(A2)), B_(std::move(B)) {
    const Eigen::Index n = A1_.rows();
    if (n < 2 || A1_.cols() != n || A2_.rows() != n || A2_.cols() != n ||
        B_.size() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "triple needs n x n matrices A1, A2 and an n-vector B, n >= 2",
                  "BimodalTriple");
    }
    if (!A1_.allFinite() || !A2_.allFinite() || !B_.allFinite()) {
      throw Error(ErrorCode::NonFiniteEntry, "triple has non-finite entries",
                  "BimodalTriple");
    }
    if (A1_.rightCols(n - 1) != A2_.rightCols(n - 1)) {
      throw Error(ErrorCode::ContinuityViolation,
                  "columns 2..n of A1 and A2 must coincide", "BimodalTriple");
    }
  }

  static BimodalTriple zero(int n) {
    return BimodalTriple(Matrix::Zero(n, n), Matrix::Zero(n, n), Vector::Zero(n));
  }

  int n() const { return static_cast<int>(A1_.rows()); }
  const Matrix& A1() const { return A1_; }
  const Matrix& A2() const { return A2_; }
  const Vector& B() const { return B_; }

  // Named planar entries; for n > 2 they address the leading 2x2 block.
  Scalar a1() const { return A1_(0, 0); }
  Scalar a2() const { return A1_(1, 0); }
  Scalar a3() const { return A1_(0, 1); }
  Scalar a4() const { return A1_(1, 1); }
  Scalar gamma1() const { return A2_(0, 0); }
  Scalar gamma2() const { return A2_(1, 0); }
  Scalar b1() const { return B_(0); }
  Scalar b2() const { return B_(1); }

  Scalar max_abs() const {
    using std::max;
    return max({A1_.cwiseAbs().maxCoeff(), A2_.cwiseAbs().maxCoeff(),
                B_.cwiseAbs().maxCoeff()});
  }
  Scalar scale() const { return Scalar(1) + max_abs(); }

  friend bool operator==(const BimodalTriple& x, const BimodalTriple& y) {
    return x.n() == y.n() && x.A1_ == y.A1_ && x.A2_ == y.A2_ && x.B_ == y.B_;
  }

 private:
  Matrix A1_;
  Matrix A2_;
  Vector B_;
};

using Triple = BimodalTriple<double>;

/// Largest entrywise difference between two triples of equal dimension.
template <typename Scalar>
Scalar max_abs_difference(const BimodalTriple<Scalar>& x, const BimodalTriple<Scalar>& y) {
  using std::max;
  return max({(x.A1() - y.A1()).cwiseAbs().maxCoeff(),
              (x.A2() - y.A2()).cwiseAbs().maxCoeff(),
              (x.B() - y.B()).cwiseAbs().maxCoeff()});
}

template <typename Scalar>
struct ValidatedTriple {
  BimodalTriple<Scalar> triple;
  Scalar deviation;  // max continuity deviation found in the raw input
};

/// Accepts raw external input. Continuity deviations up to
/// tol * (1 + max |entry|) are repaired by copying A1's trailing columns
/// into A2.
template <typename Scalar>
ValidatedTriple<Scalar> validate_triple(int n, const MatrixX<Scalar>& A1,
                                        MatrixX<Scalar> A2, const VectorX<Scalar>& B,
                                        double tol) {
  if (n < 2 || A1.rows() != n || A1.cols() != n || A2.rows() != n ||
      A2.cols() != n || B.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(n) + "x" + std::to_string(n) +
                    " matrices and a " + std::to_string(n) + "-vector",
                "validate_triple");
  }
  if (!A1.allFinite() || !A2.allFinite() || !B.allFinite()) {
    throw Error(ErrorCode::NonFiniteEntry, "triple has non-finite entries",
                "validate_triple");
  }
  const Scalar deviation = (A1.rightCols(n - 1) - A2.rightCols(n - 1)).cwiseAbs().maxCoeff();
  using std::max;
  const Scalar magnitude =
      max({A1.cwiseAbs().maxCoeff(), A2.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff()});
  if (deviation > Scalar(tol) * (Scalar(1) + magnitude)) {
    throw Error(ErrorCode::ContinuityViolation,
                "columns 2..n of A1 and A2 differ by " + std::to_string(double(deviation)),
                "validate_triple");
  }
  A2.rightCols(n - 1) = A1.rightCols(n - 1);
  return {BimodalTriple<Scalar>(A1, std::move(A2), B), deviation};
}

/// An element S = [[1, 0], [U, T]] of the admissible-change group, i.e. a
/// basis change preserving every hyperplane x1 = const. C * S = C holds.
template <typename Scalar>
class AdmissibleChange {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  /// Singular when sigma_min(T) <= kSingularRcond * sigma_max(T).
  static constexpr double kSingularRcond = 1e-13;

  explicit AdmissibleChange(Matrix S) : S_(std::move(S)) {
    const Eigen::Index n = S_.rows();
    if (n < 2 || S_.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "S must be square with n >= 2",
                  "AdmissibleChange");
    }
    if (!S_.allFinite()) {
      throw Error(ErrorCode::NonFiniteEntry, "S has non-finite entries", "AdmissibleChange");
    }
    if (S_(0, 0) != Scalar(1) || !S_.row(0).tail(n - 1).isZero(0)) {
      throw Error(ErrorCode::SingularChange, "first row of S must be e1^T",
                  "AdmissibleChange");
    }
    const Eigen::JacobiSVD<Matrix> svd(T());
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > Scalar(kSingularRcond) * sv(0))) {
      throw Error(ErrorCode::SingularChange, "lower-right block T of S is singular",
                  "AdmissibleChange");
    }
    T_inverse_ = T().inverse();
  }

  static AdmissibleChange from_blocks(const Vector& U, const Matrix& T) {
    const Eigen::Index n = T.rows() + 1;
    if (T.cols() != T.rows() || U.size() != T.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "U and T blocks are inconsistent",
                  "AdmissibleChange");
    }
    Matrix S = Matrix::Zero(n, n);
    S(0, 0) = Scalar(1);
    S.col(0).tail(n - 1) = U;
    S.bottomRightCorner(n - 1, n - 1) = T;
    return AdmissibleChange(std::move(S));
  }

  /// Planar element [[1, 0], [u, t]].
  static AdmissibleChange planar(Scalar u, Scalar t) {
    Matrix S(2, 2);
    S << Scalar(1), Scalar(0), u, t;
    return AdmissibleChange(std::move(S));
  }

  static AdmissibleChange identity(int n) { return AdmissibleChange(Matrix::Identity(n, n)); }

  int n() const { return static_cast<int>(S_.rows()); }
  const Matrix& matrix() const { return S_; }
  auto U() const { return S_.col(0).tail(S_.rows() - 1); }
  auto T() const { return S_.bottomRightCorner(S_.rows() - 1, S_.cols() - 1); }
  Scalar determinant() const { return T().determinant(); }

  /// S^{-1} = [[1, 0], [-T^{-1} U, T^{-1}]], assembled blockwise.
  Matrix inverse_matrix() const {
    const Eigen::Index n = S_.rows();
    Matrix inv = Matrix::Zero(n, n);
    inv(0, 0) = Scalar(1);
    inv.col(0).tail(n - 1) = -T_inverse_ * U();
    inv.bottomRightCorner(n - 1, n - 1) = T_inverse_;
    return inv;
  }

  AdmissibleChange inverse() const { return AdmissibleChange(inverse_matrix()); }

  double condition_number() const {
    const Eigen::JacobiSVD<Matrix> svd(S_);
    const auto& sv = svd.singularValues();
    return double(sv(0) / sv(sv.size() - 1));
  }

  friend AdmissibleChange operator*(const AdmissibleChange& x, const AdmissibleChange& y) {
    Matrix product = x.S_ * y.S_;
    // The product's first row is e1^T in exact arithmetic; pin it.
    product.row(0).setZero();
    product(0, 0) = Scalar(1);
    return AdmissibleChange(std::move(product));
  }

 private:
  Matrix S_;
  Matrix T_inverse_;
};

using Change = AdmissibleChange<double>;

/// The group action (A1, A2, B) -> (S^-1 A1 S, S^-1 A2 S, S^-1 B).
template <typename Scalar>
BimodalTriple<Scalar> apply_change(const AdmissibleChange<Scalar>& S,
                                   const BimodalTriple<Scalar>& x) {
  if (S.n() != x.n()) {
    throw Error(ErrorCode::DimensionMismatch, "change and triple dimensions differ",
                "apply_change");
  }
  const MatrixX<Scalar> Sinv = S.inverse_matrix();
  const MatrixX<Scalar> A1 = Sinv * (x.A1() * S.matrix());
  MatrixX<Scalar> A2 = Sinv * (x.A2() * S.matrix());
  // Columns 2..n agree exactly in exact arithmetic; make it bitwise.
  const Eigen::Index n = x.n();
  A2.rightCols(n - 1) = A1.rightCols(n - 1);
  VectorX<Scalar> B = Sinv * x.B();
  return BimodalTriple<Scalar>(A1, std::move(A2), std::move(B));
}

/// Numerical rank from singular values, relative threshold eps * sigma_max.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& M, double eps = kDefaultEps) {
  using Scalar = typename Derived::Scalar;
  if (M.size() == 0) return 0;
  const Eigen::JacobiSVD<MatrixX<Scalar>> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == Scalar(0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > Scalar(eps) * sv(0)) ++rank;
  }
  return rank;
}

/// Rank of the stacked (C; C A; ...; C A^{n-1}).
template <typename Scalar>
int observability_rank(const MatrixX<Scalar>& A, double eps = kDefaultEps) {
  const Eigen::Index n = A.rows();
  MatrixX<Scalar> O(n, n);
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Unit(n, 0);
  for (Eigen::Index k = 0; k < n; ++k) {
    O.row(k) = row;
    row = row * A;
  }
  return numerical_rank(O, eps);
}

template <typename Scalar>
bool is_observable(const BimodalTriple<Scalar>& x, double eps = kDefaultEps) {
  return observability_rank(x.A1(), eps) == x.n() && observability_rank(x.A2(), eps) == x.n();
}

/// The S-invariant scalars of a planar triple.
template <typename Scalar>
struct PlanarInvariants {
  Scalar a3;
  Scalar b1;
  Scalar delta0;
  Scalar delta12;
  Scalar delta1;
  Scalar delta2;
  Scalar trA1;
  Scalar trA2;
  Scalar detA1;
  Scalar detA2;
};

template <typename Scalar>
PlanarInvariants<Scalar> planar_invariants(const BimodalTriple<Scalar>& x) {
  if (x.n() != 2) {
    throw Error(ErrorCode::WrongDimension, "planar invariants need n = 2",
                "planar_invariants");
  }
  const Scalar a1 = x.a1(), a2 = x.a2(), a3 = x.a3(), a4 = x.a4();
  const Scalar g1 = x.gamma1(), g2 = x.gamma2();
  const Scalar b1 = x.b1(), b2 = x.b2();
  return {
      a3,
      b1,
      a3 * b2 - a4 * b1,
      a2 * (a4 - g1) - g2 * (a4 - a1),
      b1 * a2 + (a4 - a1) * b2,
      b1 * g2 + (a4 - g1) * b2,
      a1 + a4,
      g1 + a4,
      a1 * a4 - a3 * a2,
      g1 * a4 - a3 * g2,
  };
}

}  // namespace bimodal
