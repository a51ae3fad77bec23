#include "bimodal/geometry.hpp"

#include <cmath>
#include <string>

namespace bimodal {
namespace {

int flat_size(int n) { return 2 * n * n + n; }

/// Orthonormal basis (columns) of the continuous triples inside R^{2n^2+n}:
/// unit vectors for column 1 of A1, column 1 of A2 and B, and
/// (e_A1(i,j) + e_A2(i,j)) / sqrt(2) for the shared columns.
Eigen::MatrixXd manifold_basis(int n) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(flat_size(n), ambient_dimension(n));
  const double r = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int a1 = i * n + j;
      const int a2 = n * n + i * n + j;
      if (j == 0) {
        K(a1, k++) = 1.0;
        K(a2, k++) = 1.0;
      } else {
        K(a1, k) = r;
        K(a2, k) = r;
        ++k;
      }
    }
  }
  for (int i = 0; i < n; ++i) K(2 * n * n + i, k++) = 1.0;
  return K;
}

// Ranks are decided against an absolute threshold tol = eps * scale(x):
// every map below is linear in the entries of x, and a relative threshold
// would promote rounding noise to rank when x is (nearly) scalar.

/// Orthonormal basis of the kernel of M.
Eigen::MatrixXd kernel(const Eigen::MatrixXd& M, double tol) {
  const Eigen::Index cols = M.cols();
  if (M.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

/// Orthonormal basis of the column span of M.
Eigen::MatrixXd range(const Eigen::MatrixXd& M, double tol) {
  if (M.cols() == 0) return Eigen::MatrixXd(M.rows(), 0);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

std::vector<TripleDirection> as_directions(const Eigen::MatrixXd& Q, int n) {
  std::vector<TripleDirection> out;
  out.reserve(static_cast<std::size_t>(Q.cols()));
  for (Eigen::Index k = 0; k < Q.cols(); ++k) out.push_back(unflatten(Q.col(k), n));
  return out;
}

}  // namespace

Eigen::VectorXd flatten(const TripleDirection& v) {
  const auto n = v.X1.rows();
  Eigen::VectorXd out(2 * n * n + n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.segment(i * n, n) = v.X1.row(i).transpose();
    out.segment(n * n + i * n, n) = v.X2.row(i).transpose();
  }
  out.tail(n) = v.Y;
  return out;
}

Eigen::VectorXd flatten(const Triple& x) { return flatten(TripleDirection{x.A1(), x.A2(), x.B()}); }

TripleDirection unflatten(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
  if (v.size() != flat_size(n)) {
    throw Error(ErrorCode::DimensionMismatch, "flattened triple has wrong length", "unflatten");
  }
  TripleDirection out{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n), v.tail(n)};
  for (int i = 0; i < n; ++i) {
    out.X1.row(i) = v.segment(i * n, n).transpose();
    out.X2.row(i) = v.segment(n * n + i * n, n).transpose();
  }
  return out;
}

double scalar_product(const TripleDirection& x, const TripleDirection& y) {
  return (x.X1.transpose() * y.X1).trace() + (x.X2.transpose() * y.X2).trace() + x.Y.dot(y.Y);
}

Eigen::MatrixXd as_columns(std::span<const TripleDirection> directions) {
  if (directions.empty()) return Eigen::MatrixXd(0, 0);
  const auto n = directions.front().X1.rows();
  Eigen::MatrixXd out(2 * n * n + n, static_cast<Eigen::Index>(directions.size()));
  for (std::size_t k = 0; k < directions.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = flatten(directions[k]);
  }
  return out;
}

std::vector<TripleDirection> tangent_generators(const Triple& x) {
  const int n = x.n();
  std::vector<TripleDirection> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1)));
  auto push = [&](int i, int j) {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, n);
    Z(i, j) = 1.0;
    out.push_back({x.A1() * Z - Z * x.A1(), x.A2() * Z - Z * x.A2(), -Z * x.B()});
  };
  for (int i = 1; i < n; ++i) push(i, 0);
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) push(i, j);
  }
  return out;
}

std::vector<TripleDirection> tangent_basis(const Triple& x, double eps) {
  const auto generators = tangent_generators(x);
  return as_directions(range(as_columns(generators), eps * x.scale()), x.n());
}

Eigen::MatrixXd normal_condition(const Triple& x, const TripleDirection& v) {
  const int n = x.n();
  const Eigen::MatrixXd M = x.A1().transpose() * v.X1 - v.X1 * x.A1().transpose() +
                            x.A2().transpose() * v.X2 - v.X2 * x.A2().transpose() -
                            v.Y * x.B().transpose();
  return M.bottomRows(n - 1);
}

Eigen::MatrixXd normal_space_from_condition(const Triple& x, double eps) {
  const int n = x.n();
  const Eigen::MatrixXd K = manifold_basis(n);
  // Linear map from manifold coordinates to the (n-1) x n condition block.
  Eigen::MatrixXd L(n * (n - 1), K.cols());
  for (Eigen::Index k = 0; k < K.cols(); ++k) {
    const Eigen::MatrixXd block = normal_condition(x, unflatten(K.col(k), n));
    for (int i = 0; i < n - 1; ++i) L.block(i * n, k, n, 1) = block.row(i).transpose();
  }
  return K * kernel(L, eps * x.scale());
}

Eigen::MatrixXd normal_space_from_complement(const Triple& x, double eps) {
  const Eigen::MatrixXd K = manifold_basis(x.n());
  const Eigen::MatrixXd G = as_columns(tangent_generators(x));
  return K * kernel(G.transpose() * K, eps * x.scale());
}

double max_principal_angle_sine(const Eigen::MatrixXd& Q1, const Eigen::MatrixXd& Q2) {
  if (Q1.cols() != Q2.cols() || Q1.rows() != Q2.rows()) return 1.0;
  if (Q1.cols() == 0) return 0.0;
  const Eigen::MatrixXd residual = Q2 - Q1 * (Q1.transpose() * Q2);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  return std::min(1.0, svd.singularValues()(0));
}

std::vector<TripleDirection> normal_basis(const Triple& x, double eps) {
  const Eigen::MatrixXd by_condition = normal_space_from_condition(x, eps);
  const Eigen::MatrixXd by_complement = normal_space_from_complement(x, eps);
  const double sine = max_principal_angle_sine(by_condition, by_complement);
  if (by_condition.cols() != by_complement.cols() || sine > 1e-8) {
    throw Error(ErrorCode::InconsistentGeometry,
                "normal space constructions disagree (dims " +
                    std::to_string(by_condition.cols()) + " vs " +
                    std::to_string(by_complement.cols()) + ", sin angle " +
                    std::to_string(sine) + ")",
                "normal_basis");
  }
  return as_directions(by_condition, x.n());
}

TripleDirection apply_change(const Change& S, const TripleDirection& v) {
  const Eigen::MatrixXd Sinv = S.inverse_matrix();
  return {Sinv * v.X1 * S.matrix(), Sinv * v.X2 * S.matrix(), Sinv * v.Y};
}

Triple MiniversalDeformation::operator()(std::span<const double> eta) const {
  if (eta.size() != directions.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(directions.size()) + " deformation parameters",
                "miniversal");
  }
  Eigen::MatrixXd A1 = base.A1();
  Eigen::MatrixXd A2 = base.A2();
  Eigen::VectorXd B = base.B();
  for (std::size_t k = 0; k < eta.size(); ++k) {
    A1 += eta[k] * directions[k].X1;
    A2 += eta[k] * directions[k].X2;
    B += eta[k] * directions[k].Y;
  }
  const int n = base.n();
  A2.rightCols(n - 1) = A1.rightCols(n - 1);
  return Triple(std::move(A1), std::move(A2), std::move(B));
}

MiniversalDeformation miniversal(const Triple& x, double eps) {
  return {x, normal_basis(x, eps)};
}

Cf10pFamily::Cf10pFamily(double a4, double b1) : a4_(a4), b1_(b1) {
  if (b1 == 0.0 || !std::isfinite(b1) || !std::isfinite(a4)) {
    throw Error(ErrorCode::ZeroB1, "the CF10' family needs a finite b1 != 0",
                "unobservable_miniversal_cf10p");
  }
}

Triple Cf10pFamily::operator()(double x1, double x2, double x5) const {
  Eigen::Matrix2d A1, A2;
  A1 << a4_ + x1, 0.0, x2, a4_;
  A2 << a4_ + x5, 0.0, 1.0, a4_;
  return Triple(A1, A2, Eigen::Vector2d(b1_, -(a4_ / b1_) * x5));
}

std::vector<TripleDirection> Cf10pFamily::directions() const {
  const Eigen::Matrix2d Z = Eigen::Matrix2d::Zero();
  auto unit = [](int i, int j) {
    Eigen::Matrix2d E = Eigen::Matrix2d::Zero();
    E(i, j) = 1.0;
    return E;
  };
  return {
      {unit(0, 0), Z, Eigen::Vector2d::Zero()},
      {unit(1, 0), Z, Eigen::Vector2d::Zero()},
      {Z, unit(0, 0), Eigen::Vector2d(0.0, -a4_ / b1_)},
  };
}

Cf10pFamily unobservable_miniversal_cf10p(double a4, double b1) { return Cf10pFamily(a4, b1); }

}  // namespace bimodal
