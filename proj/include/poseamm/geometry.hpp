#pragma once

// Small fixed-size geometry shared by every objective and solver: the
// cross-product matrix and its inverse, SO(3) steps and projection, column
// stacking and Kronecker products, plus the value types for poses and rays.
//
// Index conventions: vec() stacks column by column, so vec(M)(3*j + i) is
// M(i, j) with 0-based i, j. kron(a, b)(q*i + j) is a(i) * b(j).

#include <cmath>
#include <limits>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "poseamm/errors.hpp"

namespace poseamm {

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Vector9 = Eigen::Matrix<Scalar, 9, 1>;

inline constexpr double kRotationTolerance = 1e-9;

template <typename Derived>
Matrix3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  Matrix3<Scalar> s;
  s << Scalar(0), -v(2), v(1),
       v(2), Scalar(0), -v(0),
       -v(1), v(0), Scalar(0);
  return s;
}

// Reads the axial vector of the skew part (S - S^T) / 2.
template <typename Derived>
Vector3<typename Derived::Scalar> unskew(const Eigen::MatrixBase<Derived>& s) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
  using Scalar = typename Derived::Scalar;
  const Scalar half(0.5);
  return Vector3<Scalar>(half * (s(2, 1) - s(1, 2)),
                         half * (s(0, 2) - s(2, 0)),
                         half * (s(1, 0) - s(0, 1)));
}

// Exact rotation by `angle * |axis|` about axis / |axis|; identity when the
// axis is numerically zero. Equals exp(angle * skew(axis)).
template <typename Derived>
Matrix3<typename Derived::Scalar> rodrigues_step(
    const Eigen::MatrixBase<Derived>& axis, typename Derived::Scalar angle) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  using std::cos;
  using std::sin;
  const Scalar norm = axis.norm();
  if (!(norm >= Scalar(1e-14))) return Matrix3<Scalar>::Identity();
  const Scalar theta = angle * norm;
  const Matrix3<Scalar> k = skew(axis / norm);
  return Matrix3<Scalar>::Identity() + sin(theta) * k +
         (Scalar(1) - cos(theta)) * (k * k);
}

// Nearest rotation in the Frobenius sense.
template <typename Derived>
Matrix3<typename Derived::Scalar> project_to_so3(
    const Eigen::MatrixBase<Derived>& b) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
  using Scalar = typename Derived::Scalar;
  const Matrix3<Scalar> m = b;
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix3<Scalar>& u = svd.matrixU();
  const Matrix3<Scalar>& v = svd.matrixV();
  const Vector3<Scalar>& sigma = svd.singularValues();
  const Scalar d = (u * v.transpose()).determinant();
  Vector3<Scalar> flip(Scalar(1), Scalar(1), Scalar(1));
  if (d < Scalar(0)) {
    using std::abs;
    using std::max;
    if (abs(sigma(1) - sigma(2)) <= Scalar(1e-12) * max(Scalar(1), sigma(0))) {
      throw AmbiguousProjection(
          "project_to_so3: reflection with repeated smallest singular value");
    }
    flip(2) = Scalar(-1);
  }
  return u * flip.asDiagonal() * v.transpose();
}

template <typename Derived>
Vector9<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived>& m) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
  return m.reshaped();
}

template <typename Derived>
Matrix3<typename Derived::Scalar> unvec(const Eigen::MatrixBase<Derived>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 9);
  return v.reshaped(3, 3);
}

namespace detail {
constexpr int product_size(int a, int b) {
  return (a == Eigen::Dynamic || b == Eigen::Dynamic) ? Eigen::Dynamic : a * b;
}
}  // namespace detail

// Kronecker product; for column vectors result(q*i + j) = a(i) * b(j).
template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar,
              detail::product_size(DA::RowsAtCompileTime, DB::RowsAtCompileTime),
              detail::product_size(DA::ColsAtCompileTime, DB::ColsAtCompileTime)>
kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Result = Eigen::Matrix<
      typename DA::Scalar,
      detail::product_size(DA::RowsAtCompileTime, DB::RowsAtCompileTime),
      detail::product_size(DA::ColsAtCompileTime, DB::ColsAtCompileTime)>;
  Result out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Derived>
typename Derived::Scalar orthogonality_error(const Eigen::MatrixBase<Derived>& m) {
  EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
  using Scalar = typename Derived::Scalar;
  return (m * m.transpose() - Matrix3<Scalar>::Identity()).norm();
}

template <typename Derived>
bool is_rotation(const Eigen::MatrixBase<Derived>& m,
                 typename Derived::Scalar tol = kRotationTolerance) {
  using std::abs;
  return m.allFinite() && orthogonality_error(m) <= tol &&
         abs(m.determinant() - typename Derived::Scalar(1)) <= tol;
}

template <typename Scalar>
struct PoseT {
  Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();

  bool is_valid(Scalar tol = Scalar(kRotationTolerance)) const {
    return is_rotation(rotation, tol) && translation.allFinite();
  }
};

// A 3D line as (direction; moment) with moment = point x direction.
template <typename Scalar>
struct PlueckerLineT {
  Vector3<Scalar> direction = Vector3<Scalar>::UnitZ();
  Vector3<Scalar> moment = Vector3<Scalar>::Zero();

  static PlueckerLineT through(const Vector3<Scalar>& point,
                               const Vector3<Scalar>& direction) {
    PlueckerLineT line;
    line.direction = direction.normalized();
    line.moment = point.cross(line.direction);
    return line;
  }

  Vector6<Scalar> coordinates() const {
    Vector6<Scalar> l;
    l << direction, moment;
    return l;
  }

  bool is_valid(Scalar tol = Scalar(1e-9)) const {
    using std::abs;
    return direction.allFinite() && moment.allFinite() &&
           abs(direction.norm() - Scalar(1)) <= Scalar(1e-12) &&
           abs(direction.dot(moment)) <= tol;
  }
};

// Unit bearing plus the camera-frame origin of the ray.
template <typename Scalar>
struct ObservedRayT {
  Vector3<Scalar> bearing = Vector3<Scalar>::UnitZ();
  Vector3<Scalar> offset = Vector3<Scalar>::Zero();
};

using Pose = PoseT<double>;
using PlueckerLine = PlueckerLineT<double>;
using ObservedRay = ObservedRayT<double>;
using Point3 = Eigen::Vector3d;

}  // namespace poseamm
