#include "hara/so3.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hara/error.h"

namespace hara {
namespace {

constexpr double kSqrt8 = 2.8284271247461900976;
// Norm drift tolerated before a quaternion is renormalized. Keeping values
// untouched inside this band lets saved graphs reload bit-exactly.
constexpr double kNormBand = 1e-13;

Eigen::Quaterniond Canonicalize(Eigen::Quaterniond q) {
  bool flip = q.w() < 0.0;
  if (q.w() == 0.0) {
    if (q.x() != 0.0) {
      flip = q.x() < 0.0;
    } else if (q.y() != 0.0) {
      flip = q.y() < 0.0;
    } else {
      flip = q.z() < 0.0;
    }
  }
  if (flip) q.coeffs() = -q.coeffs();
  return q;
}

Eigen::Quaterniond KeepUnit(Eigen::Quaterniond q) {
  const double n = q.norm();
  if (std::abs(n - 1.0) > kNormBand) q.coeffs() /= n;
  return q;
}

Eigen::Vector3d Vee(const Eigen::Matrix3d& m) {
  return Eigen::Vector3d(m(2, 1), m(0, 2), m(1, 0));
}

}  // namespace

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kInvalidNode: return "invalid-node";
    case ErrorCode::kInvalidEdge: return "invalid-edge";
    case ErrorCode::kDuplicateConstraint: return "duplicate-constraint";
    case ErrorCode::kMissingConstraint: return "missing-constraint";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kMissingField: return "missing-field";
    case ErrorCode::kNoOverlap: return "no-overlap";
    case ErrorCode::kComponentExhausted: return "component-exhausted";
    case ErrorCode::kNumericalFailure: return "numerical-failure";
    case ErrorCode::kIoError: return "io-error";
  }
  return "unknown";
}

Rotation::Rotation(const Eigen::Quaterniond& q, Canonical)
    : q_(Canonicalize(q)) {}

Rotation Rotation::FromQuaternion(const Eigen::Quaterniond& q) {
  if (!q.coeffs().allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite quaternion");
  }
  const double n = q.norm();
  if (n < 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "zero-norm quaternion");
  }
  return Rotation(KeepUnit(q), Canonical{});
}

Rotation Rotation::FromMatrix(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite rotation matrix");
  }
  const double orth =
      (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (orth > 1e-9 || std::abs(m.determinant() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "matrix is not a proper rotation (orthogonality error " +
                    std::to_string(orth) + ")");
  }
  // Eigen uses Shepperd's method (largest diagonal pivot), stable at pi.
  return FromQuaternion(Eigen::Quaterniond(m));
}

Rotation Rotation::FromRotationVector(const RotationVector& v) {
  return Exp(v);
}

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(KeepUnit(q_ * other.q_), Canonical{});
}

Rotation Exp(const RotationVector& v) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite rotation vector");
  }
  const double theta2 = v.squaredNorm();
  const double theta = std::sqrt(theta2);
  double w;
  double s;
  if (theta < kSmallAngle) {
    w = 1.0 - theta2 / 8.0;
    s = 0.5 - theta2 / 48.0;
  } else {
    w = std::cos(0.5 * theta);
    s = std::sin(0.5 * theta) / theta;
  }
  return Rotation::FromQuaternion(
      Eigen::Quaterniond(w, s * v.x(), s * v.y(), s * v.z()));
}

RotationVector Log(const Rotation& r) {
  const Eigen::Quaterniond& q = r.quaternion();
  const Eigen::Vector3d v = q.vec();
  const double n = v.norm();
  const double w = q.w();  // >= 0 by canonicalization
  const double theta = 2.0 * std::atan2(n, w);
  if (theta < kSmallAngle) {
    // theta / n = (2 / w) (1 - n^2 / (3 w^2)) + O(n^4)
    return (2.0 / w) * (1.0 - n * n / (3.0 * w * w)) * v;
  }
  return (theta / n) * v;
}

RotationVector LogMatrix(const Eigen::Matrix3d& m) {
  const Eigen::Vector3d skew = 0.5 * Vee(m - m.transpose());
  const double sin_theta = skew.norm();
  const double cos_theta = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double theta = std::atan2(sin_theta, cos_theta);

  if (theta < kSmallAngle) {
    // theta / sin(theta) = 1 + theta^2 / 6 + O(theta^4)
    return (1.0 + theta * theta / 6.0) * skew;
  }
  if (std::numbers::pi - theta < kNearPi) {
    // (M + M^T)/2 = cos(theta) I + (1 - cos(theta)) u u^T
    const Eigen::Matrix3d uut =
        (0.5 * (m + m.transpose()) - cos_theta * Eigen::Matrix3d::Identity()) /
        (1.0 - cos_theta);
    Eigen::Index k;
    uut.diagonal().maxCoeff(&k);
    Eigen::Vector3d axis = uut.col(k) / std::sqrt(uut(k, k));
    axis.normalize();
    if (axis.dot(skew) < 0.0) axis = -axis;
    return theta * axis;
  }
  return (theta / sin_theta) * skew;
}

double AngularDistance(const Rotation& a, const Rotation& b) {
  const Eigen::Quaterniond q = a.quaternion() * b.quaternion().conjugate();
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

double ChordalDistance(const Rotation& a, const Rotation& b) {
  const Eigen::Quaterniond q = a.quaternion() * b.quaternion().conjugate();
  // For a unit quaternion with w >= 0, ||vec|| = sin(theta / 2).
  const double s = std::min(q.vec().norm() / q.norm(), 1.0);
  return kSqrt8 * s;
}

RotationVector BchResidual(const Rotation& a, const Rotation& b) {
  return Log(a * b.inverse());
}

Eigen::Matrix3d Hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

double ChordalFromAngle(double angle) {
  return kSqrt8 * std::sin(0.5 * angle);
}

double AngleFromChordal(double chordal) {
  return 2.0 * std::asin(std::clamp(chordal / kSqrt8, 0.0, 1.0));
}

}  // namespace hara
