#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hara {

// Tangent-space element: axis * angle, angle in radians.
using RotationVector = Eigen::Vector3d;

// Element of SO(3), stored as a unit quaternion with non-negative scalar part
// (q and -q map to the same object). Matrices are produced on demand.
class Rotation {
 public:
  Rotation() : q_(Eigen::Quaterniond::Identity()) {}

  static Rotation Identity() { return Rotation(); }

  // Normalizes and canonicalizes the sign. Throws kInvalidArgument for a
  // non-finite or zero quaternion.
  static Rotation FromQuaternion(const Eigen::Quaterniond& q);
  static Rotation FromQuaternion(double w, double x, double y, double z) {
    return FromQuaternion(Eigen::Quaterniond(w, x, y, z));
  }

  // Requires M^T M = I and det(M) = +1 within 1e-9 per entry.
  static Rotation FromMatrix(const Eigen::Matrix3d& m);

  static Rotation FromRotationVector(const RotationVector& v);

  const Eigen::Quaterniond& quaternion() const { return q_; }
  Eigen::Matrix3d matrix() const { return q_.toRotationMatrix(); }

  Rotation inverse() const { return Rotation(q_.conjugate(), Canonical{}); }

  Rotation operator*(const Rotation& other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return q_ * p; }

  // Bitwise equality of the stored quaternion.
  bool operator==(const Rotation& other) const {
    return q_.coeffs() == other.q_.coeffs();
  }

 private:
  struct Canonical {};
  Rotation(const Eigen::Quaterniond& q, Canonical);

  Eigen::Quaterniond q_;
};

// Taylor branches below this angle.
inline constexpr double kSmallAngle = 1e-6;
// Within this distance of pi the matrix log reads the axis from the
// symmetric part.
inline constexpr double kNearPi = 1e-4;

// Rodrigues exponential. Throws kInvalidArgument on non-finite input.
Rotation Exp(const RotationVector& v);

// Principal logarithm, norm in [0, pi].
RotationVector Log(const Rotation& r);

// Logarithm computed directly on a rotation matrix (trace formula, with the
// symmetric-part axis extraction near pi). Used as an independent route to
// Log(Rotation) and for matrices that are not wrapped yet.
RotationVector LogMatrix(const Eigen::Matrix3d& m);

// ||Log(a b^T)|| in [0, pi].
double AngularDistance(const Rotation& a, const Rotation& b);

// ||A - B||_F = 2 sqrt(2) sin(d/2), in [0, 2 sqrt(2)].
double ChordalDistance(const Rotation& a, const Rotation& b);

// Log(a b^T). For small-angle a = Exp(u_a), b = Exp(u_b) this approximates
// u_a - u_b (first-order BCH).
RotationVector BchResidual(const Rotation& a, const Rotation& b);

Eigen::Matrix3d Hat(const Eigen::Vector3d& v);

// Angle/chordal conversions.
double ChordalFromAngle(double angle);
double AngleFromChordal(double chordal);

}  // namespace hara
