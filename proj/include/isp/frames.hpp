// Reference frames and kinematics for the two-axis gimbal chain I -> B -> G -> P.
//
// Sign conventions (used everywhere in this project):
//   - yaw psi rotates the gimbal relative to the base, right-handed about +z_b (= +z_g)
//   - pitch theta rotates the platform relative to the gimbal, right-handed about +y_g (= +y_p)
// The boresight (line of sight) is +x_p.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace isp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

enum class FrameId { Inertial, Base, Gimbal, Platform };

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Relative gimbal angles and rates. Angles in radians, rates in rad/s.
struct GimbalAngles {
    double psi = 0.0;        // yaw, base -> gimbal about z
    double theta = 0.0;      // pitch, gimbal -> platform about y
    double psi_dot = 0.0;
    double theta_dot = 0.0;

    GimbalAngles wrapped() const {
        return {wrap_angle(psi), wrap_angle(theta), psi_dot, theta_dot};
    }
};

/// Angular rate with the frame its components are expressed in.
struct RateVector {
    Vec3 omega = Vec3::Zero();
    FrameId frame = FrameId::Base;
};

/// Direction cosine matrices between adjacent frames of the chain.
/// Each matrix maps vector components from the lower frame into the upper one,
/// e.g. v_g = gimbal_from_base * v_b.
struct ChainDcms {
    Mat3 gimbal_from_base;     // Rz(psi)
    Mat3 platform_from_gimbal; // Ry(theta)
    Mat3 platform_from_base;   // product of the two
};

/// Component-mapping rotation about +z by `angle` (frame rotation).
Mat3 rot_z(double angle);
/// Component-mapping rotation about +y by `angle` (frame rotation).
Mat3 rot_y(double angle);

/// Builds the yaw-pitch DCM chain for the given gimbal angles.
ChainDcms euler_dcm(const GimbalAngles& angles);

struct ChainedRates {
    RateVector omega_g; // expressed in G
    RateVector omega_p; // expressed in P
};

/// Chains the base angular rate through the gimbal joints:
///   omega_g = L_GB * omega_b + (0, 0, psi_dot)
///   omega_p = L_PG * omega_g + (0, theta_dot, 0)
/// `omega_b` must be expressed in the base frame.
ChainedRates rate_chain(const RateVector& omega_b, const GimbalAngles& angles);

/// Orientation of a frame relative to Inertial, stored as a unit quaternion.
/// rotate(v_body) gives inertial components; conjugate maps the other way.
struct Attitude {
    Quat q = Quat::Identity();

    Vec3 to_inertial(const Vec3& v_body) const { return q * v_body; }
    Vec3 to_body(const Vec3& v_inertial) const { return q.conjugate() * v_inertial; }
    Mat3 body_to_inertial() const { return q.toRotationMatrix(); }
};

/// Advances `att` by the body rate `omega_body` held constant over dt, then
/// renormalizes. Fourth-order accurate (RK4 on the quaternion kinematics),
/// matching the dynamics integrator.
Attitude attitude_integrate(const Attitude& att, const Vec3& omega_body, double dt);

/// RK4 attitude step with the body rate sampled at the start, midpoint and end
/// of the interval (used when the rate is a prescribed function of time).
Attitude attitude_integrate(const Attitude& att, const Vec3& omega_start, const Vec3& omega_mid,
                            const Vec3& omega_end, double dt);

/// Attitude built from an axis-angle rotation (test oracle helper).
Attitude attitude_from_axis_angle(const Vec3& axis, double angle);

} // namespace isp
