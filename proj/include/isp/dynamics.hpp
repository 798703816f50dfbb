// Rigid-body equations of motion for the two-axis gimbal and fixed-step integration.
//
// The platform pitches about y_p relative to the gimbal; the gimbal yaws about
// z_g relative to the base. Both bodies are suspended from their principal
// axes, so the inertia tensors are diagonal. The pitch channel follows Euler's
// equation about y_p; the yaw channel follows the combined gimbal+platform
// momentum balance about z_g:
//
//   T_yp  = Iyy_p*wdot_yp + (Ixx_p - Izz_p)*wx_p*wz_p
//   T_zgp = Jeq(theta)*wdot_zg + (Izz_p - Ixx_p)*sin(theta)*cos(theta)*wdot_xg
//         + (Iyy_g - Ixx_g)*wx_g*wy_g
//         + (Iyy_p - Ixx_p)*cos(theta)*wx_p*wy_p
//         + (Iyy_p - Izz_p)*sin(theta)*wy_p*wz_p
//         + Izz_p*theta_dot*wx_p*cos(theta) + Ixx_p*theta_dot*wz_p*sin(theta)
//   Jeq(theta) = Izz_g + Izz_p*cos^2(theta) + Ixx_p*sin^2(theta)
//
// Joint accelerations come from the gimbal-frame rate derivatives:
//   theta_ddot = wdot_yp - wdot_yg,  psi_ddot = wdot_zg - wdot_zb.

#pragma once

#include "isp/frames.hpp"

#include <functional>
#include <stdexcept>

namespace isp {

enum class BodyTag { Platform, Gimbal };

/// Principal moments of inertia, kg m^2.
struct InertiaTensor {
    double xx = 0.0;
    double yy = 0.0;
    double zz = 0.0;
    BodyTag tag = BodyTag::Platform;

    /// Validates positivity and the rigid-body triangle inequalities.
    static InertiaTensor principal(double xx, double yy, double zz, BodyTag tag);

    Mat3 matrix() const { return Vec3(xx, yy, zz).asDiagonal(); }
};

/// Joint friction: viscous plus Coulomb with a tanh-smoothed sign to keep the
/// vector field integrable near zero rate.
struct FrictionModel {
    double viscous = 0.0;       // N m s/rad
    double coulomb = 0.0;       // N m
    double smoothing_rate = 0.01; // rad/s, tanh(rate/smoothing_rate)

    /// Friction torque opposing the relative joint rate.
    double torque(double relative_rate) const;
};

/// Prescribed base motion at one instant: angular rate and its time
/// derivative, both in base-frame components.
struct BaseMotionSample {
    Vec3 rate = Vec3::Zero();
    Vec3 accel = Vec3::Zero();
};

using BaseMotionFn = std::function<BaseMotionSample(double)>;

/// Full dynamic state: joint angles/rates plus the base attitude.
struct DynamicState {
    GimbalAngles angles;
    Attitude base_attitude;
};

struct GimbalParams {
    InertiaTensor platform;
    InertiaTensor gimbal;
    FrictionModel pitch_friction;
    FrictionModel yaw_friction;
};

/// Motor torques held constant over one integration step.
struct JointTorques {
    double pitch = 0.0; // about y_p, N m
    double yaw = 0.0;   // about z_g, N m
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double t, const std::string& what_arg);
    double time() const { return time_; }

private:
    double time_ = 0.0;
};

/// Platform pitch-rate acceleration wdot_yp for a given net torque about y_p.
double pitch_acceleration(const InertiaTensor& platform, const Vec3& omega_p, double torque_yp);

/// Yaw-rate acceleration wdot_zg solved from the combined momentum balance.
/// `wdot_xg` is the gimbal-frame x rate derivative (base-motion coupling).
double yaw_acceleration(const GimbalParams& params, double theta, double theta_dot,
                        const Vec3& omega_g, const Vec3& omega_p, double wdot_xg,
                        double torque_zgp);

/// Classical fixed-step RK4 update of (psi, theta, psi_dot, theta_dot) and the
/// base attitude over [t, t+dt]. Motor torques are zero-order held; friction
/// and gyroscopic terms are evaluated at the substep states. Throws
/// DivergenceError if the state leaves the finite domain.
DynamicState step_dynamics(const DynamicState& state, const GimbalParams& params,
                           const JointTorques& motor_torques, const BaseMotionFn& base_motion,
                           double t, double dt);

/// Total rotational kinetic energy of gimbal plus platform, joules.
double system_energy(const DynamicState& state, const GimbalParams& params,
                     const Vec3& base_rate = Vec3::Zero());

} // namespace isp
