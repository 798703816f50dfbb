#include "isp/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace isp {

InertiaTensor InertiaTensor::principal(double xx, double yy, double zz, BodyTag tag) {
    if (!(xx > 0.0 && yy > 0.0 && zz > 0.0)) {
        throw std::invalid_argument("InertiaTensor: principal moments must be positive");
    }
    if (xx + yy < zz || yy + zz < xx || xx + zz < yy) {
        throw std::invalid_argument("InertiaTensor: triangle inequality violated");
    }
    return InertiaTensor{xx, yy, zz, tag};
}

double FrictionModel::torque(double relative_rate) const {
    const double smooth_sign = std::tanh(relative_rate / smoothing_rate);
    return -(viscous * relative_rate + coulomb * smooth_sign);
}

DivergenceError::DivergenceError(double t, const std::string& what_arg)
    : std::runtime_error(what_arg), time_(t) {}

double pitch_acceleration(const InertiaTensor& platform, const Vec3& omega_p, double torque_yp) {
    return (torque_yp - (platform.xx - platform.zz) * omega_p.x() * omega_p.z()) / platform.yy;
}

double yaw_acceleration(const GimbalParams& params, double theta, double theta_dot,
                        const Vec3& omega_g, const Vec3& omega_p, double wdot_xg,
                        double torque_zgp) {
    const InertiaTensor& ip = params.platform;
    const InertiaTensor& ig = params.gimbal;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double j_eq = ig.zz + ip.zz * c * c + ip.xx * s * s;

    double coupling = (ip.zz - ip.xx) * s * c * wdot_xg;
    coupling += (ig.yy - ig.xx) * omega_g.x() * omega_g.y();
    coupling += (ip.yy - ip.xx) * c * omega_p.x() * omega_p.y();
    coupling += (ip.yy - ip.zz) * s * omega_p.y() * omega_p.z();
    coupling += ip.zz * theta_dot * omega_p.x() * c;
    coupling += ip.xx * theta_dot * omega_p.z() * s;

    return (torque_zgp - coupling) / j_eq;
}

namespace {

struct JointState {
    double psi, theta, psi_dot, theta_dot;
};

struct JointDeriv {
    double psi_dot, theta_dot, psi_ddot, theta_ddot;
};

JointDeriv joint_derivatives(const JointState& js, const GimbalParams& params,
                             const JointTorques& motor, const BaseMotionSample& base) {
    GimbalAngles angles{js.psi, js.theta, js.psi_dot, js.theta_dot};
    RateVector wb{base.rate, FrameId::Base};
    const ChainedRates rates = rate_chain(wb, angles);
    const Vec3& wg = rates.omega_g.omega;
    const Vec3& wp = rates.omega_p.omega;

    const double cpsi = std::cos(js.psi);
    const double spsi = std::sin(js.psi);
    // Gimbal-frame derivatives of the base-driven rate components.
    const double wdot_xg = js.psi_dot * wg.y() + cpsi * base.accel.x() + spsi * base.accel.y();
    const double wdot_yg = -js.psi_dot * wg.x() - spsi * base.accel.x() + cpsi * base.accel.y();

    const double torque_yp = motor.pitch + params.pitch_friction.torque(js.theta_dot);
    const double torque_zgp = motor.yaw + params.yaw_friction.torque(js.psi_dot);

    const double wdot_yp = pitch_acceleration(params.platform, wp, torque_yp);
    const double wdot_zg =
        yaw_acceleration(params, js.theta, js.theta_dot, wg, wp, wdot_xg, torque_zgp);

    JointDeriv d;
    d.psi_dot = js.psi_dot;
    d.theta_dot = js.theta_dot;
    d.psi_ddot = wdot_zg - base.accel.z();
    d.theta_ddot = wdot_yp - wdot_yg;
    return d;
}

JointState advance(const JointState& s, const JointDeriv& d, double h) {
    return {s.psi + h * d.psi_dot, s.theta + h * d.theta_dot, s.psi_dot + h * d.psi_ddot,
            s.theta_dot + h * d.theta_ddot};
}

} // namespace

DynamicState step_dynamics(const DynamicState& state, const GimbalParams& params,
                           const JointTorques& motor_torques, const BaseMotionFn& base_motion,
                           double t, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step_dynamics: dt must be positive");
    }
    const BaseMotionSample b0 = base_motion(t);
    const BaseMotionSample bh = base_motion(t + 0.5 * dt);
    const BaseMotionSample b1 = base_motion(t + dt);

    const JointState s0{state.angles.psi, state.angles.theta, state.angles.psi_dot,
                        state.angles.theta_dot};
    const JointDeriv k1 = joint_derivatives(s0, params, motor_torques, b0);
    const JointDeriv k2 = joint_derivatives(advance(s0, k1, 0.5 * dt), params, motor_torques, bh);
    const JointDeriv k3 = joint_derivatives(advance(s0, k2, 0.5 * dt), params, motor_torques, bh);
    const JointDeriv k4 = joint_derivatives(advance(s0, k3, dt), params, motor_torques, b1);

    DynamicState out;
    out.angles.psi = s0.psi + (dt / 6.0) * (k1.psi_dot + 2 * k2.psi_dot + 2 * k3.psi_dot + k4.psi_dot);
    out.angles.theta =
        s0.theta + (dt / 6.0) * (k1.theta_dot + 2 * k2.theta_dot + 2 * k3.theta_dot + k4.theta_dot);
    out.angles.psi_dot =
        s0.psi_dot + (dt / 6.0) * (k1.psi_ddot + 2 * k2.psi_ddot + 2 * k3.psi_ddot + k4.psi_ddot);
    out.angles.theta_dot = s0.theta_dot + (dt / 6.0) * (k1.theta_ddot + 2 * k2.theta_ddot +
                                                        2 * k3.theta_ddot + k4.theta_ddot);
    out.base_attitude = attitude_integrate(state.base_attitude, b0.rate, bh.rate, b1.rate, dt);

    if (!std::isfinite(out.angles.psi) || !std::isfinite(out.angles.theta) ||
        !std::isfinite(out.angles.psi_dot) || !std::isfinite(out.angles.theta_dot)) {
        std::ostringstream msg;
        msg << "state diverged at t=" << t + dt << " s";
        throw DivergenceError(t + dt, msg.str());
    }
    return out;
}

double system_energy(const DynamicState& state, const GimbalParams& params,
                     const Vec3& base_rate) {
    RateVector wb{base_rate, FrameId::Base};
    const ChainedRates rates = rate_chain(wb, state.angles);
    const Vec3& wg = rates.omega_g.omega;
    const Vec3& wp = rates.omega_p.omega;
    const double gimbal_term = 0.5 * wg.dot(params.gimbal.matrix() * wg);
    const double platform_term = 0.5 * wp.dot(params.platform.matrix() * wp);
    return gimbal_term + platform_term;
}

} // namespace isp
