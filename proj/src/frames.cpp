#include "isp/frames.hpp"

#include <cmath>
#include <stdexcept>

namespace isp {

double wrap_angle(double angle) {
    double a = std::remainder(angle, 2.0 * M_PI); // lands in [-pi, pi]
    if (a <= -M_PI) {
        a += 2.0 * M_PI;
    }
    return a;
}

Mat3 rot_z(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat3 r;
    r << c, s, 0.0,
        -s, c, 0.0,
        0.0, 0.0, 1.0;
    return r;
}

Mat3 rot_y(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat3 r;
    r << c, 0.0, -s,
        0.0, 1.0, 0.0,
        s, 0.0, c;
    return r;
}

ChainDcms euler_dcm(const GimbalAngles& angles) {
    ChainDcms dcms;
    dcms.gimbal_from_base = rot_z(angles.psi);
    dcms.platform_from_gimbal = rot_y(angles.theta);
    dcms.platform_from_base = dcms.platform_from_gimbal * dcms.gimbal_from_base;
    return dcms;
}

ChainedRates rate_chain(const RateVector& omega_b, const GimbalAngles& angles) {
    if (omega_b.frame != FrameId::Base) {
        throw std::invalid_argument("rate_chain: base rate must be expressed in frame B");
    }
    const ChainDcms dcms = euler_dcm(angles);
    ChainedRates out;
    out.omega_g.frame = FrameId::Gimbal;
    out.omega_g.omega = dcms.gimbal_from_base * omega_b.omega + Vec3(0.0, 0.0, angles.psi_dot);
    out.omega_p.frame = FrameId::Platform;
    out.omega_p.omega =
        dcms.platform_from_gimbal * out.omega_g.omega + Vec3(0.0, angles.theta_dot, 0.0);
    return out;
}

namespace {

// d/dt of the quaternion coefficients for body rate omega: qdot = 0.5 * q (x) [0, omega].
Eigen::Vector4d quat_deriv(const Eigen::Vector4d& q, const Vec3& w) {
    const Quat qq(q[0], q[1], q[2], q[3]);
    const Quat rate(0.0, w.x(), w.y(), w.z());
    const Quat qd = qq * rate;
    return 0.5 * Eigen::Vector4d(qd.w(), qd.x(), qd.y(), qd.z());
}

} // namespace

Attitude attitude_integrate(const Attitude& att, const Vec3& omega_body, double dt) {
    return attitude_integrate(att, omega_body, omega_body, omega_body, dt);
}

Attitude attitude_integrate(const Attitude& att, const Vec3& omega_start, const Vec3& omega_mid,
                            const Vec3& omega_end, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("attitude_integrate: dt must be positive");
    }
    Eigen::Vector4d q(att.q.w(), att.q.x(), att.q.y(), att.q.z());
    const Eigen::Vector4d k1 = quat_deriv(q, omega_start);
    const Eigen::Vector4d k2 = quat_deriv(q + 0.5 * dt * k1, omega_mid);
    const Eigen::Vector4d k3 = quat_deriv(q + 0.5 * dt * k2, omega_mid);
    const Eigen::Vector4d k4 = quat_deriv(q + dt * k3, omega_end);
    q += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    Attitude out;
    out.q = Quat(q[0], q[1], q[2], q[3]).normalized();
    return out;
}

Attitude attitude_from_axis_angle(const Vec3& axis, double angle) {
    Attitude out;
    out.q = Quat(Eigen::AngleAxisd(angle, axis.normalized()));
    return out;
}

} // namespace isp
