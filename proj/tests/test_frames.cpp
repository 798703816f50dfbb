#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isp/frames.hpp"

#include <cmath>
#include <random>

using namespace isp;

namespace {
constexpr double kDeg = M_PI / 180.0;
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(M_PI + 0.1) == doctest::Approx(-M_PI + 0.1));
    CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_angle(5.0 * M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("euler_dcm identity at zero angles") {
    const ChainDcms dcms = euler_dcm(GimbalAngles{});
    CHECK((dcms.gimbal_from_base - Mat3::Identity()).norm() == 0.0);
    CHECK((dcms.platform_from_gimbal - Mat3::Identity()).norm() == 0.0);
    CHECK((dcms.platform_from_base - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("euler_dcm single-axis yaw maps x_b to -y_g") {
    const ChainDcms dcms = euler_dcm(GimbalAngles{M_PI / 2.0, 0.0, 0.0, 0.0});
    const Vec3 x_in_g = dcms.gimbal_from_base * Vec3::UnitX();
    CHECK(x_in_g.x() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(x_in_g.y() == doctest::Approx(-1.0));
    CHECK((dcms.platform_from_gimbal - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("euler_dcm matches a direct matrix-multiplication oracle") {
    const double psi = -45.0 * kDeg;
    const double theta = 45.0 * kDeg;
    const ChainDcms dcms = euler_dcm(GimbalAngles{psi, theta, 0.0, 0.0});

    // Component-mapping matrices built independently from Eigen's axis-angle.
    const Mat3 gb = Eigen::AngleAxisd(-psi, Vec3::UnitZ()).toRotationMatrix();
    const Mat3 pg = Eigen::AngleAxisd(-theta, Vec3::UnitY()).toRotationMatrix();
    const Mat3 pb = pg * gb;

    CHECK((dcms.gimbal_from_base - gb).norm() < 1e-14);
    CHECK((dcms.platform_from_gimbal - pg).norm() < 1e-14);
    CHECK((dcms.platform_from_base - pb).norm() < 1e-14);
    CHECK(dcms.platform_from_base(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("rotation matrices stay orthonormal with unit determinant") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    for (int i = 0; i < 200; ++i) {
        const ChainDcms dcms = euler_dcm(GimbalAngles{angle(rng), angle(rng), 0.0, 0.0});
        for (const Mat3* r :
             {&dcms.gimbal_from_base, &dcms.platform_from_gimbal, &dcms.platform_from_base}) {
            CHECK((r->transpose() * (*r) - Mat3::Identity()).norm() < 1e-12);
            CHECK(std::abs(r->determinant() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("inverse composition restores identity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    for (int i = 0; i < 100; ++i) {
        const double psi = angle(rng);
        const double theta = angle(rng);
        const ChainDcms dcms = euler_dcm(GimbalAngles{psi, theta, 0.0, 0.0});
        const Mat3 inverse = rot_z(-psi) * rot_y(-theta);
        CHECK((inverse * dcms.platform_from_base - Mat3::Identity()).norm() < 1e-12);
    }
}

TEST_CASE("rate_chain at rest and with pure yaw rate") {
    const RateVector zero{Vec3::Zero(), FrameId::Base};
    const ChainedRates rest = rate_chain(zero, GimbalAngles{});
    CHECK(rest.omega_g.omega.norm() == 0.0);
    CHECK(rest.omega_p.omega.norm() == 0.0);

    const ChainedRates spin = rate_chain(zero, GimbalAngles{0.0, 30.0 * kDeg, 1.0, 0.0});
    CHECK(spin.omega_g.omega.isApprox(Vec3(0.0, 0.0, 1.0)));
    CHECK(spin.omega_p.omega.x() == doctest::Approx(-0.5));
    CHECK(spin.omega_p.omega.y() == doctest::Approx(0.0));
    CHECK(spin.omega_p.omega.z() == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("rate_chain cancels counter-rotation") {
    const RateVector wb{Vec3(0.0, 0.0, 1.0), FrameId::Base};
    const ChainedRates rates = rate_chain(wb, GimbalAngles{0.0, 0.0, -1.0, 0.0});
    CHECK(rates.omega_g.omega.norm() < 1e-15);
    CHECK(rates.omega_p.omega.norm() < 1e-15);
}

TEST_CASE("rate_chain rejects a wrong frame tag") {
    const RateVector wrong{Vec3::Zero(), FrameId::Gimbal};
    CHECK_THROWS_AS(rate_chain(wrong, GimbalAngles{}), std::invalid_argument);
}

TEST_CASE("rate_chain is linear in all rate inputs") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double psi = u(rng);
        const double theta = u(rng);
        const Vec3 wb1(u(rng), u(rng), u(rng));
        const Vec3 wb2(u(rng), u(rng), u(rng));
        const double pd1 = u(rng), pd2 = u(rng);
        const double td1 = u(rng), td2 = u(rng);

        const auto sum = rate_chain({wb1 + wb2, FrameId::Base},
                                    GimbalAngles{psi, theta, pd1 + pd2, td1 + td2});
        const auto a = rate_chain({wb1, FrameId::Base}, GimbalAngles{psi, theta, pd1, td1});
        const auto b = rate_chain({wb2, FrameId::Base}, GimbalAngles{psi, theta, pd2, td2});
        CHECK((sum.omega_p.omega - a.omega_p.omega - b.omega_p.omega).norm() < 1e-13);
        CHECK((sum.omega_g.omega - a.omega_g.omega - b.omega_g.omega).norm() < 1e-13);
    }
}

TEST_CASE("attitude_integrate holds still with zero rate") {
    Attitude att = attitude_from_axis_angle(Vec3(1.0, 2.0, 3.0), 0.7);
    const Attitude next = attitude_integrate(att, Vec3::Zero(), 0.01);
    CHECK(att.q.angularDistance(next.q) < 1e-15);
}

TEST_CASE("attitude_integrate closes a full revolution") {
    Attitude att;
    const Vec3 omega(0.0, 0.0, 2.0 * M_PI);
    for (int i = 0; i < 1000; ++i) {
        att = attitude_integrate(att, omega, 1e-3);
    }
    CHECK(att.q.angularDistance(Quat::Identity()) < 1e-6);
}

TEST_CASE("attitude_integrate matches the axis-angle closed form for a 90 degree pitch") {
    Attitude att;
    const Vec3 omega(0.0, M_PI / 2.0, 0.0);
    for (int i = 0; i < 1000; ++i) {
        att = attitude_integrate(att, omega, 1e-3);
    }
    const Attitude oracle = attitude_from_axis_angle(Vec3::UnitY(), M_PI / 2.0);
    CHECK(att.q.angularDistance(oracle.q) < 1e-6);
}

TEST_CASE("attitude_integrate forward then backward composes to identity") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const Vec3 omega(u(rng), u(rng), u(rng));
        const double dt = 0.01 / std::max(1.0, omega.norm());
        Attitude att = attitude_from_axis_angle(Vec3(u(rng), u(rng), u(rng)).normalized(), u(rng));
        const Attitude start = att;
        for (int k = 0; k < 100; ++k) {
            att = attitude_integrate(att, omega, dt);
        }
        for (int k = 0; k < 100; ++k) {
            att = attitude_integrate(att, -omega, dt);
        }
        CHECK(att.q.angularDistance(start.q) < 1e-6);
    }
}

TEST_CASE("attitude stays unit norm through integration") {
    Attitude att;
    const Vec3 omega(1.3, -0.7, 2.1);
    for (int i = 0; i < 5000; ++i) {
        att = attitude_integrate(att, omega, 1e-3);
        CHECK(std::abs(att.q.norm() - 1.0) < 1e-9);
    }
}
