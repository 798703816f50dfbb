#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isp/actuation.hpp"
#include "isp/sensing.hpp"

#include <cmath>
#include <random>

using namespace isp;

namespace {
constexpr double kDeg = M_PI / 180.0;
}

TEST_CASE("motor torque: stall, no-load and clamp") {
    const MotorParams m; // Kt = Ke = 0.04, R = 1, 24 V
    CHECK(motor_torque(0.0, 0.0, m) == 0.0);
    CHECK(motor_torque(24.0, 0.0, m) == doctest::Approx(0.96));
    CHECK(motor_torque(24.0, 600.0, m) == doctest::Approx(0.0));
    CHECK(motor_torque(30.0, 0.0, m) == doctest::Approx(motor_torque(24.0, 0.0, m)));
}

TEST_CASE("motor torque is odd and monotone in voltage") {
    const MotorParams m;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> volts(-30.0, 30.0);
    std::uniform_real_distribution<double> rate(-50.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        const double v = volts(rng);
        const double w = rate(rng);
        CHECK(motor_torque(v, w, m) == doctest::Approx(-motor_torque(-v, -w, m)));
    }
    for (int i = 0; i < 100; ++i) {
        const double w = rate(rng);
        double prev = motor_torque(-30.0, w, m);
        for (double v = -25.0; v <= 30.0; v += 5.0) {
            const double tau = motor_torque(v, w, m);
            CHECK(tau >= prev - 1e-15);
            prev = tau;
        }
    }
}

TEST_CASE("gyro is a pass-through when ideal") {
    GyroModel model;
    model.noise_std = 0.0;
    model.bias = 0.0;
    GyroSensor gyro(model, 1, "gyro");
    const RateVector truth{Vec3(0.1, -0.2, 0.3), FrameId::Platform};
    const RateVector meas = gyro.sample(truth);
    CHECK(meas.omega.isApprox(truth.omega));
}

TEST_CASE("gyro clamps at full scale") {
    GyroModel model;
    model.noise_std = 0.0;
    model.bias = 0.0;
    GyroSensor gyro(model, 1, "gyro");
    const RateVector truth{Vec3(300.0 * kDeg, -400.0 * kDeg, 0.0), FrameId::Platform};
    const RateVector meas = gyro.sample(truth);
    CHECK(meas.omega.x() == doctest::Approx(250.0 * kDeg));
    CHECK(meas.omega.y() == doctest::Approx(-250.0 * kDeg));
}

TEST_CASE("gyro noise statistics match the configured deviation") {
    GyroModel model;
    model.noise_std = 0.001;
    model.bias = 0.0;
    GyroSensor gyro(model, 99, "gyro");
    const RateVector truth{Vec3::Zero(), FrameId::Platform};
    double sum = 0.0;
    double sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double v = gyro.sample(truth).omega.x();
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double std = std::sqrt(sum2 / n - mean * mean);
    CHECK(std == doctest::Approx(0.001).epsilon(0.05));
}

TEST_CASE("gyro output never exceeds full scale") {
    GyroModel model;
    model.noise_std = 0.5;
    GyroSensor gyro(model, 123, "gyro");
    const RateVector truth{Vec3(4.0, -4.0, 0.0), FrameId::Platform};
    for (int i = 0; i < 1000; ++i) {
        const RateVector meas = gyro.sample(truth);
        for (int axis = 0; axis < 3; ++axis) {
            CHECK(std::abs(meas.omega[axis]) <= model.full_scale + 1e-15);
        }
    }
}

TEST_CASE("sensor streams are reproducible and independent") {
    GyroModel model;
    model.noise_std = 0.01;
    GyroSensor a(model, 7, "gyro");
    GyroSensor b(model, 7, "gyro");
    GyroSensor other(model, 7, "gyro_other");
    const RateVector truth{Vec3::Zero(), FrameId::Platform};
    bool all_equal = true;
    bool any_differs = false;
    for (int i = 0; i < 100; ++i) {
        const double va = a.sample(truth).omega.x();
        const double vb = b.sample(truth).omega.x();
        const double vo = other.sample(truth).omega.x();
        all_equal = all_equal && va == vb;
        any_differs = any_differs || va != vo;
    }
    CHECK(all_equal);
    CHECK(any_differs);
}

TEST_CASE("pot wraps and quantizes") {
    PotModel model;
    model.noise_std = 0.0;
    PotSensor pot(model, 1, "pot");
    CHECK(pot.sample(0.0) == 0.0);
    CHECK(pot.sample(M_PI + 0.1) == doctest::Approx(-M_PI + 0.1).epsilon(1e-3));

    // Half a quantization step rounds away from zero.
    const double step = model.quantization_step;
    PotSensor pot2(model, 1, "pot");
    CHECK(pot2.sample(0.5 * step) == doctest::Approx(step));
    CHECK(pot2.sample(-0.5 * step) == doctest::Approx(-step));
    CHECK(pot2.sample(0.49 * step) == doctest::Approx(0.0));
}

TEST_CASE("quantize helper") {
    CHECK(quantize(0.25, 0.0) == 0.25);
    CHECK(quantize(0.26, 0.1) == doctest::Approx(0.3));
    CHECK(quantize(-0.25, 0.1) == doctest::Approx(-0.3)); // half away from zero
}
