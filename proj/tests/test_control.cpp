#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isp/control.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <random>

using namespace isp;

namespace {

// Roots of a real polynomial (highest degree first) via the companion matrix.
std::vector<std::complex<double>> poly_roots(const std::vector<double>& coeffs) {
    std::vector<double> c = coeffs;
    while (c.size() > 1 && c.front() == 0.0) {
        c.erase(c.begin());
    }
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) {
        return {};
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        companion(0, i) = -c[i + 1] / c[0];
    }
    companion.block(1, 0, n - 1, n - 1).setIdentity();
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
    std::vector<std::complex<double>> roots(n);
    for (int i = 0; i < n; ++i) {
        roots[i] = solver.eigenvalues()[i];
    }
    return roots;
}

// Controllable-canonical state space of a proper transfer function, used as
// an independent continuous-time oracle.
struct StateSpace {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::RowVectorXd c;
    double d = 0.0;
};

StateSpace tf_to_ss(const TransferFunction& tf) {
    std::vector<double> den = tf.den;
    std::vector<double> num(den.size(), 0.0);
    for (std::size_t i = 0; i < tf.num.size(); ++i) {
        num[den.size() - tf.num.size() + i] = tf.num[i];
    }
    const double lead = den[0];
    for (double& v : den) {
        v /= lead;
    }
    for (double& v : num) {
        v /= lead;
    }
    const int n = static_cast<int>(den.size()) - 1;
    StateSpace ss;
    ss.d = num[0];
    ss.a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        ss.a(0, i) = -den[i + 1];
    }
    if (n > 1) {
        ss.a.block(1, 0, n - 1, n - 1).setIdentity();
    }
    ss.b = Eigen::VectorXd::Zero(n);
    ss.b[0] = 1.0;
    ss.c = Eigen::RowVectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        ss.c[i] = num[i + 1] - den[i + 1] * ss.d;
    }
    return ss;
}

// Dense RK4 step response of a transfer function.
std::vector<double> continuous_step_response(const TransferFunction& tf, double t_end,
                                             double sample_dt, double integration_dt) {
    const StateSpace ss = tf_to_ss(tf);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.a.rows());
    std::vector<double> out;
    const int steps_per_sample = static_cast<int>(std::round(sample_dt / integration_dt));
    const int samples = static_cast<int>(std::round(t_end / sample_dt));
    const auto deriv = [&](const Eigen::VectorXd& state) {
        return (ss.a * state + ss.b).eval();
    };
    for (int s = 0; s < samples; ++s) {
        out.push_back(ss.c * x + ss.d);
        for (int k = 0; k < steps_per_sample; ++k) {
            const Eigen::VectorXd k1 = deriv(x);
            const Eigen::VectorXd k2 = deriv(x + 0.5 * integration_dt * k1);
            const Eigen::VectorXd k3 = deriv(x + 0.5 * integration_dt * k2);
            const Eigen::VectorXd k4 = deriv(x + integration_dt * k3);
            x += (integration_dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return out;
}

} // namespace

TEST_CASE("state-space oracle matches the transfer function it came from") {
    const TransferFunction tf{{2.0, 6.0}, {1.0, 3.0, 5.0}};
    const StateSpace ss = tf_to_ss(tf);
    for (double f : {0.01, 0.1, 1.0, 10.0}) {
        const std::complex<double> s(0.0, 2.0 * M_PI * f);
        const Eigen::MatrixXcd si =
            s * Eigen::MatrixXcd::Identity(ss.a.rows(), ss.a.cols()) - ss.a.cast<std::complex<double>>();
        const std::complex<double> h =
            (ss.c.cast<std::complex<double>>() * si.inverse() * ss.b.cast<std::complex<double>>())(0) +
            ss.d;
        const std::complex<double> expected = tf.at_frequency(f);
        CHECK(std::abs(h - expected) < 1e-9 * std::abs(expected));
    }
}

TEST_CASE("frequency response of an integrator") {
    const TransferFunction tf = TransferFunction::integrator();
    const ResponseSummary r = frequency_response(tf, {1.0 / (2.0 * M_PI)});
    CHECK(r.points[0].magnitude_db == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.points[0].phase_deg == doctest::Approx(-90.0));
}

TEST_CASE("first-order pole has its half-power point at the corner") {
    const TransferFunction tf{{1.0}, {1.0, 1.0}}; // 1/(s+1)
    const ResponseSummary r = frequency_response(tf, {0.1});
    REQUIRE(r.bandwidth_hz.has_value());
    CHECK(*r.bandwidth_hz == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-4));
}

TEST_CASE("second-order resonance peak matches the analytic formula") {
    const double zeta = 0.5;
    const double wn = 2.0 * M_PI * 5.0;
    const TransferFunction cl{{wn * wn}, {1.0, 2.0 * zeta * wn, wn * wn}};
    const ResponseSummary r = frequency_response(cl, {1.0});
    const double expected_db = 20.0 * std::log10(1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta)));
    CHECK(expected_db == doctest::Approx(1.2494).epsilon(1e-3));
    CHECK(r.resonance_peak_db == doctest::Approx(expected_db).epsilon(1e-3));
}

TEST_CASE("margins of a single-integrator loop") {
    // L = wc/s: phase margin is exactly 90 deg, gain margin unbounded.
    const double wc = 2.0 * M_PI * 10.0;
    const TransferFunction loop{{wc}, {1.0, 0.0}};
    const ResponseSummary r = frequency_response(loop, {1.0});
    REQUIRE(r.phase_margin_deg.has_value());
    CHECK(*r.phase_margin_deg == doctest::Approx(90.0).epsilon(1e-6));
    CHECK_FALSE(r.gain_margin_db.has_value());
    REQUIRE(r.gain_crossover_hz.has_value());
    CHECK(*r.gain_crossover_hz == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("design_loop gain formula on a pure inertia plant") {
    const double j = 0.0164;
    const TransferFunction plant{{1.0}, {j, 0.0}};
    LoopSpec spec;
    spec.form = ControllerForm::P;
    spec.crossover_hz = 38.0;
    spec.max_resonance_db = 3.0;
    spec.compensator_pole_hz = 0.0;
    const DesignResult d = design_loop(plant, spec);
    CHECK(d.kp == doctest::Approx(j * 2.0 * M_PI * 38.0).epsilon(1e-9)); // = 3.916
    CHECK(d.closed_loop_bandwidth_hz == doctest::Approx(38.0).epsilon(1e-3));
    CHECK(d.closed_loop_resonance_db < 0.01);
    CHECK(d.backoff_iterations == 0);
}

TEST_CASE("design_loop rejects a plant with no crossover") {
    const TransferFunction plant = TransferFunction::gain(1.0);
    LoopSpec spec;
    spec.form = ControllerForm::P;
    spec.crossover_hz = 10.0;
    CHECK_THROWS_AS(design_loop(plant, spec), DesignError);
}

TEST_CASE("designed stabilization loop meets its shape targets") {
    const MotorParams motor;
    const TransferFunction plant = rate_loop_plant(0.0164, motor, 0.0005);
    LoopSpec spec;
    spec.form = ControllerForm::PI;
    spec.crossover_hz = 38.0;
    spec.max_resonance_db = 3.0;
    spec.compensator_pole_hz = 150.0;
    const DesignResult d = design_loop(plant, spec);

    CHECK(d.closed_loop_bandwidth_hz > 30.4);
    CHECK(d.closed_loop_bandwidth_hz < 45.6);
    CHECK(d.closed_loop_resonance_db < 3.0);
    CHECK(d.ki == doctest::Approx(2.0 * M_PI * 3.8));

    // The reported crossover really is the 0 dB point of C*G.
    const TransferFunction open = d.controller * plant;
    CHECK(std::abs(open.at_frequency(d.crossover_hz)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stabilization loop rejects the in-band disturbance envelope by 20 dB") {
    // 0.05 rad/s at 5 Hz is the measured operating envelope; the linearized
    // sensitivity at 5 Hz must attenuate it at least a hundredfold in power.
    const MotorParams motor;
    const TransferFunction plant = rate_loop_plant(0.0164, motor, 0.0005);
    LoopSpec spec;
    spec.form = ControllerForm::PI;
    spec.crossover_hz = 38.0;
    spec.max_resonance_db = 3.0;
    spec.compensator_pole_hz = 150.0;
    const DesignResult d = design_loop(plant, spec);
    const TransferFunction open = d.controller * plant;
    const std::complex<double> l = open.at_frequency(5.0);
    const double sensitivity_db = -20.0 * std::log10(std::abs(1.0 + l));
    CHECK(sensitivity_db < -20.0);
}

TEST_CASE("tustin of the pure integrator") {
    const DiscreteController d = tustin_discretize(TransferFunction::integrator(), 1e-3);
    REQUIRE(d.feedforward().size() == 2);
    REQUIRE(d.feedback_tail().size() == 1);
    CHECK(d.feedforward()[0] == doctest::Approx(5e-4));
    CHECK(d.feedforward()[1] == doctest::Approx(5e-4));
    CHECK(d.feedback_tail()[0] == doctest::Approx(-1.0));
}

TEST_CASE("tustin of the 150 Hz lag matches the hand-derived coefficients") {
    const DiscreteController d =
        tustin_discretize(TransferFunction::first_order_lag(150.0), 1e-3);
    // H(z) = (0.3203 z + 0.3203) / (z - 0.3594)
    CHECK(d.feedforward()[0] == doctest::Approx(0.3203).epsilon(1e-3));
    CHECK(d.feedforward()[1] == doctest::Approx(0.3203).epsilon(1e-3));
    CHECK(d.feedback_tail()[0] == doctest::Approx(-0.3594).epsilon(1e-3));
}

TEST_CASE("tustin preserves DC gain exactly for stable systems") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> pole(-400.0, -0.5);
    std::uniform_real_distribution<double> gain(0.1, 10.0);
    for (int i = 0; i < 50; ++i) {
        const double p1 = pole(rng);
        const double p2 = pole(rng);
        const double k = gain(rng);
        // k (s - z) / ((s-p1)(s-p2)) with a stable real zero.
        const double z = pole(rng);
        const TransferFunction tf{{k, -k * z}, {1.0, -(p1 + p2), p1 * p2}};
        const DiscreteController d = tustin_discretize(tf, 1e-3);
        const double dc_expected = std::abs(tf.evaluate(0.0));
        const double dc_discrete = std::abs(d.at_frequency(0.0));
        CHECK(dc_discrete == doctest::Approx(dc_expected).epsilon(1e-12));
    }
}

TEST_CASE("tustin maps stable continuous poles inside the unit circle") {
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> re(-900.0, -0.1);
    std::uniform_real_distribution<double> im(0.0, 500.0);
    for (int i = 0; i < 50; ++i) {
        // Complex pair plus a real pole.
        const double a = re(rng);
        const double b = im(rng);
        const double c = re(rng);
        // (s^2 - 2 a s + a^2 + b^2)(s - c)
        const std::vector<double> quad{1.0, -2.0 * a, a * a + b * b};
        const std::vector<double> den{quad[0], quad[1] - c * quad[0], quad[2] - c * quad[1],
                                      -c * quad[2]};
        const TransferFunction tf{{1.0}, den};
        const DiscreteController d = tustin_discretize(tf, 1e-3);
        std::vector<double> den_z{1.0};
        for (double v : d.feedback_tail()) {
            den_z.push_back(v);
        }
        for (const auto& root : poly_roots(den_z)) {
            CHECK(std::abs(root) < 1.0);
        }
    }
}

TEST_CASE("discrete frequency response tracks the continuous one below Nyquist/5") {
    const TransferFunction tf =
        2.5 * (TransferFunction{{1.0, 24.0}, {1.0, 0.0}} * TransferFunction::first_order_lag(150.0));
    const double ts = 1e-3;
    const DiscreteController d = tustin_discretize(tf, ts);
    for (double f : log_frequency_grid(0.5, 0.2 * 0.5 / ts, 40)) {
        const double mc = std::abs(tf.at_frequency(f));
        const double md = std::abs(d.at_frequency(f));
        CHECK(md / mc == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("controller update: gain, clamp and non-finite rejection") {
    DiscreteController gain({2.0}, {}, 1e-3);
    CHECK(gain.update(0.5) == doctest::Approx(1.0));

    DiscreteController clamped({60.0}, {}, 1e-3);
    clamped.set_saturation(24.0);
    CHECK(clamped.update(0.5) == doctest::Approx(24.0));
    CHECK(clamped.update(-0.5) == doctest::Approx(-24.0));

    CHECK_THROWS_AS(gain.update(std::nan("")), std::runtime_error);
}

TEST_CASE("anti-windup shortens desaturation after a long saturated stretch") {
    const TransferFunction pi{{10.0, 10.0 * 20.0}, {1.0, 0.0}}; // kp 10, ki 20

    const auto desaturation_samples = [&](bool anti_windup) {
        DiscreteController ctrl = tustin_discretize(pi, 1e-3);
        ctrl.set_saturation(24.0);
        ctrl.set_anti_windup(anti_windup);
        for (int i = 0; i < 1000; ++i) {
            ctrl.update(1.0); // one second of full positive error
        }
        int samples = 0;
        while (ctrl.update(-1.0) >= 24.0 * 0.999 && samples < 100000) {
            ++samples;
        }
        return samples;
    };

    const int with_aw = desaturation_samples(true);
    const int without_aw = desaturation_samples(false);
    CHECK(with_aw <= 5);
    CHECK(without_aw > 20 * with_aw + 20);
}

TEST_CASE("discrete closed loop reproduces the continuous step response at fast sampling") {
    const MotorParams motor;
    const double inertia = 0.0164;
    const double viscous = 0.0005;
    const TransferFunction plant = rate_loop_plant(inertia, motor, viscous);
    LoopSpec spec;
    spec.form = ControllerForm::PI;
    spec.crossover_hz = 38.0;
    spec.max_resonance_db = 3.0;
    spec.compensator_pole_hz = 150.0;
    const DesignResult d = design_loop(plant, spec);

    // Ts below (bandwidth * 50)^-1.
    const double ts = 1.0 / (d.closed_loop_bandwidth_hz * 55.0);
    DiscreteController ctrl = tustin_discretize(d.controller, ts);

    // Continuous oracle: dense RK4 on the closed-loop transfer function.
    const TransferFunction closed = (d.controller * plant).closed_loop_unity();
    const double t_end = 0.12;
    const std::vector<double> oracle = continuous_step_response(closed, t_end, ts, ts / 64.0);

    // Discrete loop: controller plus exact zero-order-hold plant recursion.
    const double kt_r = motor.torque_constant / motor.winding_resistance;
    const double damping = kt_r * motor.back_emf_constant + viscous;
    const double a = damping / inertia;
    const double phi = std::exp(-a * ts);
    double omega = 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < oracle.size(); ++k) {
        worst = std::max(worst, std::abs(omega - oracle[k]));
        const double volts = ctrl.update(1.0 - omega);
        const double u = kt_r * volts; // torque before back-emf droop
        omega = phi * omega + (u / damping) * (1.0 - phi);
    }
    CHECK(worst < 0.02);
}

TEST_CASE("cascade holds the rate command between camera samples") {
    AxisCascade axis;
    axis.tracking = DiscreteController({2.0}, {}, 0.05);
    axis.stabilization = DiscreteController({1.0}, {}, 1e-3);

    CHECK(cascade_update(axis, std::nullopt, 0.0) == 0.0);
    CHECK(cascade_update(axis, 0.1, 0.0) == doctest::Approx(0.2));
    // No fresh sample: command held, stabilization keeps acting on it.
    CHECK(cascade_update(axis, std::nullopt, 0.05) == doctest::Approx(0.15));
    CHECK(axis.held_rate_command == doctest::Approx(0.2));
}

TEST_CASE("loop spec validation") {
    LoopSpec bad;
    bad.crossover_hz = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.crossover_hz = 1.0;
    bad.max_resonance_db = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
