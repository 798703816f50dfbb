#include "isp/simulation.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace isp {

void BaseMotionProfile::validate() const {
    if (kind == Kind::Sine || kind == Kind::MultiSine) {
        if (components.empty()) {
            throw std::invalid_argument("BaseMotionProfile: periodic profile needs components");
        }
        for (const SineComponent& c : components) {
            if (c.axis < 0 || c.axis > 2 || !(c.frequency_hz > 0.0)) {
                throw std::invalid_argument("BaseMotionProfile: bad sine component");
            }
        }
        if (kind == Kind::Sine && components.size() != 1) {
            throw std::invalid_argument("BaseMotionProfile: sine kind takes exactly one component");
        }
    }
    if (kind == Kind::Recorded) {
        if (recorded_t.size() != recorded_rate.size() || recorded_t.empty()) {
            throw std::invalid_argument("BaseMotionProfile: recorded samples malformed");
        }
        for (std::size_t i = 1; i < recorded_t.size(); ++i) {
            if (recorded_t[i] <= recorded_t[i - 1]) {
                throw std::invalid_argument("BaseMotionProfile: recorded times must increase");
            }
        }
    }
}

BaseMotion::BaseMotion(const BaseMotionProfile& profile) : profile_(profile) {
    profile_.validate();
}

BaseMotionSample BaseMotion::sample(double t) const {
    BaseMotionSample out;
    switch (profile_.kind) {
    case BaseMotionProfile::Kind::None:
        break;
    case BaseMotionProfile::Kind::Sine:
    case BaseMotionProfile::Kind::MultiSine:
        for (const SineComponent& c : profile_.components) {
            const double w = 2.0 * M_PI * c.frequency_hz;
            out.rate[c.axis] += c.amplitude * std::sin(w * t + c.phase_rad);
            out.accel[c.axis] += c.amplitude * w * std::cos(w * t + c.phase_rad);
        }
        break;
    case BaseMotionProfile::Kind::Recorded: {
        if (t >= profile_.recorded_t.back()) {
            if (t > profile_.recorded_t.back() && !warned_exhausted_) {
                std::cerr << "warning: recorded base-motion profile exhausted at t="
                          << profile_.recorded_t.back() << " s; holding final value\n";
                warned_exhausted_ = true;
            }
            out.rate = profile_.recorded_rate.back();
            break;
        }
        // Zero-order hold: last sample at or before t.
        auto it = std::upper_bound(profile_.recorded_t.begin(), profile_.recorded_t.end(), t);
        const std::size_t idx = it == profile_.recorded_t.begin()
                                    ? 0
                                    : static_cast<std::size_t>(it - profile_.recorded_t.begin()) - 1;
        out.rate = profile_.recorded_rate[idx];
        break;
    }
    }
    return out;
}

void TargetProfile::validate() const {
    if (std::abs(direction.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("TargetProfile: direction must be unit norm");
    }
    if (kind == Kind::Drift && !(drift_axis.norm() > 0.0)) {
        throw std::invalid_argument("TargetProfile: drift axis must be nonzero");
    }
}

Vec3 target_direction(const TargetProfile& profile, double t) {
    if (profile.kind == TargetProfile::Kind::Fixed || profile.drift_rate == 0.0) {
        return profile.direction.normalized();
    }
    const Eigen::AngleAxisd rot(profile.drift_rate * t, profile.drift_axis.normalized());
    return (rot * profile.direction).normalized();
}

DiscreteController ChannelConfig::make_controller() const {
    if (!designed()) {
        throw std::invalid_argument("ChannelConfig: controller has not been designed");
    }
    DiscreteController ctrl(b, a_tail, sample_period);
    ctrl.set_saturation(saturation);
    ctrl.set_anti_windup(anti_windup);
    return ctrl;
}

void Scenario::validate() const {
    if (!(duration > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("Scenario: duration and dt must be positive");
    }
    if (log_decimation < 1) {
        throw std::invalid_argument("Scenario: log_decimation must be >= 1");
    }
    base_motion.validate();
    target.validate();
    gyro.validate();
    pot.validate();
    camera.validate();
    yaw_motor.validate();
    pitch_motor.validate();

    const double gyro_period = 1.0 / gyro.sample_rate;
    const double ticks = gyro_period / dt;
    if (std::abs(ticks - std::round(ticks)) > 1e-9 || ticks < 1.0 - 1e-9) {
        throw std::invalid_argument("Scenario: dt must divide the gyro sample period");
    }
    const double frame_ticks = 1.0 / (camera.frame_rate * dt);
    if (std::abs(frame_ticks - std::round(frame_ticks)) > 1e-6 || frame_ticks < 1.0) {
        throw std::invalid_argument("Scenario: dt must divide the camera frame period");
    }
}

namespace {

TransferFunction pi_lag_controller(double kp, double ki, double pole_hz) {
    TransferFunction c = TransferFunction::gain(kp);
    if (ki > 0.0) {
        c = c * TransferFunction{{1.0, ki}, {1.0, 0.0}};
    }
    if (pole_hz > 0.0) {
        c = c * TransferFunction::first_order_lag(pole_hz);
    }
    return c;
}

void store_design(ChannelConfig& channel, const DesignResult& result, double sample_period) {
    channel.sample_period = sample_period;
    channel.kp = result.kp;
    channel.ki = result.ki;
    const DiscreteController d = tustin_discretize(result.controller, sample_period);
    channel.b = d.feedforward();
    channel.a_tail = d.feedback_tail();
}

} // namespace

ScenarioDesignReport design_controllers(Scenario& scenario) {
    scenario.validate();
    ScenarioDesignReport report;

    const double yaw_inertia = scenario.gimbal_inertia.zz + scenario.platform_inertia.zz;
    const TransferFunction yaw_plant =
        rate_loop_plant(yaw_inertia, scenario.yaw_motor, scenario.yaw_friction.viscous);
    const TransferFunction pitch_plant = rate_loop_plant(
        scenario.platform_inertia.yy, scenario.pitch_motor, scenario.pitch_friction.viscous);

    report.stab_yaw = design_loop(yaw_plant, scenario.stab_yaw.loop);
    report.stab_pitch = design_loop(pitch_plant, scenario.stab_pitch.loop);
    store_design(scenario.stab_yaw, report.stab_yaw, scenario.dt);
    store_design(scenario.stab_pitch, report.stab_pitch, scenario.dt);

    // Camera data age: processing delay plus half a frame of sampling age and
    // half a frame of command hold.
    const double frame = 1.0 / scenario.camera.frame_rate;
    const double delay = scenario.camera.processing_delay + frame;
    const TransferFunction track_yaw_plant =
        tracking_loop_plant(report.stab_yaw.closed_loop_bandwidth_hz, delay);
    const TransferFunction track_pitch_plant =
        tracking_loop_plant(report.stab_pitch.closed_loop_bandwidth_hz, delay);

    report.track_yaw = design_loop(track_yaw_plant, scenario.track_yaw.loop);
    report.track_pitch = design_loop(track_pitch_plant, scenario.track_pitch.loop);
    store_design(scenario.track_yaw, report.track_yaw, frame);
    store_design(scenario.track_pitch, report.track_pitch, frame);
    return report;
}

void run_scenario(const Scenario& scenario, TelemetryLog& log) {
    scenario.validate();

    const GimbalParams params = scenario.gimbal_params();
    const BaseMotion base_motion(scenario.base_motion);
    const BaseMotionFn base_fn = [&](double t) { return base_motion.sample(t); };

    GyroSensor gyro(scenario.gyro, scenario.seed, "gyro");
    PotSensor pot_yaw(scenario.pot, scenario.seed, "pot_yaw");
    PotSensor pot_pitch(scenario.pot, scenario.seed, "pot_pitch");
    Camera camera(scenario.camera);

    const bool direct_rate = scenario.yaw_rate_command.has_value() ||
                             scenario.pitch_rate_command.has_value();
    const bool tracking_on = scenario.tracking_enabled && !direct_rate;

    AxisCascade yaw_axis;
    AxisCascade pitch_axis;
    if (scenario.stabilization_enabled) {
        yaw_axis.stabilization = scenario.stab_yaw.make_controller();
        pitch_axis.stabilization = scenario.stab_pitch.make_controller();
    }
    if (tracking_on) {
        yaw_axis.tracking = scenario.track_yaw.make_controller();
        pitch_axis.tracking = scenario.track_pitch.make_controller();
    }

    const int total_ticks = static_cast<int>(std::round(scenario.duration / scenario.dt));
    const int gyro_ticks =
        static_cast<int>(std::round(1.0 / (scenario.gyro.sample_rate * scenario.dt)));
    const int frame_ticks =
        static_cast<int>(std::round(1.0 / (scenario.camera.frame_rate * scenario.dt)));

    DynamicState state;
    state.angles.psi = scenario.initial_psi;
    state.angles.theta = scenario.initial_theta;

    log.reserve(static_cast<std::size_t>(total_ticks / scenario.log_decimation) + 1);

    RateVector gyro_meas{Vec3::Zero(), FrameId::Platform};
    double last_detect = 0.0;
    double v_yaw = 0.0;   // held between controller ticks (zero-order hold)
    double v_pitch = 0.0;

    for (int k = 0; k < total_ticks; ++k) {
        const double t = k * scenario.dt;

        // 1. Truth signals at the start of the tick.
        const BaseMotionSample base = base_motion.sample(t);
        const RateVector wb{base.rate, FrameId::Base};
        const ChainedRates rates = rate_chain(wb, state.angles);
        const Vec3& wg = rates.omega_g.omega;
        const Vec3& wp = rates.omega_p.omega;

        // 2. Sensors.
        if (k % gyro_ticks == 0) {
            gyro_meas = gyro.sample(rates.omega_p);
        }
        const double psi_meas = pot_yaw.sample(state.angles.psi);
        const double theta_meas = pot_pitch.sample(state.angles.theta);

        // Platform attitude from base attitude and joint angles.
        const ChainDcms dcms = euler_dcm(state.angles);
        Attitude platform_att;
        platform_att.q = state.base_attitude.q * Quat(dcms.platform_from_base.transpose());

        // 3. Camera capture at frame instants; tracking controllers tick when
        //    a processed frame becomes available.
        const double ytc = scenario.yaw_track_command.at(t);
        const double ptc = scenario.pitch_track_command.at(t);
        double yte = log.yte.empty() ? 0.0 : log.yte.back();
        double pte = log.pte.empty() ? 0.0 : log.pte.back();
        double detect = 0.0;
        std::optional<double> yaw_track_err;
        std::optional<double> pitch_track_err;
        if (tracking_on) {
            const TrackingError true_err =
                tracking_error(target_direction(scenario.target, t), platform_att);
            yte = -true_err.yaw_mrad;
            pte = -true_err.pitch_mrad;
            if (k % frame_ticks == 0) {
                camera.measure(true_err, t);
            }
            if (const auto px = camera.fetch(t)) {
                const TrackingError meas = pixel_to_error(*px, scenario.camera);
                // Loop errors in radians; the pitch channel carries the sign
                // flip between its rate command and apparent target motion.
                yaw_track_err = (ytc - (-meas.yaw_mrad)) * 1e-3;
                pitch_track_err = -(ptc - (-meas.pitch_mrad)) * 1e-3;
                detect = 1.0;
            }
            last_detect = detect;
        } else if (direct_rate) {
            yaw_axis.held_rate_command =
                scenario.yaw_rate_command ? scenario.yaw_rate_command->at(t) : 0.0;
            pitch_axis.held_rate_command =
                scenario.pitch_rate_command ? scenario.pitch_rate_command->at(t) : 0.0;
        }

        // 4. Controllers and motors.
        if (scenario.stabilization_enabled && k % gyro_ticks == 0) {
            try {
                v_yaw = cascade_update(yaw_axis, yaw_track_err, gyro_meas.omega.z());
                v_pitch = cascade_update(pitch_axis, pitch_track_err, gyro_meas.omega.y());
            } catch (const std::runtime_error& e) {
                throw DivergenceError(t, std::string(e.what()) + " at t=" + std::to_string(t));
            }
        }
        JointTorques torques;
        if (scenario.stabilization_enabled) {
            torques.yaw = motor_torque(v_yaw, state.angles.psi_dot, scenario.yaw_motor);
            torques.pitch = motor_torque(v_pitch, state.angles.theta_dot, scenario.pitch_motor);
        }

        // 5. Log, then integrate to the next tick.
        if (k % scenario.log_decimation == 0) {
            log.t.push_back(t);
            log.psi.push_back(state.angles.psi);
            log.theta.push_back(state.angles.theta);
            log.psi_meas.push_back(psi_meas);
            log.theta_meas.push_back(theta_meas);
            log.wb_x.push_back(base.rate.x());
            log.wb_y.push_back(base.rate.y());
            log.wb_z.push_back(base.rate.z());
            log.wg_x.push_back(wg.x());
            log.wg_y.push_back(wg.y());
            log.wg_z.push_back(wg.z());
            log.wp_x.push_back(wp.x());
            log.wp_y.push_back(wp.y());
            log.wp_z.push_back(wp.z());
            log.wp_meas_y.push_back(gyro_meas.omega.y());
            log.wp_meas_z.push_back(gyro_meas.omega.z());
            log.ytc.push_back(ytc);
            log.yte.push_back(yte);
            log.ptc.push_back(ptc);
            log.pte.push_back(pte);
            log.rate_cmd_y.push_back(pitch_axis.held_rate_command);
            log.rate_cmd_z.push_back(yaw_axis.held_rate_command);
            log.v_yaw.push_back(v_yaw);
            log.v_pitch.push_back(v_pitch);
            log.detect.push_back(tracking_on ? last_detect : 0.0);
        }

        state = step_dynamics(state, params, torques, base_fn, t, scenario.dt);
        state.angles.psi = wrap_angle(state.angles.psi);
        state.angles.theta = wrap_angle(state.angles.theta);
    }
}

TelemetryLog run_scenario(const Scenario& scenario) {
    TelemetryLog log;
    run_scenario(scenario, log);
    return log;
}

} // namespace isp
