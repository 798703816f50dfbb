// Scenario description and the multirate closed-loop engine: dynamics at the
// base step, gyro plus stabilization every sample, camera plus tracking at
// the frame rate with processing delay, all driven from one master seed.

#pragma once

#include "isp/control.hpp"
#include "isp/dynamics.hpp"
#include "isp/sensing.hpp"
#include "isp/telemetry.hpp"
#include "isp/tracking.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isp {

struct SineComponent {
    int axis = 1;              // 0 = x_b, 1 = y_b, 2 = z_b
    double amplitude = 0.0;    // rad/s
    double frequency_hz = 1.0;
    double phase_rad = 0.0;
};

struct BaseMotionProfile {
    enum class Kind { None, Sine, MultiSine, Recorded };
    Kind kind = Kind::None;
    std::vector<SineComponent> components;
    // Recorded samples, zero-order held; exhausted profiles hold the last row.
    std::vector<double> recorded_t;
    std::vector<Vec3> recorded_rate;

    void validate() const;
};

/// Evaluates a base-motion profile. Periodic kinds provide the analytic rate
/// derivative; recorded input is zero-order held (zero derivative inside a
/// hold interval) and warns once on stderr when it runs out of samples.
class BaseMotion {
public:
    explicit BaseMotion(const BaseMotionProfile& profile);
    BaseMotionSample sample(double t) const;

private:
    BaseMotionProfile profile_;
    mutable bool warned_exhausted_ = false;
};

struct TargetProfile {
    enum class Kind { Fixed, Drift };
    Kind kind = Kind::Fixed;
    Vec3 direction = Vec3::UnitX(); // inertial, unit norm
    Vec3 drift_axis = Vec3::UnitZ();
    double drift_rate = 0.0; // rad/s

    void validate() const;
};

/// Inertial target direction at time t (unit norm).
Vec3 target_direction(const TargetProfile& profile, double t);

/// Scalar command profile for tracking or rate commands.
struct CommandProfile {
    enum class Kind { Constant, Step };
    Kind kind = Kind::Constant;
    double value = 0.0;      // constant value, or value after the step
    double step_time = 0.0;  // s; before it the command is `initial`
    double initial = 0.0;

    double at(double t) const {
        return (kind == Kind::Constant || t >= step_time) ? value : initial;
    }
};

/// One control channel: the continuous-domain design spec plus, once design
/// has run, the discretized coefficients that the runtime executes.
struct ChannelConfig {
    LoopSpec loop;
    double saturation = 0.0; // output limit; <=0 disables
    bool anti_windup = true;
    double sample_period = 0.0; // s; set from run.dt / camera frame rate
    // Designed coefficients (empty until cmd_design or design_controllers).
    std::vector<double> b;
    std::vector<double> a_tail;
    double kp = 0.0;
    double ki = 0.0;

    bool designed() const { return !b.empty(); }
    DiscreteController make_controller() const;
};

struct Scenario {
    std::string name = "scenario";

    InertiaTensor platform_inertia =
        InertiaTensor::principal(0.0048, 0.0164, 0.0166, BodyTag::Platform);
    InertiaTensor gimbal_inertia = InertiaTensor::principal(0.0100, 0.0100, 0.0100, BodyTag::Gimbal);
    FrictionModel pitch_friction{0.0005, 0.002, 0.01};
    FrictionModel yaw_friction{0.0005, 0.002, 0.01};

    MotorParams yaw_motor;
    MotorParams pitch_motor;

    GyroModel gyro;
    PotModel pot;
    CameraModel camera;

    ChannelConfig stab_yaw;
    ChannelConfig stab_pitch;
    ChannelConfig track_yaw;
    ChannelConfig track_pitch;

    BaseMotionProfile base_motion;
    TargetProfile target;
    CommandProfile yaw_track_command;   // mrad
    CommandProfile pitch_track_command; // mrad

    // When set, tracking is bypassed and these feed the rate loops directly.
    std::optional<CommandProfile> yaw_rate_command;   // rad/s
    std::optional<CommandProfile> pitch_rate_command; // rad/s

    bool stabilization_enabled = true;
    bool tracking_enabled = true;

    double initial_psi = 0.0;   // rad
    double initial_theta = 0.0; // rad
    double duration = 10.0;     // s
    double dt = 1e-3;           // s
    std::uint64_t seed = 1;
    int log_decimation = 1;

    GimbalParams gimbal_params() const {
        return GimbalParams{platform_inertia, gimbal_inertia, pitch_friction, yaw_friction};
    }

    void validate() const;
};

/// Designs all four loops against the scenario's linearized plants and stores
/// the gains and Tustin coefficients back into the channel configs. The
/// stabilization loops are designed first; their measured closed-loop
/// bandwidth feeds the tracking design plant.
struct ScenarioDesignReport {
    DesignResult stab_yaw;
    DesignResult stab_pitch;
    DesignResult track_yaw;
    DesignResult track_pitch;
};
ScenarioDesignReport design_controllers(Scenario& scenario);

/// Runs the closed-loop simulation, appending rows to `log` as it goes (on
/// divergence the partial log remains valid; the error carries the time).
void run_scenario(const Scenario& scenario, TelemetryLog& log);
TelemetryLog run_scenario(const Scenario& scenario);

} // namespace isp
