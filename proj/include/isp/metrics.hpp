// Post-processing of telemetry into the performance figures: base motion
// isolation, line-of-sight jitter, and step-response metrics.

#pragma once

#include "isp/telemetry.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace isp {

class MetricsError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Axis { X = 0, Y = 1, Z = 2 };
enum class Channel { Yaw, Pitch };

enum class AmplitudeEstimator { MedianCyclePeaks, Rms };

struct IsolationResult {
    double bmi_db = 0.0;
    Axis disturbance_axis = Axis::Y;
    Axis response_axis = Axis::Y;
    double disturbance_amplitude = 0.0; // rad/s
    double response_amplitude = 0.0;    // rad/s
    int cycles = 0;
};

/// Base motion isolation 20 log10(|response| / |disturbance|). Amplitudes are
/// medians of per-cycle peak magnitudes (cycles delimited by positive-going
/// zero crossings of the disturbance), or RMS-based when requested. The first
/// `skip_time` seconds are dropped to clear transients; fewer than three full
/// cycles in the window is an error.
IsolationResult bmi(const TelemetryLog& log, Axis disturbance_axis, Axis response_axis,
                    double skip_time = 2.0,
                    AmplitudeEstimator estimator = AmplitudeEstimator::MedianCyclePeaks);

/// Peak absolute deviation (mrad) of the mean-removed integral of the
/// platform LOS rate about `axis` (trapezoidal integration).
double jitter(const TelemetryLog& log, Axis axis, double skip_time = 0.0);

struct StepMetrics {
    double overshoot_percent = 0.0;
    std::optional<double> settling_time = std::nullopt; // s after the step; unset = unsettled
    double steady_state_error_mrad = 0.0;
};

/// Overshoot, 2%-band settling time and steady-state error of the tracking
/// response to a step in the tracking command of `channel`.
StepMetrics step_metrics(const TelemetryLog& log, Channel channel);

/// Plain-text summary table (paper-style: metric rows by channel columns).
std::string summary_table(const TelemetryLog& log);
/// Same content as CSV rows "metric,pitch,yaw".
std::string summary_csv(const TelemetryLog& log);

} // namespace isp
