// Time-indexed record of every signal a run produces, plus the versioned CSV
// wire format consumed by the metrics tooling.

#pragma once

#include <string>
#include <vector>

namespace isp {

/// Uniformly sampled run history. All series share the same length. Angles in
/// radians, rates in rad/s, tracking signals in mrad, voltages in volts.
struct TelemetryLog {
    std::vector<double> t;
    std::vector<double> psi, theta;           // true joint angles
    std::vector<double> psi_meas, theta_meas; // pot pickoffs
    std::vector<double> wb_x, wb_y, wb_z;     // base rate, B frame
    std::vector<double> wg_x, wg_y, wg_z;     // gimbal rate, G frame
    std::vector<double> wp_x, wp_y, wp_z;     // platform rate, P frame (true)
    std::vector<double> wp_meas_y, wp_meas_z; // gyro channels used by the loops
    std::vector<double> ytc, yte;             // yaw track command/response, mrad
    std::vector<double> ptc, pte;             // pitch track command/response, mrad
    std::vector<double> rate_cmd_y, rate_cmd_z; // rad/s
    std::vector<double> v_yaw, v_pitch;       // motor commands, V
    std::vector<double> detect;               // 1 when a fresh detection arrived

    std::size_t size() const { return t.size(); }
    double sample_period() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }

    void reserve(std::size_t n);
};

/// Writes the documented CSV layout:
///   t, psi, theta, wb_x, wb_y, wb_z, wp_x, wp_y, wp_z, ytc, yte, ptc, pte,
///   rate_cmd_y, rate_cmd_z, v_yaw, v_pitch, detect
/// preceded by a version comment line. Formatting is fixed so identical runs
/// produce byte-identical files.
void save_telemetry_csv(const TelemetryLog& log, const std::string& path);

/// Reads a file produced by save_telemetry_csv. Series that are not part of
/// the wire format are left empty.
TelemetryLog load_telemetry_csv(const std::string& path);

} // namespace isp
