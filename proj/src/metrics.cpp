#include "isp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace isp {

namespace {

const std::vector<double>& base_rate_series(const TelemetryLog& log, Axis axis) {
    switch (axis) {
    case Axis::X:
        return log.wb_x;
    case Axis::Y:
        return log.wb_y;
    default:
        return log.wb_z;
    }
}

const std::vector<double>& platform_rate_series(const TelemetryLog& log, Axis axis) {
    switch (axis) {
    case Axis::X:
        return log.wp_x;
    case Axis::Y:
        return log.wp_y;
    default:
        return log.wp_z;
    }
}

double median(std::vector<double> values) {
    if (values.empty()) {
        return 0.0;
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        std::nth_element(values.begin(), values.begin() + mid - 1, values.end());
        m = 0.5 * (m + values[mid - 1]);
    }
    return m;
}

} // namespace

IsolationResult bmi(const TelemetryLog& log, Axis disturbance_axis, Axis response_axis,
                    double skip_time, AmplitudeEstimator estimator) {
    if (log.size() < 4) {
        throw MetricsError("bmi: telemetry log is empty");
    }
    const std::vector<double>& dist = base_rate_series(log, disturbance_axis);
    const std::vector<double>& resp = platform_rate_series(log, response_axis);

    std::size_t start = 0;
    while (start < log.size() && log.t[start] < skip_time) {
        ++start;
    }

    // Cycle boundaries: positive-going zero crossings of the disturbance.
    std::vector<std::size_t> boundaries;
    for (std::size_t i = start + 1; i < log.size(); ++i) {
        if (dist[i - 1] < 0.0 && dist[i] >= 0.0) {
            boundaries.push_back(i);
        }
    }
    if (boundaries.size() < 4) {
        throw MetricsError("bmi: fewer than 3 disturbance cycles in the analysis window");
    }

    IsolationResult result;
    result.disturbance_axis = disturbance_axis;
    result.response_axis = response_axis;
    result.cycles = static_cast<int>(boundaries.size()) - 1;

    if (estimator == AmplitudeEstimator::MedianCyclePeaks) {
        std::vector<double> dist_peaks;
        std::vector<double> resp_peaks;
        for (std::size_t c = 0; c + 1 < boundaries.size(); ++c) {
            double dp = 0.0;
            double rp = 0.0;
            for (std::size_t i = boundaries[c]; i < boundaries[c + 1]; ++i) {
                dp = std::max(dp, std::abs(dist[i]));
                rp = std::max(rp, std::abs(resp[i]));
            }
            dist_peaks.push_back(dp);
            resp_peaks.push_back(rp);
        }
        result.disturbance_amplitude = median(std::move(dist_peaks));
        result.response_amplitude = median(std::move(resp_peaks));
    } else {
        double d2 = 0.0;
        double r2 = 0.0;
        std::size_t n = 0;
        for (std::size_t i = boundaries.front(); i < boundaries.back(); ++i) {
            d2 += dist[i] * dist[i];
            r2 += resp[i] * resp[i];
            ++n;
        }
        // sqrt(2) * RMS recovers the sine amplitude.
        result.disturbance_amplitude = std::sqrt(2.0 * d2 / n);
        result.response_amplitude = std::sqrt(2.0 * r2 / n);
    }

    if (result.disturbance_amplitude <= 0.0) {
        throw MetricsError("bmi: disturbance amplitude is zero");
    }
    result.bmi_db = 20.0 * std::log10(result.response_amplitude / result.disturbance_amplitude);
    return result;
}

double jitter(const TelemetryLog& log, Axis axis, double skip_time) {
    if (log.size() < 2) {
        return 0.0;
    }
    const std::vector<double>& rate = platform_rate_series(log, axis);
    std::size_t start = 0;
    while (start < log.size() && log.t[start] < skip_time) {
        ++start;
    }
    if (start + 1 >= log.size()) {
        return 0.0;
    }

    // Remove the rate mean first (a constant rate offset, e.g. gyro bias, is
    // drift rather than jitter), integrate, then measure peak deviation about
    // the mean angle.
    double rate_mean = 0.0;
    for (std::size_t i = start; i < log.size(); ++i) {
        rate_mean += rate[i];
    }
    rate_mean /= static_cast<double>(log.size() - start);

    std::vector<double> angle(log.size() - start, 0.0);
    for (std::size_t i = start + 1; i < log.size(); ++i) {
        const double dt = log.t[i] - log.t[i - 1];
        angle[i - start] = angle[i - start - 1] +
                           0.5 * ((rate[i] - rate_mean) + (rate[i - 1] - rate_mean)) * dt;
    }
    double mean = 0.0;
    for (double a : angle) {
        mean += a;
    }
    mean /= static_cast<double>(angle.size());
    double peak = 0.0;
    for (double a : angle) {
        peak = std::max(peak, std::abs(a - mean));
    }
    return peak * 1e3;
}

StepMetrics step_metrics(const TelemetryLog& log, Channel channel) {
    const std::vector<double>& cmd = channel == Channel::Yaw ? log.ytc : log.ptc;
    const std::vector<double>& resp = channel == Channel::Yaw ? log.yte : log.pte;
    if (cmd.size() < 2) {
        throw MetricsError("step_metrics: telemetry log is empty");
    }

    std::size_t step_idx = 0;
    for (std::size_t i = 1; i < cmd.size(); ++i) {
        if (cmd[i] != cmd[0]) {
            step_idx = i;
            break;
        }
    }
    if (step_idx == 0) {
        throw MetricsError("step_metrics: tracking command never steps");
    }
    const double before = cmd[0];
    const double after = cmd.back();
    const double step = after - before;
    if (step == 0.0) {
        throw MetricsError("step_metrics: zero-amplitude step");
    }

    StepMetrics out;
    double peak = 0.0; // response excursion past the final command, in step direction
    for (std::size_t i = step_idx; i < resp.size(); ++i) {
        peak = std::max(peak, (resp[i] - after) * (step > 0.0 ? 1.0 : -1.0));
    }
    out.overshoot_percent = std::max(0.0, peak / std::abs(step) * 100.0);

    const double band = 0.02 * std::abs(step);
    std::size_t settle_idx = resp.size();
    for (std::size_t i = resp.size(); i-- > step_idx;) {
        if (std::abs(resp[i] - after) > band) {
            settle_idx = i + 1;
            break;
        }
        settle_idx = i;
    }
    if (settle_idx < resp.size()) {
        out.settling_time = log.t[settle_idx] - log.t[step_idx];
    }

    const std::size_t tail = std::max<std::size_t>(1, (resp.size() - step_idx) / 10);
    double mean_tail = 0.0;
    for (std::size_t i = resp.size() - tail; i < resp.size(); ++i) {
        mean_tail += resp[i];
    }
    mean_tail /= static_cast<double>(tail);
    out.steady_state_error_mrad = std::abs(after - mean_tail);
    return out;
}

namespace {

bool has_disturbance(const TelemetryLog& log) {
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log.wb_x[i] != 0.0 || log.wb_y[i] != 0.0 || log.wb_z[i] != 0.0) {
            return true;
        }
    }
    return false;
}

bool command_steps(const TelemetryLog& log, Channel channel) {
    const std::vector<double>& cmd = channel == Channel::Yaw ? log.ytc : log.ptc;
    for (double v : cmd) {
        if (v != cmd[0]) {
            return true;
        }
    }
    return false;
}

std::string format_cell(std::optional<double> v, const char* fmt) {
    if (!v) {
        return "-";
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), fmt, *v);
    return buf;
}

struct SummaryRows {
    std::optional<double> bmi_pitch, bmi_yaw;       // dB, response on y_p / z_p
    std::optional<double> overshoot_pitch, overshoot_yaw; // mrad
    std::optional<double> settle_pitch, settle_yaw; // s
    double jitter_pitch = 0.0, jitter_yaw = 0.0;    // mrad
};

SummaryRows collect(const TelemetryLog& log) {
    SummaryRows rows;
    if (has_disturbance(log)) {
        // Report isolation against the dominant disturbance axis.
        double ax = 0.0, ay = 0.0, az = 0.0;
        for (std::size_t i = 0; i < log.size(); ++i) {
            ax = std::max(ax, std::abs(log.wb_x[i]));
            ay = std::max(ay, std::abs(log.wb_y[i]));
            az = std::max(az, std::abs(log.wb_z[i]));
        }
        const Axis dist = ay >= ax && ay >= az ? Axis::Y : (az >= ax ? Axis::Z : Axis::X);
        try {
            rows.bmi_pitch = bmi(log, dist, Axis::Y).bmi_db;
            rows.bmi_yaw = bmi(log, dist, Axis::Z).bmi_db;
        } catch (const MetricsError&) {
            // Not enough cycles: leave the cells empty.
        }
    }
    for (Channel ch : {Channel::Pitch, Channel::Yaw}) {
        if (!command_steps(log, ch)) {
            continue;
        }
        try {
            const StepMetrics m = step_metrics(log, ch);
            const std::vector<double>& cmd = ch == Channel::Yaw ? log.ytc : log.ptc;
            const double step = std::abs(cmd.back() - cmd.front());
            const double overshoot_mrad = m.overshoot_percent / 100.0 * step;
            if (ch == Channel::Pitch) {
                rows.overshoot_pitch = overshoot_mrad;
                rows.settle_pitch = m.settling_time;
            } else {
                rows.overshoot_yaw = overshoot_mrad;
                rows.settle_yaw = m.settling_time;
            }
        } catch (const MetricsError&) {
        }
    }
    const double skip = has_disturbance(log) ? 2.0 : 0.0;
    rows.jitter_pitch = jitter(log, Axis::Y, skip);
    rows.jitter_yaw = jitter(log, Axis::Z, skip);
    return rows;
}

} // namespace

std::string summary_table(const TelemetryLog& log) {
    const SummaryRows rows = collect(log);
    std::ostringstream out;
    char line[160];
    out << "Metric                                  Pitch channel   Yaw channel\n";
    out << "--------------------------------------  --------------  --------------\n";
    std::snprintf(line, sizeof(line), "%-38s  %-14s  %-14s\n", "BMI (dB)",
                  format_cell(rows.bmi_pitch, "%.1f").c_str(),
                  format_cell(rows.bmi_yaw, "%.1f").c_str());
    out << line;
    std::snprintf(line, sizeof(line), "%-38s  %-14s  %-14s\n", "Max track overshoot (mrad)",
                  format_cell(rows.overshoot_pitch, "%.2f").c_str(),
                  format_cell(rows.overshoot_yaw, "%.2f").c_str());
    out << line;
    std::snprintf(line, sizeof(line), "%-38s  %-14s  %-14s\n", "Track settling time (s)",
                  format_cell(rows.settle_pitch, "%.2f").c_str(),
                  format_cell(rows.settle_yaw, "%.2f").c_str());
    out << line;
    std::snprintf(line, sizeof(line), "%-38s  %-14s  %-14s\n", "Max jitter (mrad)",
                  format_cell(rows.jitter_pitch, "%.3f").c_str(),
                  format_cell(rows.jitter_yaw, "%.3f").c_str());
    out << line;
    return out.str();
}

std::string summary_csv(const TelemetryLog& log) {
    const SummaryRows rows = collect(log);
    std::ostringstream out;
    out << "metric,pitch,yaw\n";
    out << "bmi_db," << format_cell(rows.bmi_pitch, "%.4f") << ","
        << format_cell(rows.bmi_yaw, "%.4f") << "\n";
    out << "overshoot_mrad," << format_cell(rows.overshoot_pitch, "%.4f") << ","
        << format_cell(rows.overshoot_yaw, "%.4f") << "\n";
    out << "settling_s," << format_cell(rows.settle_pitch, "%.4f") << ","
        << format_cell(rows.settle_yaw, "%.4f") << "\n";
    out << "jitter_mrad," << rows.jitter_pitch << "," << rows.jitter_yaw << "\n";
    return out.str();
}

} // namespace isp
