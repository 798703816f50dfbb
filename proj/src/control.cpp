#include "isp/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isp {

namespace {

using Complex = std::complex<double>;

std::vector<double> poly_multiply(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

// Adds polynomials aligned at the constant term (highest degree first).
std::vector<double> poly_add(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::max(a.size(), b.size());
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[n - a.size() + i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        out[n - b.size() + i] += b[i];
    }
    return out;
}

Complex poly_eval(const std::vector<double>& coeffs, Complex s) {
    Complex acc = 0.0;
    for (double c : coeffs) {
        acc = acc * s + c;
    }
    return acc;
}

// (z-1)^a (z+1)^b expanded in z, highest degree first.
std::vector<double> binomial_mix(int a, int b) {
    std::vector<double> out{1.0};
    const std::vector<double> zm1{1.0, -1.0};
    const std::vector<double> zp1{1.0, 1.0};
    for (int i = 0; i < a; ++i) {
        out = poly_multiply(out, zm1);
    }
    for (int i = 0; i < b; ++i) {
        out = poly_multiply(out, zp1);
    }
    return out;
}

double to_db(double magnitude) { return 20.0 * std::log10(magnitude); }

} // namespace

Complex TransferFunction::evaluate(Complex s) const {
    return poly_eval(num, s) / poly_eval(den, s);
}

Complex TransferFunction::at_frequency(double freq_hz) const {
    return evaluate(Complex(0.0, 2.0 * M_PI * freq_hz));
}

TransferFunction TransferFunction::closed_loop_unity() const {
    TransferFunction cl;
    cl.num = num;
    cl.den = poly_add(den, num);
    return cl;
}

void TransferFunction::validate() const {
    if (num.empty() || den.empty()) {
        throw std::invalid_argument("TransferFunction: empty coefficient vector");
    }
    if (den[0] == 0.0) {
        throw std::invalid_argument("TransferFunction: leading denominator coefficient is zero");
    }
    if (num.size() > den.size()) {
        throw std::invalid_argument("TransferFunction: improper (numerator degree exceeds "
                                    "denominator degree)");
    }
}

TransferFunction TransferFunction::gain(double k) { return TransferFunction{{k}, {1.0}}; }

TransferFunction TransferFunction::integrator() { return TransferFunction{{1.0}, {1.0, 0.0}}; }

TransferFunction TransferFunction::first_order_lag(double corner_hz) {
    const double a = 2.0 * M_PI * corner_hz;
    return TransferFunction{{a}, {1.0, a}};
}

TransferFunction TransferFunction::pade_delay(double delay_s) {
    if (delay_s <= 0.0) {
        return gain(1.0);
    }
    const double h = 0.5 * delay_s;
    return TransferFunction{{-h, 1.0}, {h, 1.0}};
}

TransferFunction operator*(const TransferFunction& a, const TransferFunction& b) {
    TransferFunction out;
    out.num = poly_multiply(a.num, b.num);
    out.den = poly_multiply(a.den, b.den);
    return out;
}

TransferFunction operator*(double k, const TransferFunction& tf) {
    TransferFunction out = tf;
    for (double& c : out.num) {
        c *= k;
    }
    return out;
}

namespace {

// Dense log grid used for the derived response figures.
constexpr double kScanStartHz = 1e-4;
constexpr double kScanEndHz = 1e5;
constexpr int kScanPoints = 6000;

double magnitude_at(const TransferFunction& tf, double f) { return std::abs(tf.at_frequency(f)); }

// Bisection on a smooth scalar function of log-frequency.
template <typename F>
double bisect_freq(F&& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 80; ++i) {
        const double mid = std::sqrt(lo * hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

} // namespace

ResponseSummary frequency_response(const TransferFunction& tf, const std::vector<double>& freqs_hz) {
    tf.validate();
    ResponseSummary out;
    out.points.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        const Complex h = tf.at_frequency(f);
        out.points.push_back({f, to_db(std::abs(h)), std::arg(h) * 180.0 / M_PI});
    }

    const std::vector<double> grid = log_frequency_grid(kScanStartHz, kScanEndHz, kScanPoints);
    std::vector<double> mag(grid.size());
    std::vector<double> phase(grid.size()); // unwrapped, degrees
    double prev_raw = 0.0;
    double offset = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex h = tf.at_frequency(grid[i]);
        mag[i] = std::abs(h);
        double raw = std::arg(h) * 180.0 / M_PI;
        if (i > 0) {
            while (raw + offset - (prev_raw) > 180.0) {
                offset -= 360.0;
            }
            while (raw + offset - (prev_raw) < -180.0) {
                offset += 360.0;
            }
        }
        prev_raw = raw + offset;
        phase[i] = prev_raw;
    }

    // DC gain from the constant coefficients; infinite for integrating systems.
    const double num_dc = tf.num.back();
    const double den_dc = tf.den.back();
    const bool finite_dc = den_dc != 0.0;
    const double dc_mag = finite_dc ? std::abs(num_dc / den_dc) : 0.0;

    if (finite_dc && dc_mag > 0.0) {
        const double half_power = dc_mag / std::sqrt(2.0);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (mag[i - 1] >= half_power && mag[i] < half_power) {
                out.bandwidth_hz = bisect_freq(
                    [&](double f) { return magnitude_at(tf, f) - half_power; }, grid[i - 1],
                    grid[i]);
                break;
            }
        }
        double peak = dc_mag;
        std::size_t peak_idx = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (mag[i] > peak) {
                peak = mag[i];
                peak_idx = i;
            }
        }
        if (peak_idx > 0 && peak_idx + 1 < grid.size()) {
            const double lo = grid[peak_idx - 1];
            const double hi = grid[peak_idx + 1];
            for (int i = 0; i < 200; ++i) {
                const double f = lo * std::pow(hi / lo, i / 199.0);
                peak = std::max(peak, magnitude_at(tf, f));
            }
        }
        out.resonance_peak_db = to_db(peak / dc_mag);
    }

    // Margins, treating the system as an open loop.
    std::optional<double> pm;
    std::optional<double> fcross;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if ((mag[i - 1] - 1.0) * (mag[i] - 1.0) < 0.0) {
            const double f = bisect_freq([&](double g) { return magnitude_at(tf, g) - 1.0; },
                                         grid[i - 1], grid[i]);
            const double ph = std::arg(tf.at_frequency(f)) * 180.0 / M_PI;
            // Candidate margins relative to the nearest odd multiple of 180.
            double margin = ph + 180.0;
            while (margin > 180.0) {
                margin -= 360.0;
            }
            while (margin < -180.0) {
                margin += 360.0;
            }
            if (!pm || std::abs(margin) < std::abs(*pm)) {
                pm = margin;
                fcross = f;
            }
        }
    }
    out.phase_margin_deg = pm;
    out.gain_crossover_hz = fcross;

    std::optional<double> gm;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        for (double target : {-180.0, -540.0, 180.0}) {
            if ((phase[i - 1] - target) * (phase[i] - target) < 0.0) {
                // Linear interpolation is plenty for the margin report.
                const double w = (target - phase[i - 1]) / (phase[i] - phase[i - 1]);
                const double f = grid[i - 1] * std::pow(grid[i] / grid[i - 1], w);
                const double m = -to_db(magnitude_at(tf, f));
                if (!gm || m < *gm) {
                    gm = m;
                }
            }
        }
    }
    out.gain_margin_db = gm;
    return out;
}

void LoopSpec::validate() const {
    if (!(crossover_hz > 0.0)) {
        throw std::invalid_argument("LoopSpec: crossover_hz must be positive");
    }
    if (!(max_resonance_db > 0.0)) {
        throw std::invalid_argument("LoopSpec: max_resonance_db must be positive");
    }
    if (compensator_pole_hz < 0.0) {
        throw std::invalid_argument("LoopSpec: compensator_pole_hz must be non-negative");
    }
}

DesignResult design_loop(const TransferFunction& plant, const LoopSpec& spec) {
    spec.validate();
    plant.validate();

    DesignResult result;
    result.ki = spec.form == ControllerForm::PI ? 2.0 * M_PI * spec.crossover_hz / 10.0 : 0.0;

    TransferFunction shape = TransferFunction::gain(1.0);
    if (spec.form == ControllerForm::PI) {
        shape = shape * TransferFunction{{1.0, result.ki}, {1.0, 0.0}}; // (s + ki)/s
    }
    if (spec.compensator_pole_hz > 0.0) {
        shape = shape * TransferFunction::first_order_lag(spec.compensator_pole_hz);
    }

    const TransferFunction open_unit = shape * plant;
    const double g = std::abs(open_unit.at_frequency(spec.crossover_hz));
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw DesignError("design_loop: open loop has no finite gain at the target crossover");
    }
    double kp = 1.0 / g;

    // The gain must actually cross 0 dB at the target, not just touch it.
    const double below = kp * std::abs(open_unit.at_frequency(0.5 * spec.crossover_hz));
    const double above = kp * std::abs(open_unit.at_frequency(2.0 * spec.crossover_hz));
    if (!(below > 1.001) || !(above < 0.999)) {
        std::ostringstream msg;
        msg << "design_loop: loop magnitude does not cross 0 dB at " << spec.crossover_hz
            << " Hz (|L| at half/double crossover: " << below << ", " << above << ")";
        throw DesignError(msg.str());
    }

    const std::vector<double> report_grid =
        log_frequency_grid(spec.crossover_hz / 1000.0, spec.crossover_hz * 100.0, 200);
    const double bw_lo = 0.8 * spec.crossover_hz;
    const double bw_hi = 1.2 * spec.crossover_hz;

    for (int iteration = 0;; ++iteration) {
        const TransferFunction open = kp * open_unit;
        const ResponseSummary ol = frequency_response(open, report_grid);
        const ResponseSummary cl = frequency_response(open.closed_loop_unity(), report_grid);
        const double bw = cl.bandwidth_hz.value_or(0.0);

        if (cl.resonance_peak_db <= spec.max_resonance_db && bw >= bw_lo && bw <= bw_hi) {
            result.kp = kp;
            result.controller = kp * shape;
            result.crossover_hz = ol.gain_crossover_hz.value_or(spec.crossover_hz);
            result.phase_margin_deg = ol.phase_margin_deg;
            result.gain_margin_db = ol.gain_margin_db;
            result.closed_loop_bandwidth_hz = bw;
            result.closed_loop_resonance_db = cl.resonance_peak_db;
            result.backoff_iterations = iteration;
            return result;
        }
        if (bw < bw_lo || iteration >= 10) {
            std::ostringstream msg;
            msg << "design_loop: spec not met after " << iteration
                << " backoff iterations (closed-loop bandwidth " << bw << " Hz, window [" << bw_lo
                << ", " << bw_hi << "] Hz, resonance " << cl.resonance_peak_db << " dB, limit "
                << spec.max_resonance_db << " dB)";
            throw DesignError(msg.str());
        }
        kp *= 0.9;
    }
}

DiscreteController::DiscreteController(std::vector<double> b, std::vector<double> a_tail,
                                       double sample_period)
    : b_(std::move(b)), a_tail_(std::move(a_tail)), ts_(sample_period) {
    if (b_.empty()) {
        throw std::invalid_argument("DiscreteController: empty feedforward coefficients");
    }
    if (!(ts_ > 0.0)) {
        throw std::invalid_argument("DiscreteController: sample period must be positive");
    }
    reset();
}

void DiscreteController::reset() {
    inputs_.assign(b_.size() > 1 ? b_.size() - 1 : 0, 0.0);
    outputs_.assign(a_tail_.size(), 0.0);
}

double DiscreteController::update(double input) {
    if (!std::isfinite(input)) {
        throw std::runtime_error("DiscreteController: non-finite input sample");
    }
    double raw = b_[0] * input;
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        raw += b_[i + 1] * inputs_[i];
    }
    for (std::size_t i = 0; i < outputs_.size(); ++i) {
        raw -= a_tail_[i] * outputs_[i];
    }

    double out = raw;
    if (saturation_ > 0.0) {
        out = std::clamp(raw, -saturation_, saturation_);
    }

    if (!inputs_.empty()) {
        std::rotate(inputs_.rbegin(), inputs_.rbegin() + 1, inputs_.rend());
        inputs_[0] = input;
    }
    if (!outputs_.empty()) {
        std::rotate(outputs_.rbegin(), outputs_.rbegin() + 1, outputs_.rend());
        // Back-calculation: with anti-windup the clamped value is what the
        // recursion remembers, so the integrator state tracks the actual output.
        outputs_[0] = anti_windup_ ? out : raw;
    }
    return out;
}

std::complex<double> DiscreteController::at_frequency(double freq_hz) const {
    const Complex z = std::exp(Complex(0.0, 2.0 * M_PI * freq_hz * ts_));
    Complex num = b_[0];
    Complex zi = 1.0;
    for (std::size_t i = 1; i < b_.size(); ++i) {
        zi /= z;
        num += b_[i] * zi;
    }
    Complex den = 1.0;
    zi = 1.0;
    for (std::size_t i = 0; i < a_tail_.size(); ++i) {
        zi /= z;
        den += a_tail_[i] * zi;
    }
    return num / den;
}

DiscreteController tustin_discretize(const TransferFunction& tf, double sample_period) {
    tf.validate();
    if (!(sample_period > 0.0)) {
        throw std::invalid_argument("tustin_discretize: sample period must be positive");
    }
    const int n = static_cast<int>(tf.den.size()) - 1;
    const int m = static_cast<int>(tf.num.size()) - 1;
    const double k = 2.0 / sample_period;

    std::vector<double> num_z(n + 1, 0.0);
    std::vector<double> den_z(n + 1, 0.0);
    for (int j = 0; j <= m; ++j) {
        const int power = m - j; // degree of s attached to this coefficient
        const std::vector<double> term = binomial_mix(power, n - power);
        const double scale = tf.num[j] * std::pow(k, power);
        for (std::size_t i = 0; i < term.size(); ++i) {
            num_z[i] += scale * term[i];
        }
    }
    for (int j = 0; j <= n; ++j) {
        const int power = n - j;
        const std::vector<double> term = binomial_mix(power, n - power);
        const double scale = tf.den[j] * std::pow(k, power);
        for (std::size_t i = 0; i < term.size(); ++i) {
            den_z[i] += scale * term[i];
        }
    }

    if (std::abs(den_z[0]) < 1e-300) {
        throw std::invalid_argument("tustin_discretize: degenerate transform (a[0] = 0)");
    }
    const double norm = den_z[0];
    for (double& c : num_z) {
        c /= norm;
    }
    for (double& c : den_z) {
        c /= norm;
    }
    std::vector<double> a_tail(den_z.begin() + 1, den_z.end());
    return DiscreteController(num_z, a_tail, sample_period);
}

double cascade_update(AxisCascade& axis, std::optional<double> tracking_error,
                      double measured_rate) {
    if (tracking_error.has_value()) {
        axis.held_rate_command = axis.tracking.update(*tracking_error);
    }
    return axis.stabilization.update(axis.held_rate_command - measured_rate);
}

TransferFunction rate_loop_plant(double inertia, const MotorParams& motor,
                                 double viscous_friction) {
    motor.validate();
    if (!(inertia > 0.0)) {
        throw std::invalid_argument("rate_loop_plant: inertia must be positive");
    }
    const double kt_over_r = motor.torque_constant / motor.winding_resistance;
    const double damping = kt_over_r * motor.back_emf_constant + viscous_friction;
    return TransferFunction{{kt_over_r}, {inertia, damping}};
}

TransferFunction tracking_loop_plant(double inner_bandwidth_hz, double total_delay_s) {
    TransferFunction plant = TransferFunction::integrator();
    if (inner_bandwidth_hz > 0.0) {
        plant = plant * TransferFunction::first_order_lag(inner_bandwidth_hz);
    }
    if (total_delay_s > 0.0) {
        plant = plant * TransferFunction::pade_delay(total_delay_s);
    }
    return plant;
}

std::vector<double> log_frequency_grid(double f_start_hz, double f_end_hz, int count) {
    if (!(f_start_hz > 0.0) || !(f_end_hz > f_start_hz) || count < 2) {
        throw std::invalid_argument("log_frequency_grid: invalid range");
    }
    std::vector<double> out(count);
    const double ratio = f_end_hz / f_start_hz;
    for (int i = 0; i < count; ++i) {
        out[i] = f_start_hz * std::pow(ratio, static_cast<double>(i) / (count - 1));
    }
    return out;
}

} // namespace isp
