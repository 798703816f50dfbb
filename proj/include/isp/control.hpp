// Continuous-domain loop shaping and discrete controller runtime.
//
// Controllers are designed in the s-plane as P or PI plus an optional
// first-order lag compensator, gain-fitted so the open loop crosses 0 dB at a
// target frequency, then transformed to the z-plane with the bilinear
// (Tustin) substitution and run as difference equations.

#pragma once

#include "isp/actuation.hpp"

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace isp {

/// Rational transfer function; coefficients ordered highest degree first.
struct TransferFunction {
    std::vector<double> num{1.0};
    std::vector<double> den{1.0};

    std::complex<double> evaluate(std::complex<double> s) const;
    std::complex<double> at_frequency(double freq_hz) const;

    /// Unity-feedback closed loop G/(1+G).
    TransferFunction closed_loop_unity() const;

    int relative_degree() const {
        return static_cast<int>(den.size()) - static_cast<int>(num.size());
    }

    void validate() const;

    static TransferFunction gain(double k);
    static TransferFunction integrator();
    /// First-order lag a/(s+a) with unity DC gain, corner at `corner_hz`.
    static TransferFunction first_order_lag(double corner_hz);
    /// First-order Pade approximation of a pure delay.
    static TransferFunction pade_delay(double delay_s);

    friend TransferFunction operator*(const TransferFunction& a, const TransferFunction& b);
    friend TransferFunction operator*(double k, const TransferFunction& tf);
};

struct FrequencyPoint {
    double freq_hz = 0.0;
    double magnitude_db = 0.0;
    double phase_deg = 0.0;
};

/// Bode data for the given system plus derived scalar figures. Bandwidth and
/// resonance describe the system as passed (pass a closed-loop function to get
/// closed-loop figures); margins treat it as an open loop under unity
/// feedback. Missing crossovers leave the margins unset (unbounded).
struct ResponseSummary {
    std::vector<FrequencyPoint> points;
    std::optional<double> bandwidth_hz;      // -3 dB below the DC gain
    double resonance_peak_db = 0.0;          // peak magnitude relative to DC
    std::optional<double> gain_margin_db;
    std::optional<double> phase_margin_deg;
    std::optional<double> gain_crossover_hz; // where |G| = 1
};

ResponseSummary frequency_response(const TransferFunction& tf, const std::vector<double>& freqs_hz);

enum class ControllerForm { P, PI };

struct LoopSpec {
    double crossover_hz = 0.0;       // target 0 dB crossing of the open loop
    double max_resonance_db = 3.0;   // closed-loop peak limit
    double compensator_pole_hz = 0.0; // 0 disables the lag compensator
    ControllerForm form = ControllerForm::P;

    void validate() const;
};

class DesignError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DesignResult {
    TransferFunction controller; // full C(s) including compensator
    double kp = 0.0;
    double ki = 0.0; // integral corner (rad/s); 0 for P form
    double crossover_hz = 0.0;
    std::optional<double> phase_margin_deg;
    std::optional<double> gain_margin_db;
    double closed_loop_bandwidth_hz = 0.0;
    double closed_loop_resonance_db = 0.0;
    int backoff_iterations = 0;
};

/// Shapes C(s) = Kp (1 + Ki/s) / (s/p + 1) against the plant: Kp makes the
/// open loop cross 0 dB at spec.crossover_hz, Ki sits one decade below the
/// crossover (PI form). The result is verified against the closed-loop
/// resonance limit and a +/-20% bandwidth window, backing the gain off 10% at
/// a time (at most ten times) before reporting failure.
DesignResult design_loop(const TransferFunction& plant, const LoopSpec& spec);

/// Runnable difference equation y[k] = sum b_i u[k-i] - sum a_i y[k-i] with
/// output saturation and optional back-calculation anti-windup (the stored
/// output history is clamped so the integrator cannot wind up).
class DiscreteController {
public:
    DiscreteController() = default;
    DiscreteController(std::vector<double> b, std::vector<double> a_tail, double sample_period);

    double update(double input);
    void reset();

    void set_saturation(double limit) { saturation_ = limit; } // <=0 disables
    void set_anti_windup(bool enabled) { anti_windup_ = enabled; }

    const std::vector<double>& feedforward() const { return b_; }
    const std::vector<double>& feedback_tail() const { return a_tail_; }
    double sample_period() const { return ts_; }
    double saturation() const { return saturation_; }
    bool anti_windup() const { return anti_windup_; }

    /// Magnitude/phase of the difference equation at z = exp(j 2 pi f Ts).
    std::complex<double> at_frequency(double freq_hz) const;

private:
    std::vector<double> b_{1.0};
    std::vector<double> a_tail_{}; // a[1..n], a[0] normalized to 1
    double ts_ = 1.0;
    double saturation_ = 0.0;
    bool anti_windup_ = false;
    std::vector<double> inputs_;
    std::vector<double> outputs_;
};

/// Bilinear transform s -> (2/Ts)(z-1)/(z+1) of a proper transfer function.
DiscreteController tustin_discretize(const TransferFunction& tf, double sample_period);

/// One control axis: outer tracking loop (ticks on fresh camera data, output
/// held between frames) cascaded into the inner stabilization loop (ticks
/// every sample on rate-command minus measured rate).
struct AxisCascade {
    DiscreteController tracking;
    DiscreteController stabilization;
    double held_rate_command = 0.0; // rad/s
};

/// Returns the motor voltage command. `tracking_error` carries a fresh outer
/// loop error sample (rad) when one is available; absent, the last rate
/// command is held.
double cascade_update(AxisCascade& axis, std::optional<double> tracking_error,
                      double measured_rate);

/// Voltage-to-rate plant of one rate loop: Kt/R / (J s + Kt Ke/R + viscous).
TransferFunction rate_loop_plant(double inertia, const MotorParams& motor,
                                 double viscous_friction);

/// Design plant of one tracking loop: integrator from rate to angle, a
/// first-order stand-in for the closed inner loop, and a Pade-approximated
/// measurement delay.
TransferFunction tracking_loop_plant(double inner_bandwidth_hz, double total_delay_s);

/// Log-spaced frequency grid, inclusive of both endpoints.
std::vector<double> log_frequency_grid(double f_start_hz, double f_end_hz, int count);

} // namespace isp
