// Direct-drive DC motor model. The PWM H-bridge is abstracted as an ideal
// average-voltage source; winding inductance is neglected since its electrical
// pole sits far above the stabilization loop bandwidth.

#pragma once

#include <stdexcept>

namespace isp {

struct MotorParams {
    double torque_constant = 0.04;   // N m/A
    double back_emf_constant = 0.04; // V s/rad
    double winding_resistance = 1.0; // ohm
    double supply_limit = 24.0;      // V

    void validate() const {
        if (!(torque_constant > 0.0 && back_emf_constant > 0.0 && winding_resistance > 0.0 &&
              supply_limit > 0.0)) {
            throw std::invalid_argument("MotorParams: all parameters must be positive");
        }
    }
};

/// Shaft torque for a commanded voltage and shaft rate (rotor relative to
/// stator). The command clamps to the supply rails before conversion.
double motor_torque(double command_voltage, double shaft_rate, const MotorParams& params);

} // namespace isp
