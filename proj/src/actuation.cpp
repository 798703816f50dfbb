#include "isp/actuation.hpp"

#include <algorithm>

namespace isp {

double motor_torque(double command_voltage, double shaft_rate, const MotorParams& params) {
    const double v = std::clamp(command_voltage, -params.supply_limit, params.supply_limit);
    const double current = (v - params.back_emf_constant * shaft_rate) / params.winding_resistance;
    return params.torque_constant * current;
}

} // namespace isp
