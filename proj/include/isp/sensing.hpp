// Rate gyro and potentiometer measurement models: bias, additive Gaussian
// noise, range clamping, quantization and angle wrapping.
//
// Every sensor owns a named random stream derived from the scenario master
// seed, so toggling one sensor's noise never shifts another's sequence.

#pragma once

#include "isp/frames.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace isp {

/// Deterministic per-sensor random stream: master seed + stream name.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, const std::string& name);

    double gaussian(double stddev);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Round-half-away-from-zero quantization; step <= 0 disables it.
double quantize(double value, double step);

struct GyroModel {
    double full_scale = 250.0 * M_PI / 180.0; // rad/s
    double sample_rate = 1000.0;              // Hz
    double noise_std = 0.02 * M_PI / 180.0;   // rad/s per sample
    double bias = 0.05 * M_PI / 180.0;        // rad/s
    double quantization_step = 0.0;           // rad/s

    void validate() const;
};

struct PotModel {
    double noise_std = 0.0;                        // rad
    double quantization_step = 2.0 * M_PI / 4096.0; // rad, 12-bit over a turn
    bool continuous_rotation = true;

    void validate() const;
};

/// Three-axis rate gyro strapped to the platform.
class GyroSensor {
public:
    GyroSensor(const GyroModel& model, std::uint64_t master_seed, const std::string& stream_name);

    /// Per-axis: clamp(true + bias + noise, +/-full_scale), then quantize.
    RateVector sample(const RateVector& true_rate);

    const GyroModel& model() const { return model_; }

private:
    GyroModel model_;
    RandomStream stream_;
};

/// Continuous-rotation angle pickoff on one joint.
class PotSensor {
public:
    PotSensor(const PotModel& model, std::uint64_t master_seed, const std::string& stream_name);

    /// true + noise, wrapped to (-pi, pi], quantized, re-wrapped.
    double sample(double true_angle);

private:
    PotModel model_;
    RandomStream stream_;
};

} // namespace isp
