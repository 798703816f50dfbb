#include "isp/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isp {

namespace {

// FNV-1a, so stream identities do not depend on std::hash.
std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

RandomStream::RandomStream(std::uint64_t master_seed, const std::string& name) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(fnv1a(name)),
                      static_cast<std::uint32_t>(fnv1a(name) >> 32)};
    engine_.seed(seq);
}

double RandomStream::gaussian(double stddev) {
    if (stddev <= 0.0) {
        return 0.0;
    }
    return stddev * normal_(engine_);
}

double quantize(double value, double step) {
    if (step <= 0.0) {
        return value;
    }
    return step * std::round(value / step);
}

void GyroModel::validate() const {
    if (!(full_scale > 0.0) || !(sample_rate > 0.0) || noise_std < 0.0) {
        throw std::invalid_argument("GyroModel: full_scale and sample_rate must be positive, "
                                    "noise_std non-negative");
    }
}

void PotModel::validate() const {
    if (!(quantization_step > 0.0)) {
        throw std::invalid_argument("PotModel: quantization_step must be positive");
    }
}

GyroSensor::GyroSensor(const GyroModel& model, std::uint64_t master_seed,
                       const std::string& stream_name)
    : model_(model), stream_(master_seed, stream_name) {
    model_.validate();
}

RateVector GyroSensor::sample(const RateVector& true_rate) {
    RateVector out;
    out.frame = true_rate.frame;
    for (int axis = 0; axis < 3; ++axis) {
        double v = true_rate.omega[axis] + model_.bias + stream_.gaussian(model_.noise_std);
        v = std::clamp(v, -model_.full_scale, model_.full_scale);
        out.omega[axis] = quantize(v, model_.quantization_step);
    }
    return out;
}

PotSensor::PotSensor(const PotModel& model, std::uint64_t master_seed,
                     const std::string& stream_name)
    : model_(model), stream_(master_seed, stream_name) {
    model_.validate();
}

double PotSensor::sample(double true_angle) {
    const double noisy = wrap_angle(true_angle + stream_.gaussian(model_.noise_std));
    return wrap_angle(quantize(noisy, model_.quantization_step));
}

} // namespace isp
