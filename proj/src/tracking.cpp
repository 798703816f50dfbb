#include "isp/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace isp {

void CameraModel::validate() const {
    if (!(pixel_scale_mrad > 0.0) || !(frame_rate > 0.0) || processing_delay < 0.0 ||
        width <= 0 || height <= 0) {
        throw std::invalid_argument("CameraModel: invalid parameters");
    }
}

TrackingError tracking_error(const Vec3& target_dir_inertial, const Attitude& platform_attitude) {
    if (std::abs(target_dir_inertial.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("tracking_error: target direction must be unit norm");
    }
    const Vec3 t_p = platform_attitude.to_body(target_dir_inertial);
    TrackingError err;
    if (t_p.x() <= 0.0) {
        err.lost = true;
        return err;
    }
    err.yaw_mrad = std::atan2(t_p.y(), t_p.x()) * 1e3;
    err.pitch_mrad = std::atan2(t_p.z(), t_p.x()) * 1e3;
    return err;
}

TrackingError pixel_to_error(const PixelCoord& px, const CameraModel& model) {
    TrackingError err;
    err.yaw_mrad = px.u * model.pixel_scale_mrad;
    err.pitch_mrad = px.v * model.pixel_scale_mrad;
    return err;
}

namespace {

// Ties-to-even so an exactly half-pixel offset quantizes to zero.
double round_half_even(double x) {
    const double r = std::nearbyint(x);
    return r == 0.0 ? 0.0 : r; // collapse -0.0
}

} // namespace

Camera::Camera(const CameraModel& model) : model_(model) { model_.validate(); }

std::optional<PixelCoord> Camera::measure(const TrackingError& err, double sim_time) {
    Pending entry;
    entry.available_at = sim_time + model_.processing_delay;
    entry.detected = false;
    if (!err.lost) {
        const double u = round_half_even(err.yaw_mrad / model_.pixel_scale_mrad);
        const double v = round_half_even(err.pitch_mrad / model_.pixel_scale_mrad);
        if (std::abs(u) <= model_.width / 2.0 && std::abs(v) <= model_.height / 2.0) {
            entry.detected = true;
            entry.px = PixelCoord{u, v};
        }
    }
    queue_.push_back(entry);
    return entry.detected ? std::optional<PixelCoord>(entry.px) : std::nullopt;
}

std::optional<PixelCoord> Camera::fetch(double sim_time) {
    std::optional<PixelCoord> newest;
    bool have_entry = false;
    bool detected = false;
    PixelCoord px;
    while (!queue_.empty() && queue_.front().available_at <= sim_time + 1e-12) {
        have_entry = true;
        detected = queue_.front().detected;
        px = queue_.front().px;
        queue_.pop_front();
    }
    if (have_entry && detected) {
        newest = px;
    }
    return newest;
}

SyntheticFrame SyntheticFrame::filled(int width, int height, double value) {
    SyntheticFrame f;
    f.width = width;
    f.height = height;
    f.pixels.assign(static_cast<std::size_t>(width) * height, value);
    return f;
}

std::optional<PixelCoord> detect_centroid(const SyntheticFrame& frame, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("detect_centroid: threshold must lie in (0, 1)");
    }
    const int w = frame.width;
    const int h = frame.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);

    struct Component {
        int area = 0;
        int min_row = 0;
        int min_col = 0;
        double weight = 0.0;
        double moment_u = 0.0;
        double moment_v = 0.0;
    };
    std::vector<Component> components;

    std::vector<int> stack;
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const int idx = row * w + col;
            if (label[idx] >= 0 || frame.pixels[idx] < threshold) {
                continue;
            }
            const int id = static_cast<int>(components.size());
            Component comp;
            comp.min_row = row;
            comp.min_col = col;
            stack.push_back(idx);
            label[idx] = id;
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int r = cur / w;
                const int c = cur % w;
                const double intensity = frame.pixels[cur];
                comp.area += 1;
                comp.min_row = std::min(comp.min_row, r);
                comp.min_col = std::min(comp.min_col, c);
                comp.weight += intensity;
                comp.moment_u += intensity * c;
                comp.moment_v += intensity * r;
                const int neighbors[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
                for (const auto& n : neighbors) {
                    if (n[0] < 0 || n[0] >= h || n[1] < 0 || n[1] >= w) {
                        continue;
                    }
                    const int nidx = n[0] * w + n[1];
                    if (label[nidx] < 0 && frame.pixels[nidx] >= threshold) {
                        label[nidx] = id;
                        stack.push_back(nidx);
                    }
                }
            }
            components.push_back(comp);
        }
    }

    if (components.empty()) {
        return std::nullopt;
    }
    const Component* best = &components[0];
    for (const Component& comp : components) {
        if (comp.area > best->area ||
            (comp.area == best->area &&
             (comp.min_row < best->min_row ||
              (comp.min_row == best->min_row && comp.min_col < best->min_col)))) {
            best = &comp;
        }
    }
    return PixelCoord{best->moment_u / best->weight, best->moment_v / best->weight};
}

void save_pgm(const SyntheticFrame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("save_pgm: cannot open " + path);
    }
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    for (double p : frame.pixels) {
        const double clamped = std::clamp(p, 0.0, 1.0);
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
    }
}

SyntheticFrame load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("load_pgm: cannot open " + path);
    }
    std::string magic;
    in >> magic;
    if (magic != "P5") {
        throw std::runtime_error("load_pgm: unsupported format " + magic);
    }
    int width = 0;
    int height = 0;
    int maxval = 0;
    in >> width >> height >> maxval;
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
        throw std::runtime_error("load_pgm: bad header in " + path);
    }
    in.get(); // single whitespace after the header
    SyntheticFrame frame = SyntheticFrame::filled(width, height);
    for (double& p : frame.pixels) {
        const int byte = in.get();
        if (byte == EOF) {
            throw std::runtime_error("load_pgm: truncated data in " + path);
        }
        p = static_cast<double>(byte) / maxval;
    }
    return frame;
}

} // namespace isp
