// Target tracker geometry and camera measurement path: inertial target
// direction -> yaw/pitch angular errors -> delayed, pixel-quantized centroid
// samples -> angular errors fed to the tracking controllers. Also the
// synthetic-image centroid detector used to exercise the full image path.

#pragma once

#include "isp/frames.hpp"

#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace isp {

struct CameraModel {
    double pixel_scale_mrad = 0.5;  // mrad per pixel
    int width = 640;                // pixels
    int height = 480;               // pixels
    double frame_rate = 20.0;       // Hz
    double processing_delay = 0.05; // s

    void validate() const;
};

/// Continuous-valued centroid position. For camera measurements the origin is
/// the image centre (u right, v up in error terms); detect_centroid reports
/// plain column/row image coordinates.
struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

/// Angular tracking errors in milliradians. Positive yaw error: target lies
/// toward +y_p; positive pitch error: target lies toward +z_p.
struct TrackingError {
    double yaw_mrad = 0.0;
    double pitch_mrad = 0.0;
    bool lost = false; // target behind the boresight hemisphere
};

/// Angular offset of an inertial target direction from the platform boresight
/// (+x_p). `target_dir` must be unit norm.
TrackingError tracking_error(const Vec3& target_dir_inertial, const Attitude& platform_attitude);

/// Inverse of the camera pixel mapping.
TrackingError pixel_to_error(const PixelCoord& px, const CameraModel& model);

/// Camera measurement pipeline: quantizes the true error to whole pixels
/// (ties round to even, so a half-pixel offset stays invisible), checks the
/// field of view, and delays availability by the processing time.
class Camera {
public:
    explicit Camera(const CameraModel& model);

    /// Captures a frame at sim_time. Returns the quantized pixel coordinate,
    /// or nullopt when the target is outside the field of view or lost.
    std::optional<PixelCoord> measure(const TrackingError& err, double sim_time);

    /// Newest sample whose availability time (capture + processing delay) is
    /// not after `sim_time`. Consumes everything up to and including it.
    std::optional<PixelCoord> fetch(double sim_time);

    const CameraModel& model() const { return model_; }
    double frame_period() const { return 1.0 / model_.frame_rate; }

private:
    struct Pending {
        double available_at;
        bool detected;
        PixelCoord px;
    };
    CameraModel model_;
    std::deque<Pending> queue_;
};

/// Grayscale image with intensities in [0, 1], row-major.
struct SyntheticFrame {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
    double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }

    static SyntheticFrame filled(int width, int height, double value = 0.0);
};

/// Threshold the frame, find 4-connected components, and return the
/// intensity-weighted centroid (column, row) of the largest one. Area ties
/// break toward the component with the smaller top-left bounding-box corner.
/// No pixel above threshold -> nullopt.
std::optional<PixelCoord> detect_centroid(const SyntheticFrame& frame, double threshold);

/// Binary (P5) PGM serialization, 8-bit.
void save_pgm(const SyntheticFrame& frame, const std::string& path);
SyntheticFrame load_pgm(const std::string& path);

} // namespace isp
