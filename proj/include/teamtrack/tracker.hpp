#pragma once

#include <complex>
#include <vector>

#include "teamtrack/geometry.hpp"

namespace teamtrack {

struct TrackerConfig {
    int template_size = 32;        // learned filter resolution, px per side
    double search_scale = 2.0;     // search window as a multiple of the bbox
    double learning_rate = 0.125;
    double response_sigma = 2.0;   // regression target spread, template coords
    double regularization = 1e-3;
    double update_confidence = 0.3;  // online update gate
    long long min_pixel_area = 64;
};

struct TrackerOutput {
    BBox bbox;                 // clamped inside the frame, size unchanged
    double confidence = 0.0;   // clamp((PSR - 3) / 17, 0, 1)
    Vec2 raw_center;           // peak-implied center before clamping
};

// Single-channel ridge-regression correlation filter with PSR confidence.
// Trains a frequency-domain filter against a centered Gaussian response and
// slides its spatial form over a search window around the last position.
class CorrelationTracker {
public:
    CorrelationTracker(const Frame& frame, const BBox& box, const TrackerConfig& cfg = {});

    TrackerOutput update(const Frame& frame);

    // Fresh filter at a new box; the caller keeps identity and history.
    void reinit(const Frame& frame, const BBox& box);

    const BBox& box() const { return box_; }
    const TrackerConfig& config() const { return cfg_; }

private:
    struct Correlation {
        Vec2 center;
        double confidence = 0.0;
    };

    void train(const Frame& frame, const BBox& box, double lr);
    Correlation correlate(const Frame& frame, const Vec2& center) const;
    std::vector<std::complex<double>> spectrum_at(const Frame& frame, const Vec2& center) const;
    std::vector<double> sample_grayscale(const Frame& frame, double cx, double cy,
                                         double span_w, double span_h, int out_size) const;
    static void preprocess(std::vector<double>& patch);

    TrackerConfig cfg_;
    int tsize_ = 0;  // template side
    int wsize_ = 0;  // search window side, template * search scale
    BBox box_;
    std::vector<double> hann_;                        // wsize^2 cosine window
    std::vector<std::complex<double>> target_fft_;    // Gaussian response spectrum
    std::vector<std::complex<double>> numerator_;     // filter numerator accumulator
    std::vector<double> denominator_;                 // filter denominator accumulator
};

}  // namespace teamtrack
