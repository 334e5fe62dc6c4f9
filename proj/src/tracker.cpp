#include "teamtrack/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "teamtrack/fft.hpp"

namespace teamtrack {

namespace {

constexpr double kPsrOffset = 3.0;    // PSR mapped to confidence 0
constexpr double kPsrRange = 17.0;    // PSR 20 maps to confidence 1
constexpr int kPeakExclusion = 5;     // 11x11 neighborhood around the peak
constexpr double kSidelobeStdFloor = 1e-6;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Parabolic one-dimensional refinement around a discrete peak.
double subpixel_offset(double left, double center, double right) {
    const double denom = left - 2.0 * center + right;
    if (denom >= -1e-12) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

CorrelationTracker::CorrelationTracker(const Frame& frame, const BBox& box,
                                       const TrackerConfig& cfg)
    : cfg_(cfg) {
    tsize_ = cfg_.template_size;
    wsize_ = static_cast<int>(std::lround(tsize_ * cfg_.search_scale));
    if (tsize_ < 8 || (tsize_ & (tsize_ - 1)) != 0)
        throw Error(ErrorKind::InvalidArgument, "template size must be a power of two >= 8");
    if (wsize_ <= tsize_ || (wsize_ & (wsize_ - 1)) != 0)
        throw Error(ErrorKind::InvalidArgument,
                    "search scale must map the template to a larger power-of-two window");

    const std::size_t n = static_cast<std::size_t>(wsize_) * wsize_;
    hann_.resize(n);
    for (int y = 0; y < wsize_; ++y) {
        const double wy = 0.5 * (1.0 - std::cos(2.0 * M_PI * y / (wsize_ - 1)));
        for (int x = 0; x < wsize_; ++x) {
            const double wx = 0.5 * (1.0 - std::cos(2.0 * M_PI * x / (wsize_ - 1)));
            hann_[static_cast<std::size_t>(y) * wsize_ + x] = wx * wy;
        }
    }

    // regression target: Gaussian peak at the window center
    std::vector<std::complex<double>> g(n);
    const int c = wsize_ / 2;
    const double two_sigma_sq = 2.0 * cfg_.response_sigma * cfg_.response_sigma;
    for (int y = 0; y < wsize_; ++y)
        for (int x = 0; x < wsize_; ++x)
            g[static_cast<std::size_t>(y) * wsize_ + x] =
                std::exp(-((x - c) * (x - c) + (y - c) * (y - c)) / two_sigma_sq);
    detail::fft2(g, wsize_, false);
    target_fft_ = std::move(g);

    reinit(frame, box);
}

void CorrelationTracker::reinit(const Frame& frame, const BBox& box) {
    if (box.x < 0 || box.y < 0 || box.right() >= frame.width || box.bottom() >= frame.height)
        throw Error(ErrorKind::OutOfBounds, "tracker: bbox outside frame");
    if (box.pixel_area() < cfg_.min_pixel_area)
        throw Error(ErrorKind::InvalidArgument,
                    "tracker: bbox area below " + std::to_string(cfg_.min_pixel_area) + " px^2");
    box_ = box;
    numerator_.assign(static_cast<std::size_t>(wsize_) * wsize_, {0.0, 0.0});
    denominator_.assign(static_cast<std::size_t>(wsize_) * wsize_, 0.0);
    train(frame, box, 1.0);
}

std::vector<double> CorrelationTracker::sample_grayscale(const Frame& frame, double cx,
                                                         double cy, double span_w,
                                                         double span_h, int out) const {
    std::vector<double> patch(static_cast<std::size_t>(out) * out);
    const double ox = cx - span_w / 2.0;
    const double oy = cy - span_h / 2.0;
    const double sx = span_w / out;
    const double sy = span_h / out;
    for (int y = 0; y < out; ++y) {
        const double fy = oy + (y + 0.5) * sy - 0.5;
        const int y0 = static_cast<int>(std::floor(fy));
        const double ty = fy - y0;
        const int cy0 = std::clamp(y0, 0, frame.height - 1);
        const int cy1 = std::clamp(y0 + 1, 0, frame.height - 1);
        for (int x = 0; x < out; ++x) {
            const double fx = ox + (x + 0.5) * sx - 0.5;
            const int x0 = static_cast<int>(std::floor(fx));
            const double tx = fx - x0;
            const int cx0 = std::clamp(x0, 0, frame.width - 1);
            const int cx1 = std::clamp(x0 + 1, 0, frame.width - 1);
            auto luma = [&frame](int px, int py) {
                const auto* p = frame.pixel(px, py);
                return 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
            };
            const double top = luma(cx0, cy0) * (1.0 - tx) + luma(cx1, cy0) * tx;
            const double bot = luma(cx0, cy1) * (1.0 - tx) + luma(cx1, cy1) * tx;
            patch[static_cast<std::size_t>(y) * out + x] = top * (1.0 - ty) + bot * ty;
        }
    }
    return patch;
}

void CorrelationTracker::preprocess(std::vector<double>& patch) {
    double mean = 0.0;
    for (double v : patch) mean += std::log1p(v);
    mean /= static_cast<double>(patch.size());
    double energy = 0.0;
    for (double& v : patch) {
        v = std::log1p(v) - mean;
        energy += v * v;
    }
    const double norm = std::sqrt(energy);
    if (norm < 1e-10) {
        std::fill(patch.begin(), patch.end(), 0.0);
        return;
    }
    for (double& v : patch) v /= norm;
}

std::vector<std::complex<double>> CorrelationTracker::spectrum_at(const Frame& frame,
                                                                  const Vec2& center) const {
    std::vector<double> patch = sample_grayscale(frame, center.x, center.y,
                                                 cfg_.search_scale * (box_.w + 1.0),
                                                 cfg_.search_scale * (box_.h + 1.0), wsize_);
    preprocess(patch);
    std::vector<std::complex<double>> f(patch.size());
    for (std::size_t i = 0; i < patch.size(); ++i) f[i] = patch[i] * hann_[i];
    detail::fft2(f, wsize_, false);
    return f;
}

void CorrelationTracker::train(const Frame& frame, const BBox& box, double lr) {
    const auto f = spectrum_at(frame, bbox_center(box));
    const double keep = 1.0 - lr;
    for (std::size_t i = 0; i < f.size(); ++i) {
        numerator_[i] = keep * numerator_[i] + lr * target_fft_[i] * std::conj(f[i]);
        denominator_[i] = keep * denominator_[i] + lr * std::norm(f[i]);
    }
}

CorrelationTracker::Correlation CorrelationTracker::correlate(const Frame& frame,
                                                              const Vec2& center) const {
    auto z = spectrum_at(frame, center);
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] *= numerator_[i] / (denominator_[i] + cfg_.regularization);
    detail::fft2(z, wsize_, true);

    const int rsize = wsize_;
    std::vector<double> response(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) response[i] = z[i].real();

    const int mid = wsize_ / 2;
    int peak_u = mid, peak_v = mid;
    double peak = response[static_cast<std::size_t>(mid) * rsize + mid];
    double lo = peak;
    for (int v = 0; v < rsize; ++v)
        for (int u = 0; u < rsize; ++u) {
            const double r = response[static_cast<std::size_t>(v) * rsize + u];
            lo = std::min(lo, r);
            if (r > peak) {
                peak = r;
                peak_u = u;
                peak_v = v;
            }
        }
    if (peak - lo < 1e-12) {  // flat response: no evidence, stay put
        peak_u = mid;
        peak_v = mid;
        peak = response[static_cast<std::size_t>(mid) * rsize + mid];
    }

    // peak-to-sidelobe ratio outside an 11x11 neighborhood of the peak
    double side_sum = 0.0, side_sq = 0.0;
    long long side_n = 0;
    for (int v = 0; v < rsize; ++v)
        for (int u = 0; u < rsize; ++u) {
            if (std::abs(u - peak_u) <= kPeakExclusion && std::abs(v - peak_v) <= kPeakExclusion)
                continue;
            const double r = response[static_cast<std::size_t>(v) * rsize + u];
            side_sum += r;
            side_sq += r * r;
            ++side_n;
        }
    double confidence = 0.0;
    if (side_n > 0) {
        const double mean = side_sum / side_n;
        const double var = std::max(0.0, side_sq / side_n - mean * mean);
        const double stddev = std::max(std::sqrt(var), kSidelobeStdFloor);
        const double psr = (peak - mean) / stddev;
        confidence = clamp01((psr - kPsrOffset) / kPsrRange);
    }

    auto at = [&](int u, int v) {  // circular response neighbors
        u = (u + rsize) % rsize;
        v = (v + rsize) % rsize;
        return response[static_cast<std::size_t>(v) * rsize + u];
    };
    const double du = subpixel_offset(at(peak_u - 1, peak_v), peak, at(peak_u + 1, peak_v));
    const double dv = subpixel_offset(at(peak_u, peak_v - 1), peak, at(peak_u, peak_v + 1));

    // displacement from window center, wrapped into [-wsize/2, wsize/2)
    double shift_u = peak_u + du - mid;
    double shift_v = peak_v + dv - mid;
    if (shift_u > mid) shift_u -= wsize_;
    if (shift_v > mid) shift_v -= wsize_;

    const double scale_x = cfg_.search_scale * (box_.w + 1.0) / wsize_;
    const double scale_y = cfg_.search_scale * (box_.h + 1.0) / wsize_;
    return Correlation{Vec2{center.x + shift_u * scale_x, center.y + shift_v * scale_y},
                       confidence};
}

TrackerOutput CorrelationTracker::update(const Frame& frame) {
    // coarse pass, then re-correlate centered on the coarse peak: the cosine
    // window biases off-center peaks inward, so the second pass reads the
    // displacement where the bias is negligible
    const Correlation coarse = correlate(frame, bbox_center(box_));
    const Correlation fine = correlate(frame, coarse.center);
    const double confidence = fine.confidence;
    const double raw_cx = fine.center.x;
    const double raw_cy = fine.center.y;

    BBox moved = box_;
    moved.x = std::clamp(static_cast<int>(std::lround(raw_cx - box_.w / 2.0)), 0,
                         std::max(0, frame.width - 1 - box_.w));
    moved.y = std::clamp(static_cast<int>(std::lround(raw_cy - box_.h / 2.0)), 0,
                         std::max(0, frame.height - 1 - box_.h));
    box_ = moved;

    if (confidence >= cfg_.update_confidence) train(frame, box_, cfg_.learning_rate);

    return TrackerOutput{box_, confidence, Vec2{raw_cx, raw_cy}};
}

}  // namespace teamtrack
