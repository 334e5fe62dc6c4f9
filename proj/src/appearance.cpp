#include "teamtrack/appearance.hpp"

#include <algorithm>
#include <cmath>

#include "teamtrack/color.hpp"

namespace teamtrack {

Mask jersey_mask(const Mask& mask) {
    const BBox box = bbox_from_mask(mask);  // throws EmptyMask
    const double cutoff = box.y + 0.6 * (box.h + 1);
    Mask out(mask.width, mask.height);
    for (int y = box.y; y <= box.bottom(); ++y) {
        if (static_cast<double>(y) >= cutoff) break;
        for (int x = box.x; x <= box.right(); ++x)
            if (mask.test(x, y)) out.set(x, y);
    }
    return out;
}

AppearanceVector compute_appearance(const Frame& frame, const Mask& jersey) {
    if (frame.width != jersey.width || frame.height != jersey.height)
        throw Error(ErrorKind::DimensionMismatch,
                    "compute_appearance: frame and mask dimensions differ");

    std::array<double, kHistogramBins> hue{};
    std::array<double, kHistogramBins> sat{};
    long long n = 0;
    for (int y = 0; y < jersey.height; ++y) {
        for (int x = 0; x < jersey.width; ++x) {
            if (!jersey.test(x, y)) continue;
            const auto* p = frame.pixel(x, y);
            const HsvPixel hsv = rgb_to_hsv(p[0], p[1], p[2]);
            const int hb = std::min(kHistogramBins - 1,
                                    static_cast<int>(std::floor(hsv.h / 360.0 * kHistogramBins)));
            const int sb = std::min(kHistogramBins - 1,
                                    static_cast<int>(std::floor(hsv.s * kHistogramBins)));
            hue[hb] += 1.0;
            sat[sb] += 1.0;
            ++n;
        }
    }
    AppearanceVector out;
    if (n == 0) return out;  // all-zero vector for an empty jersey region
    for (int i = 0; i < kHistogramBins; ++i) {
        out.hue_hist[i] = hue[i] / n;
        out.sat_hist[i] = sat[i] / n;
    }
    return out;
}

AppearanceVector window_mean(const AppearanceWindow& window) {
    if (window.empty())
        throw Error(ErrorKind::InvalidArgument, "window_mean: empty appearance window");
    AppearanceVector mean;
    for (const auto& v : window.entries()) {
        for (int i = 0; i < kHistogramBins; ++i) {
            mean.hue_hist[i] += v.hue_hist[i];
            mean.sat_hist[i] += v.sat_hist[i];
        }
    }
    const double n = static_cast<double>(window.size());
    for (int i = 0; i < kHistogramBins; ++i) {
        mean.hue_hist[i] /= n;
        mean.sat_hist[i] /= n;
    }
    return mean;
}

namespace {

double half_distance(const std::array<double, kHistogramBins>& p,
                     const std::array<double, kHistogramBins>& q) {
    double sp = 0.0, sq = 0.0, bc = 0.0;
    for (int i = 0; i < kHistogramBins; ++i) {
        sp += p[i];
        sq += q[i];
        bc += std::sqrt(p[i] * q[i]);
    }
    if (sp <= 0.0 || sq <= 0.0) return 1.0;  // no evidence cannot match
    // identical histograms give bc = sum(p) = 1 up to rounding; the sqrt would
    // blow that noise up to ~1e-8, so gaps below it count as exact matches
    const double gap = 1.0 - bc;
    return gap <= 1e-12 ? 0.0 : std::sqrt(gap);
}

}  // namespace

double similarity(const AppearanceVector& a, const AppearanceVector& b) {
    const double dh = half_distance(a.hue_hist, b.hue_hist);
    const double ds = half_distance(a.sat_hist, b.sat_hist);
    return 1.0 - 0.5 * (dh + ds);
}

AppearanceVector appearance_from_bbox(const Frame& frame, const BBox& box) {
    Mask m(frame.width, frame.height);
    const int x0 = std::max(0, box.x);
    const int y0 = std::max(0, box.y);
    const int x1 = std::min(frame.width - 1, box.right());
    const int y1 = std::min(frame.height - 1, box.bottom());
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) m.set(x, y);
    if (m.empty()) return AppearanceVector{};
    return compute_appearance(frame, jersey_mask(m));
}

}  // namespace teamtrack
