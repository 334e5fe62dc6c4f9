#pragma once

#include <array>
#include <cstddef>
#include <deque>

#include "teamtrack/geometry.hpp"

namespace teamtrack {

inline constexpr int kHistogramBins = 32;

// Concatenated per-channel histograms; each half is L1-normalized on its own
// (or all-zero when the source region was empty).
struct AppearanceVector {
    std::array<double, kHistogramBins> hue_hist{};
    std::array<double, kHistogramBins> sat_hist{};
};

// Ring buffer of the most recent appearance vectors, oldest dropped first.
class AppearanceWindow {
public:
    explicit AppearanceWindow(std::size_t capacity = 10) : capacity_(capacity) {}

    void push(const AppearanceVector& v) {
        if (entries_.size() == capacity_) entries_.pop_front();
        entries_.push_back(v);
    }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    const std::deque<AppearanceVector>& entries() const { return entries_; }

private:
    std::size_t capacity_;
    std::deque<AppearanceVector> entries_;
};

// Keeps set pixels in the top 60% of the mask's own bounding-box rows
// (row < min_y + 0.6 * (h + 1)); everything else is cleared.
Mask jersey_mask(const Mask& mask);

// Hue binned by floor(h/360*32), saturation by floor(s*32), both clamped to 31.
// Each half is normalized to sum 1; an empty region yields the all-zero vector.
AppearanceVector compute_appearance(const Frame& frame, const Mask& jersey);

// Element-wise arithmetic mean over the stored vectors.
AppearanceVector window_mean(const AppearanceWindow& window);

// 1 - mean per-half Hellinger distance sqrt(1 - sum sqrt(p*q)).
// Identical vectors give 1, disjoint-support halves give 0; an all-zero half
// counts as maximally distant so empty evidence can never match.
double similarity(const AppearanceVector& a, const AppearanceVector& b);

// Appearance of the bbox interior treated as a mask (jersey cut applied).
AppearanceVector appearance_from_bbox(const Frame& frame, const BBox& box);

}  // namespace teamtrack
