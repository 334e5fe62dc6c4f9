#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "teamtrack/errors.hpp"

namespace teamtrack {

// Row-major RGB raster, 8 bits per channel.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // width * height * 3

    Frame() = default;
    Frame(int w, int h)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    static Frame solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    bool contains(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }

    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    std::uint8_t* pixel(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = pixel(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }

    bool operator==(const Frame&) const = default;
};

// Axis-aligned box. The covered pixel span is inclusive: [x, x+w] x [y, y+h],
// so the pixel-count area is (w+1)*(h+1).
struct BBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }    // inclusive max column
    int bottom() const { return y + h; }   // inclusive max row
    long long pixel_area() const {
        return static_cast<long long>(w + 1) * (h + 1);
    }
    bool degenerate() const { return w == 0 || h == 0; }
    bool contains(int px, int py) const {
        return px >= x && px <= right() && py >= y && py <= bottom();
    }

    bool operator==(const BBox&) const = default;
};

// Frame-sized binary silhouette.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // one byte per pixel, 0 or 1

    Mask() = default;
    Mask(int w, int h)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    bool test(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v = true) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    bool empty() const;
    std::size_t count() const;

    bool operator==(const Mask&) const = default;
};

enum class TeamLabel { Team1, Team2, Referee };

std::string team_label_name(TeamLabel team);
TeamLabel parse_team_label(const std::string& name);

// Identity assigned in prompt order starting at 0.
using PlayerId = int;

struct PointPrompt {
    int x = 0;
    int y = 0;
    TeamLabel team = TeamLabel::Team1;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Tight box around the set pixels: (min_x, min_y, max_x - min_x, max_y - min_y).
// Throws EmptyMask when no pixel is set.
BBox bbox_from_mask(const Mask& mask);

// Intersection over union on inclusive pixel spans. Disjoint boxes give 0;
// two degenerate (w or h == 0) boxes give 0 by definition.
double iou(const BBox& a, const BBox& b);

Vec2 bbox_center(const BBox& b);

}  // namespace teamtrack
