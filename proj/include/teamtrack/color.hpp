#pragma once

#include <cstdint>

namespace teamtrack {

// Hue in degrees [0, 360); saturation and value as ratios in [0, 1].
struct HsvPixel {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;
};

// Standard hexcone conversion. Achromatic inputs (r == g == b) give h = 0, s = 0.
HsvPixel rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace teamtrack
