#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "teamtrack/geometry.hpp"

namespace teamtrack::testing {

// Two-tone textured rectangle matching the scenario renderer's body style.
inline void draw_body(Frame& f, int cx, int cy, int w, int h,
                      std::uint8_t jr = 200, std::uint8_t jg = 40, std::uint8_t jb = 40,
                      std::uint8_t sr = 235, std::uint8_t sg = 235, std::uint8_t sb = 235) {
    const int x0 = cx - w / 2, y0 = cy - h / 2;
    const int jersey_rows = static_cast<int>(std::ceil(0.6 * h));
    for (int y = std::max(0, y0); y <= std::min(f.height - 1, y0 + h - 1); ++y) {
        for (int x = std::max(0, x0); x <= std::min(f.width - 1, x0 + w - 1); ++x) {
            const int lx = x - x0, ly = y - y0;
            const int off = ((lx / 4 + ly / 4) % 2 == 0) ? 12 : -12;
            auto c = [&](int base) {
                return static_cast<std::uint8_t>(std::clamp(base + off, 0, 255));
            };
            if (ly < jersey_rows)
                f.set_pixel(x, y, c(jr), c(jg), c(jb));
            else
                f.set_pixel(x, y, c(sr), c(sg), c(sb));
        }
    }
}

inline Mask random_mask(std::mt19937& rng, int w, int h, double density = 0.2) {
    Mask m(w, h);
    std::bernoulli_distribution bit(density);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (bit(rng)) m.set(x, y);
    return m;
}

// Reference HSV -> RGB used only to sanity-check the forward conversion.
inline void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
    const double c = v * s;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r1 = 0, g1 = 0, b1 = 0;
    if (hp < 1) { r1 = c; g1 = x; }
    else if (hp < 2) { r1 = x; g1 = c; }
    else if (hp < 3) { g1 = c; b1 = x; }
    else if (hp < 4) { g1 = x; b1 = c; }
    else if (hp < 5) { r1 = x; b1 = c; }
    else { r1 = c; b1 = x; }
    const double m = v - c;
    r = r1 + m;
    g = g1 + m;
    b = b1 + m;
}

}  // namespace teamtrack::testing
