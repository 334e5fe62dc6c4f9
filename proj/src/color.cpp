#include "teamtrack/color.hpp"

#include <algorithm>

namespace teamtrack {

HsvPixel rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double maxc = std::max({r, g, b});
    const double minc = std::min({r, g, b});
    const double delta = maxc - minc;

    HsvPixel out;
    out.v = maxc;
    out.s = maxc > 0.0 ? delta / maxc : 0.0;
    if (delta <= 0.0) {
        out.h = 0.0;
        return out;
    }
    double h;
    if (maxc == r)
        h = 60.0 * ((g - b) / delta);
    else if (maxc == g)
        h = 60.0 * ((b - r) / delta + 2.0);
    else
        h = 60.0 * ((r - g) / delta + 4.0);
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

}  // namespace teamtrack
