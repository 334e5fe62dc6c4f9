#include "teamtrack/geometry.hpp"

#include <algorithm>

namespace teamtrack {

Frame Frame::solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Frame f(w, h);
    for (std::size_t i = 0; i < f.data.size(); i += 3) {
        f.data[i] = r;
        f.data[i + 1] = g;
        f.data[i + 2] = b;
    }
    return f;
}

bool Mask::empty() const {
    for (auto b : bits)
        if (b) return false;
    return true;
}

std::size_t Mask::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += (b != 0);
    return n;
}

std::string team_label_name(TeamLabel team) {
    switch (team) {
        case TeamLabel::Team1: return "team1";
        case TeamLabel::Team2: return "team2";
        case TeamLabel::Referee: return "referee";
    }
    return "team1";
}

TeamLabel parse_team_label(const std::string& name) {
    if (name == "team1") return TeamLabel::Team1;
    if (name == "team2") return TeamLabel::Team2;
    if (name == "referee") return TeamLabel::Referee;
    throw Error(ErrorKind::InvalidArgument, "unknown team label: " + name);
}

BBox bbox_from_mask(const Mask& mask) {
    int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
    for (int y = 0; y < mask.height; ++y) {
        const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
        for (int x = 0; x < mask.width; ++x) {
            if (!row[x]) continue;
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
        }
    }
    if (max_x < 0)
        throw Error(ErrorKind::EmptyMask, "bbox_from_mask: mask has no set pixels");
    return BBox{min_x, min_y, max_x - min_x, max_y - min_y};
}

double iou(const BBox& a, const BBox& b) {
    if (a.degenerate() && b.degenerate()) return 0.0;
    const int ix0 = std::max(a.x, b.x);
    const int iy0 = std::max(a.y, b.y);
    const int ix1 = std::min(a.right(), b.right());
    const int iy1 = std::min(a.bottom(), b.bottom());
    if (ix1 < ix0 || iy1 < iy0) return 0.0;
    const long long inter =
        static_cast<long long>(ix1 - ix0 + 1) * (iy1 - iy0 + 1);
    const long long uni = a.pixel_area() + b.pixel_area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

Vec2 bbox_center(const BBox& b) {
    return Vec2{b.x + b.w / 2.0, b.y + b.h / 2.0};
}

}  // namespace teamtrack
