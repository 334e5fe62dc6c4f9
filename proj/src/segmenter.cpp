#include "teamtrack/segmenter.hpp"

#include <algorithm>

namespace teamtrack {

namespace {

// Bounding region of set pixels expanded by pad, clipped to the mask; lets the
// morphology loops skip the untouched background.
struct Region {
    int x0, y0, x1, y1;
    bool empty() const { return x1 < x0; }
};

Region padded_region(const Mask& m, int pad) {
    int min_x = m.width, min_y = m.height, max_x = -1, max_y = -1;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.test(x, y)) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    if (max_x < 0) return Region{0, 0, -1, -1};
    return Region{std::max(0, min_x - pad), std::max(0, min_y - pad),
                  std::min(m.width - 1, max_x + pad), std::min(m.height - 1, max_y + pad)};
}

}  // namespace

Mask erode(const Mask& mask, int radius) {
    if (radius <= 0) return mask;
    Mask out(mask.width, mask.height);
    const Region r = padded_region(mask, 0);
    if (r.empty()) return out;
    for (int y = r.y0; y <= r.y1; ++y) {
        for (int x = r.x0; x <= r.x1; ++x) {
            if (!mask.test(x, y)) continue;
            bool keep = true;
            for (int dy = -radius; keep && dy <= radius; ++dy) {
                const int ny = y + dy;
                if (ny < 0 || ny >= mask.height) {
                    keep = false;
                    break;
                }
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int nx = x + dx;
                    if (nx < 0 || nx >= mask.width || !mask.test(nx, ny)) {
                        keep = false;
                        break;
                    }
                }
            }
            if (keep) out.set(x, y);
        }
    }
    return out;
}

Mask dilate(const Mask& mask, int radius) {
    if (radius <= 0) return mask;
    Mask out(mask.width, mask.height);
    const Region r = padded_region(mask, radius);
    if (r.empty()) return out;
    for (int y = r.y0; y <= r.y1; ++y) {
        for (int x = r.x0; x <= r.x1; ++x) {
            bool hit = false;
            for (int dy = -radius; !hit && dy <= radius; ++dy) {
                const int ny = y + dy;
                if (ny < 0 || ny >= mask.height) continue;
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int nx = x + dx;
                    if (nx >= 0 && nx < mask.width && mask.test(nx, ny)) {
                        hit = true;
                        break;
                    }
                }
            }
            if (hit) out.set(x, y);
        }
    }
    return out;
}

OracleSegmenter::OracleSegmenter(const GroundTruth& gt, int perturbation_radius)
    : gt_(gt), radius_(perturbation_radius) {
    if (radius_ < 0)
        throw Error(ErrorKind::InvalidArgument, "perturbation radius must be >= 0");
}

std::array<MaskCandidate, 3> OracleSegmenter::segment(const Frame& frame, int frame_idx,
                                                      const PointPrompt& point) const {
    if (!frame.contains(point.x, point.y))
        throw Error(ErrorKind::OutOfBounds, "segment: prompt (" + std::to_string(point.x) +
                                                "," + std::to_string(point.y) +
                                                ") outside frame");
    if (frame_idx < 0 || frame_idx >= gt_.frame_count)
        throw Error(ErrorKind::OutOfBounds, "segment: frame index outside ground truth");

    std::array<MaskCandidate, 3> out;
    const auto hit = gt_.resolve_point(frame_idx, point.x, point.y);
    if (!hit) {
        for (auto& c : out) c.mask = Mask(frame.width, frame.height);
        return out;  // background: three empty masks, score 0
    }
    Mask exact = gt_.silhouette(frame_idx, *hit, frame.width, frame.height);
    out[0] = MaskCandidate{exact, 0.95};
    out[1] = MaskCandidate{erode(exact, radius_), 0.60};
    out[2] = MaskCandidate{dilate(exact, radius_), 0.40};
    return out;
}

const MaskCandidate& select_best(const std::array<MaskCandidate, 3>& candidates) {
    bool all_empty = true;
    for (const auto& c : candidates)
        if (!c.mask.empty()) {
            all_empty = false;
            break;
        }
    if (all_empty)
        throw Error(ErrorKind::NoMask, "select_best: all candidate masks are empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].score > candidates[best].score) best = i;
    return candidates[best];
}

std::unique_ptr<Segmenter> make_segmenter(const SegmenterConfig& cfg, const GroundTruth* gt) {
    if (cfg.implementation == "oracle") {
        if (!gt)
            throw Error(ErrorKind::InvalidArgument,
                        "oracle segmenter requires ground truth (gt.jsonl)");
        return std::make_unique<OracleSegmenter>(*gt, cfg.perturbation_radius);
    }
    throw Error(ErrorKind::InvalidArgument,
                "unknown segmenter implementation '" + cfg.implementation + "'");
}

}  // namespace teamtrack
