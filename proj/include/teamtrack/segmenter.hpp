#pragma once

#include <array>
#include <memory>
#include <string>

#include "teamtrack/geometry.hpp"
#include "teamtrack/scenario.hpp"

namespace teamtrack {

struct MaskCandidate {
    Mask mask;
    double score = 0.0;
};

struct SegmenterConfig {
    std::string implementation = "oracle";
    int perturbation_radius = 2;  // erosion/dilation radius for oracle variants
};

// Point-prompt segmentation: three scored mask candidates per query.
class Segmenter {
public:
    virtual ~Segmenter() = default;
    virtual std::array<MaskCandidate, 3> segment(const Frame& frame, int frame_idx,
                                                 const PointPrompt& point) const = 0;
};

// Answers prompts from scenario ground truth. A point inside a player
// silhouette yields the exact mask (0.95), an eroded variant (0.60) and a
// dilated variant (0.40); background points yield three empty zero-score masks.
class OracleSegmenter : public Segmenter {
public:
    OracleSegmenter(const GroundTruth& gt, int perturbation_radius);

    std::array<MaskCandidate, 3> segment(const Frame& frame, int frame_idx,
                                         const PointPrompt& point) const override;

private:
    const GroundTruth& gt_;
    int radius_;
};

// Argmax by score, ties to the lowest index. Throws NoMask when every
// candidate mask is empty (failed segmentation).
const MaskCandidate& select_best(const std::array<MaskCandidate, 3>& candidates);

// Morphology with a square structuring element; pixels outside the mask
// bounds count as unset.
Mask erode(const Mask& mask, int radius);
Mask dilate(const Mask& mask, int radius);

std::unique_ptr<Segmenter> make_segmenter(const SegmenterConfig& cfg, const GroundTruth* gt);

}  // namespace teamtrack
