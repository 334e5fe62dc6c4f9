#pragma once

#include <filesystem>
#include <vector>

#include "teamtrack/geometry.hpp"

namespace teamtrack {

// Ordered frame sequence loaded from frame_%06d.ppm files plus seq.json metadata.
struct FrameSequence {
    std::filesystem::path directory;
    std::vector<Frame> frames;
    double fps = 25.0;

    int width() const { return frames.empty() ? 0 : frames.front().width; }
    int height() const { return frames.empty() ? 0 : frames.front().height; }
    int frame_count() const { return static_cast<int>(frames.size()); }
};

// Binary P6, maxval 255. Round-trips bit-exactly with load_ppm.
void save_ppm(const Frame& frame, const std::filesystem::path& path);
Frame load_ppm(const std::filesystem::path& path);

// Loads frame_000000.ppm .. frame_%06d.ppm in index order. Gaps in the
// numbering raise NonContiguous; an empty directory raises EmptySequence.
FrameSequence load_frame_sequence(const std::filesystem::path& dir);

std::string frame_file_name(int index);

}  // namespace teamtrack
