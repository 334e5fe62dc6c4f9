#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "teamtrack/pipeline.hpp"
#include "teamtrack/segmenter.hpp"

namespace teamtrack {

// Declarative run description: where the sequence lives, the first-frame
// prompts, and every tunable with its published default. Unknown keys are
// rejected so typos cannot silently fall back to defaults.
struct RunConfig {
    std::string scenario;  // sequence directory or preset name
    std::vector<PointPrompt> prompts;
    PipelineConfig pipeline;
    SegmenterConfig segmenter;
    std::filesystem::path output_dir = ".";
    unsigned seed = 0;  // reserved

    std::string canonical_json() const;
    std::uint64_t hash() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

}  // namespace teamtrack
