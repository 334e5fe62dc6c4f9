#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "teamtrack/geometry.hpp"
#include "teamtrack/image_io.hpp"

namespace teamtrack {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

struct Waypoint {
    int frame = 0;
    double x = 0.0;
    double y = 0.0;
};

// Players render as axis-aligned two-tone rectangles: top 60% jersey color,
// bottom 40% shorts color, with a 4x4 checker luminance texture so the
// correlation tracker has gradient content. Higher depth occludes lower.
struct PlayerSpec {
    int id = 0;
    TeamLabel team = TeamLabel::Team1;
    Rgb jersey;
    Rgb shorts;
    int body_w = 16;
    int body_h = 32;
    int depth = 0;
    std::vector<Waypoint> trajectory;  // strictly increasing frames, linear interpolation
};

struct ScenarioSpec {
    std::string name;
    int frame_count = 0;
    int width = 0;
    int height = 0;
    double fps = 25.0;
    Rgb field{68, 128, 72};
    std::vector<PlayerSpec> players;
};

// Per-frame, per-player annotation. bbox covers the frame-clipped silhouette
// before occlusion accounting; visible is unoccluded in-frame silhouette
// pixels over the player's full body area.
struct PlayerGt {
    TeamLabel team = TeamLabel::Team1;
    BBox bbox;
    double visible = 0.0;
    bool on_screen = false;
};

struct GroundTruth {
    int frame_count = 0;
    int player_count = 0;
    std::vector<std::vector<PlayerGt>> per_frame;  // [frame][player]

    const PlayerGt& at(int frame, int player) const {
        return per_frame[frame][player];
    }

    // Frame-sized silhouette rebuilt from the clipped bbox (players are
    // rectangles, so the bbox is the full silhouette reference).
    Mask silhouette(int frame, int player, int width, int height) const;

    // Player whose silhouette contains the point; overlaps resolve to the
    // highest visible fraction (the player actually seen there), ties to the
    // lowest id. Returns nothing for background points.
    std::optional<int> resolve_point(int frame, int x, int y) const;
};

struct RenderedFrame {
    Frame frame;
    std::vector<PlayerGt> gt;
};

// Deterministic rasterization of one frame plus its exact ground truth.
RenderedFrame render_frame(const ScenarioSpec& spec, int frame_idx);

// Writes frame_%06d.ppm, seq.json, gt.jsonl and scenario.json into out_dir.
// Byte-identical across reruns for the same spec.
GroundTruth generate(const ScenarioSpec& spec, const std::filesystem::path& out_dir);

// Built-in presets: light, heavy, longterm.
ScenarioSpec scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

void save_scenario_spec(const ScenarioSpec& spec, const std::filesystem::path& path);
ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
void validate_scenario_spec(const ScenarioSpec& spec);

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);

// Interpolated, integer-rounded body center at a frame.
Vec2 player_center_at(const PlayerSpec& player, int frame_idx);

}  // namespace teamtrack
