#pragma once

#include <map>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "teamtrack/pipeline.hpp"
#include "teamtrack/scenario.hpp"

namespace teamtrack {

struct FpsStats {
    double mean_frame_ms = 0.0;
    double min_frame_ms = 0.0;
    double max_frame_ms = 0.0;
    double average_fps = 0.0;  // 1000 / mean_frame_ms
};

struct OcclusionTallies {
    int total = 0;      // occlusion periods entered
    int recovered = 0;  // periods closed by a successful recovery
    int failed = 0;     // periods with attempts that never recovered
};

struct OffScreenTallies {
    int total = 0;
    int reacquired = 0;
    int failed = 0;
    std::optional<double> avg_duration;  // frames absent per ground truth
};

struct EvalReport {
    std::map<PlayerId, double> tsr_per_player;
    double tsr_aggregate = 0.0;
    std::optional<double> mean_iou;
    std::optional<double> bbox_stability;
    double fragmentation = 0.0;
    double occlusion_frame_ratio = 0.0;
    int identity_switches = 0;
    std::optional<double> orr;
    std::optional<double> avg_recovery_time;
    double persistence = 0.0;
    double normalized_persistence = 0.0;
    double robustness_score = 0.0;
    FpsStats fps;
    OcclusionTallies occlusion_events;
    OffScreenTallies off_screen_events;
};

// Tracked means status Active with IoU >= 0.3 against the player's own
// annotation; the denominator counts only on-screen ground-truth frames.
// Players never on screen are excluded. Returns per-player percentages and
// their mean.
std::map<PlayerId, double> tsr_per_player(const TrackLog& log, const GroundTruth& gt);
double tsr(const TrackLog& log, const GroundTruth& gt);

// Mean min/max area ratio over consecutive Active frame pairs; empty when no
// pair exists.
std::optional<double> bbox_stability(const TrackLog& log);

// Mean count of maximal contiguous Active segments per player (1.0 means
// uninterrupted everywhere).
double fragmentation(const TrackLog& log);

// Percent of frames where any on-screen player has visible fraction < 0.7.
double occlusion_frame_ratio(const TrackLog& log, const GroundTruth& gt);

// A switch is a change in the ground-truth identity best matched by a
// player's boxes (IoU >= 0.3 required to match; unmatched frames keep the
// previous match).
int identity_switches(const TrackLog& log, const GroundTruth& gt);

struct RecoveryStats {
    std::optional<double> orr;
    std::optional<double> avg_recovery_time;
    OcclusionTallies occlusion;
    OffScreenTallies off_screen;  // avg_duration filled by evaluate()
};

// Pairs start events with their closing successes per player. ORR counts only
// recovery-requiring periods: successes over successes plus terminal failures.
RecoveryStats occlusion_recovery(const std::vector<PipelineEvent>& events);

// Mean maximal Active segment length in frames; normalized by run length.
double persistence(const TrackLog& log);

// 40% recovery rate + 30% normalized persistence + 30% identity consistency,
// with a null ORR entering as zero and consistency = max(0, 1 - switches/players).
double robustness_score(std::optional<double> orr, double normalized_persistence,
                        int switches, int player_count);

// Wall-clock stats; memory fields are reported as null in the serialized form.
FpsStats perf_stats(const TrackLog& log);

EvalReport evaluate(const TrackLog& log, const GroundTruth& gt);

nlohmann::ordered_json report_to_json(const EvalReport& report);

// Table layout mirroring the published row structure.
std::string render_report_table(const EvalReport& report);

}  // namespace teamtrack
