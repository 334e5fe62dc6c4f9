#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "teamtrack/appearance.hpp"
#include "teamtrack/geometry.hpp"
#include "teamtrack/image_io.hpp"
#include "teamtrack/segmenter.hpp"
#include "teamtrack/tracker.hpp"

namespace teamtrack {

enum class TrackStatus { Active, Lost, OffScreen };

std::string track_status_name(TrackStatus s);
TrackStatus parse_track_status(const std::string& name);

// Loss indicators: confidence below tau_c, relative area change above tau_a,
// or center displacement above tau_p bbox diagonals.
struct OcclusionThresholds {
    double confidence = 0.3;
    double area_change = 0.5;
    double position_change = 1.0;
};

struct RecoveryConfig {
    int loss_frames = 10;          // frames lost before recovery may start
    int interval = 10;             // recovery attempt cadence while lost
    double similarity_threshold = 0.6;
    double grid_spacing = 0.5;     // sample spacing as a fraction of bbox w/h
};

struct PipelineConfig {
    OcclusionThresholds thresholds;
    RecoveryConfig recovery;
    TrackerConfig tracker;
    std::size_t appearance_window = 10;
    std::size_t history_size = 5;
};

enum class EventKind {
    OcclusionStart,
    OcclusionEnd,
    RecoveryAttempt,
    RecoverySuccess,
    RecoveryFailure,
    OffScreenStart,
    ReacquisitionFailure,
};

std::string event_kind_name(EventKind k);
EventKind parse_event_kind(const std::string& name);

struct PipelineEvent {
    EventKind kind;
    PlayerId player = 0;
    int frame = 0;
    std::string detail;
};

struct TrackRecord {
    int frame = 0;
    PlayerId player = 0;
    TeamLabel team = TeamLabel::Team1;
    TrackStatus status = TrackStatus::Active;
    std::optional<BBox> bbox;  // absent while Lost or OffScreen
    double confidence = 0.0;
};

struct PositionEntry {
    int frame = 0;
    Vec2 center;
};

// Per-player state machine: tracker, appearance window, position history,
// status and the records it has produced so far.
struct PlayerTrack {
    PlayerId id = 0;
    TeamLabel team = TeamLabel::Team1;
    std::unique_ptr<CorrelationTracker> tracker;
    AppearanceWindow appearance{10};
    std::deque<PositionEntry> history;  // up to history_size entries
    TrackStatus status = TrackStatus::Active;
    int status_since = 0;
    std::optional<BBox> last_bbox;
    double last_confidence = 0.0;
};

struct RejectedPrompt {
    int index = 0;
    std::string reason;
};

struct TrackLog {
    std::string scenario;
    std::uint64_t config_hash = 0;
    int frame_count = 0;
    std::vector<double> frame_ms;  // wall clock per frame, index 0 is initialization
    std::vector<TrackRecord> records;
    std::vector<PipelineEvent> events;
    std::vector<RejectedPrompt> rejected_prompts;
};

struct InitResult {
    std::vector<PlayerTrack> tracks;
    std::vector<RejectedPrompt> rejected;
};

// Per prompt: segment -> best mask -> bbox -> jersey appearance -> tracker.
// Prompts that segment to nothing (or produce untrackable boxes) are rejected
// individually; ids follow prompt order.
InitResult initialize(const Frame& frame, const std::vector<PointPrompt>& prompts,
                      const Segmenter& segmenter, const PipelineConfig& cfg);

bool detect_lost(const PlayerTrack& track, const TrackerOutput& out,
                 const OcclusionThresholds& th);

// Mean per-frame displacement over the stored history; (0,0) with
// has_history=false when fewer than two entries exist.
Vec2 estimate_velocity(const PlayerTrack& track, bool* has_history = nullptr);

// Last center plus velocity * elapsed, clamped to frame bounds.
Vec2 predict_position(const PlayerTrack& track, int elapsed, int frame_w, int frame_h);

struct RecoveryOutcome {
    bool recovered = false;
    BBox bbox;
    double best_similarity = 0.0;
};

// 3x3 grid around the predicted position; candidates are accepted when the
// jersey appearance clears the similarity threshold against the window mean.
RecoveryOutcome attempt_recovery(PlayerTrack& track, const Frame& frame, int frame_idx,
                                 const Segmenter& segmenter, const PipelineConfig& cfg,
                                 std::vector<PipelineEvent>& events);

// One tracking step across all players in ascending id order.
void step_frame(std::vector<PlayerTrack>& tracks, const Frame& frame, int frame_idx,
                const Segmenter& segmenter, const PipelineConfig& cfg,
                std::vector<TrackRecord>& records, std::vector<PipelineEvent>& events);

// Initialize on frame 0, then step through the rest. Timings land in
// frame_ms; everything else is deterministic for identical inputs.
TrackLog run(const FrameSequence& sequence, const std::vector<PointPrompt>& prompts,
             const Segmenter& segmenter, const PipelineConfig& cfg);

}  // namespace teamtrack
