#include "teamtrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "teamtrack/util.hpp"

namespace teamtrack {

std::string track_status_name(TrackStatus s) {
    switch (s) {
        case TrackStatus::Active: return "active";
        case TrackStatus::Lost: return "lost";
        case TrackStatus::OffScreen: return "off_screen";
    }
    return "active";
}

TrackStatus parse_track_status(const std::string& name) {
    if (name == "active") return TrackStatus::Active;
    if (name == "lost") return TrackStatus::Lost;
    if (name == "off_screen") return TrackStatus::OffScreen;
    throw Error(ErrorKind::SchemaMismatch, "unknown track status: " + name);
}

std::string event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::OcclusionStart: return "occlusion_start";
        case EventKind::OcclusionEnd: return "occlusion_end";
        case EventKind::RecoveryAttempt: return "recovery_attempt";
        case EventKind::RecoverySuccess: return "recovery_success";
        case EventKind::RecoveryFailure: return "recovery_failure";
        case EventKind::OffScreenStart: return "off_screen_start";
        case EventKind::ReacquisitionFailure: return "reacquisition_failure";
    }
    return "occlusion_start";
}

EventKind parse_event_kind(const std::string& name) {
    if (name == "occlusion_start") return EventKind::OcclusionStart;
    if (name == "occlusion_end") return EventKind::OcclusionEnd;
    if (name == "recovery_attempt") return EventKind::RecoveryAttempt;
    if (name == "recovery_success") return EventKind::RecoverySuccess;
    if (name == "recovery_failure") return EventKind::RecoveryFailure;
    if (name == "off_screen_start") return EventKind::OffScreenStart;
    if (name == "reacquisition_failure") return EventKind::ReacquisitionFailure;
    throw Error(ErrorKind::SchemaMismatch, "unknown event kind: " + name);
}

namespace {

void push_history(PlayerTrack& track, int frame, const Vec2& center, std::size_t cap) {
    if (track.history.size() == cap) track.history.pop_front();
    track.history.push_back(PositionEntry{frame, center});
}

// True when the last reliable position sits within one body length of a frame
// edge and the velocity points out through that edge.
bool boundary_exit(const PlayerTrack& track, int frame_w, int frame_h) {
    if (!track.last_bbox) return false;
    bool has_history = false;
    const Vec2 v = estimate_velocity(track, &has_history);
    if (!has_history) return false;
    const Vec2 c = bbox_center(*track.last_bbox);
    const double body =
        std::max(track.last_bbox->w + 1.0, track.last_bbox->h + 1.0);
    constexpr double kMinOutwardSpeed = 0.25;  // px/frame
    if (c.x < body && v.x < -kMinOutwardSpeed) return true;
    if (frame_w - 1 - c.x < body && v.x > kMinOutwardSpeed) return true;
    if (c.y < body && v.y < -kMinOutwardSpeed) return true;
    if (frame_h - 1 - c.y < body && v.y > kMinOutwardSpeed) return true;
    return false;
}

struct CandidateMatch {
    double similarity = -1.0;
    Mask mask;
    AppearanceVector appearance;
};

// Core of the recovery procedure; mutates the track on success but emits no
// events (both the gated occlusion path and the per-frame off-screen path
// share it).
RecoveryOutcome try_recover(PlayerTrack& track, const Frame& frame, int frame_idx,
                            const Segmenter& segmenter, const PipelineConfig& cfg) {
    RecoveryOutcome outcome;
    if (!track.last_bbox || track.appearance.empty()) return outcome;

    const int elapsed = frame_idx - track.status_since;
    const Vec2 predicted = predict_position(track, elapsed, frame.width, frame.height);
    const AppearanceVector model = window_mean(track.appearance);

    CandidateMatch best;
    const double step_x = cfg.recovery.grid_spacing * track.last_bbox->w;
    const double step_y = cfg.recovery.grid_spacing * track.last_bbox->h;
    for (int gy = -1; gy <= 1; ++gy) {
        for (int gx = -1; gx <= 1; ++gx) {
            const int px = static_cast<int>(std::lround(predicted.x + gx * step_x));
            const int py = static_cast<int>(std::lround(predicted.y + gy * step_y));
            if (!frame.contains(px, py)) continue;
            const auto cands = segmenter.segment(frame, frame_idx, PointPrompt{px, py, track.team});
            const MaskCandidate* cand = nullptr;
            try {
                cand = &select_best(cands);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::NoMask) continue;
                throw;
            }
            const AppearanceVector a = compute_appearance(frame, jersey_mask(cand->mask));
            const double sim = similarity(a, model);
            if (sim > best.similarity) {
                best.similarity = sim;
                best.mask = cand->mask;
                best.appearance = a;
            }
        }
    }

    outcome.best_similarity = std::max(best.similarity, 0.0);
    if (best.similarity <= cfg.recovery.similarity_threshold) return outcome;

    const BBox box = bbox_from_mask(best.mask);
    // a heavily clipped candidate (a sliver at the frame edge) cannot seed a
    // usable filter; wait until at least half the body is back
    if (box.pixel_area() * 2 < track.last_bbox->pixel_area()) return outcome;
    try {
        track.tracker->reinit(frame, box);
    } catch (const Error&) {
        return outcome;  // candidate too small to track yet
    }
    track.appearance.push(best.appearance);
    push_history(track, frame_idx, bbox_center(box), cfg.history_size);
    track.status = TrackStatus::Active;
    track.status_since = frame_idx;
    track.last_bbox = box;
    track.last_confidence = 1.0;
    outcome.recovered = true;
    outcome.bbox = box;
    return outcome;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

InitResult initialize(const Frame& frame, const std::vector<PointPrompt>& prompts,
                      const Segmenter& segmenter, const PipelineConfig& cfg) {
    if (prompts.empty())
        throw Error(ErrorKind::InvalidArgument, "initialize: at least one prompt required");

    InitResult result;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        const PointPrompt& prompt = prompts[i];
        if (!frame.contains(prompt.x, prompt.y))
            throw Error(ErrorKind::OutOfBounds,
                        "initialize: prompt " + std::to_string(i) + " outside frame");
        try {
            const auto cands = segmenter.segment(frame, 0, prompt);
            const MaskCandidate& best = select_best(cands);
            const BBox box = bbox_from_mask(best.mask);
            const AppearanceVector a = compute_appearance(frame, jersey_mask(best.mask));

            PlayerTrack track;
            track.id = static_cast<PlayerId>(i);
            track.team = prompt.team;
            track.tracker = std::make_unique<CorrelationTracker>(frame, box, cfg.tracker);
            track.appearance = AppearanceWindow(cfg.appearance_window);
            track.appearance.push(a);
            push_history(track, 0, bbox_center(box), cfg.history_size);
            track.status = TrackStatus::Active;
            track.status_since = 0;
            track.last_bbox = box;
            track.last_confidence = 1.0;
            result.tracks.push_back(std::move(track));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NoMask || e.kind() == ErrorKind::EmptyMask ||
                e.kind() == ErrorKind::InvalidArgument) {
                result.rejected.push_back(RejectedPrompt{static_cast<int>(i), e.what()});
                continue;
            }
            throw;
        }
    }
    return result;
}

bool detect_lost(const PlayerTrack& track, const TrackerOutput& out,
                 const OcclusionThresholds& th) {
    if (out.confidence < th.confidence) return true;
    if (!track.last_bbox) return false;
    const BBox& prev = *track.last_bbox;
    const double area_ratio =
        static_cast<double>(out.bbox.pixel_area()) / static_cast<double>(prev.pixel_area());
    if (std::abs(area_ratio - 1.0) > th.area_change) return true;
    const Vec2 pc = bbox_center(prev);
    const Vec2 cc = bbox_center(out.bbox);
    const double diag = std::hypot(prev.w + 1.0, prev.h + 1.0);
    const double displacement = std::hypot(cc.x - pc.x, cc.y - pc.y);
    if (diag > 0.0 && displacement / diag > th.position_change) return true;
    return false;
}

Vec2 estimate_velocity(const PlayerTrack& track, bool* has_history) {
    if (track.history.size() < 2) {
        if (has_history) *has_history = false;
        return Vec2{0.0, 0.0};
    }
    if (has_history) *has_history = true;
    const PositionEntry& first = track.history.front();
    const PositionEntry& last = track.history.back();
    const double span = last.frame - first.frame;
    if (span <= 0.0) {
        if (has_history) *has_history = false;
        return Vec2{0.0, 0.0};
    }
    return Vec2{(last.center.x - first.center.x) / span,
                (last.center.y - first.center.y) / span};
}

Vec2 predict_position(const PlayerTrack& track, int elapsed, int frame_w, int frame_h) {
    if (track.history.empty())
        throw Error(ErrorKind::InvalidArgument, "predict_position: empty position history");
    const Vec2 v = estimate_velocity(track);
    const Vec2 last = track.history.back().center;
    Vec2 p{last.x + v.x * elapsed, last.y + v.y * elapsed};
    p.x = std::clamp(p.x, 0.0, frame_w - 1.0);
    p.y = std::clamp(p.y, 0.0, frame_h - 1.0);
    return p;
}

RecoveryOutcome attempt_recovery(PlayerTrack& track, const Frame& frame, int frame_idx,
                                 const Segmenter& segmenter, const PipelineConfig& cfg,
                                 std::vector<PipelineEvent>& events) {
    const RecoveryOutcome outcome = try_recover(track, frame, frame_idx, segmenter, cfg);
    if (outcome.recovered) {
        events.push_back(PipelineEvent{EventKind::RecoverySuccess, track.id, frame_idx,
                                       "similarity " + format_double(outcome.best_similarity)});
    } else {
        events.push_back(PipelineEvent{EventKind::RecoveryFailure, track.id, frame_idx,
                                       "best similarity " + format_double(outcome.best_similarity)});
    }
    return outcome;
}

void step_frame(std::vector<PlayerTrack>& tracks, const Frame& frame, int frame_idx,
                const Segmenter& segmenter, const PipelineConfig& cfg,
                std::vector<TrackRecord>& records, std::vector<PipelineEvent>& events) {
    // tracker updates are independent across players; events and records stay
    // serialized in ascending id order below
    std::vector<std::optional<TrackerOutput>> outputs(tracks.size());
    std::vector<int> active;
    for (std::size_t i = 0; i < tracks.size(); ++i)
        if (tracks[i].status == TrackStatus::Active) active.push_back(static_cast<int>(i));
    parallel_for(static_cast<int>(active.size()), [&](int k) {
        const int i = active[k];
        outputs[i] = tracks[i].tracker->update(frame);
    });

    for (auto& track : tracks) {
        switch (track.status) {
            case TrackStatus::Active: {
                const TrackerOutput& out = *outputs[&track - tracks.data()];
                bool off = out.raw_center.x < 0.0 || out.raw_center.x > frame.width - 1.0 ||
                           out.raw_center.y < 0.0 || out.raw_center.y > frame.height - 1.0;
                bool lost = false;
                if (!off) {
                    lost = detect_lost(track, out, cfg.thresholds);
                    if (lost && boundary_exit(track, frame.width, frame.height)) off = true;
                }
                if (off) {
                    track.status = TrackStatus::OffScreen;
                    track.status_since = frame_idx;
                    events.push_back(PipelineEvent{EventKind::OffScreenStart, track.id, frame_idx,
                                                   "confidence " + format_double(out.confidence)});
                    records.push_back(TrackRecord{frame_idx, track.id, track.team,
                                                  TrackStatus::OffScreen, std::nullopt,
                                                  out.confidence});
                } else if (lost) {
                    track.status = TrackStatus::Lost;
                    track.status_since = frame_idx;
                    events.push_back(PipelineEvent{EventKind::OcclusionStart, track.id, frame_idx,
                                                   "confidence " + format_double(out.confidence)});
                    records.push_back(TrackRecord{frame_idx, track.id, track.team,
                                                  TrackStatus::Lost, std::nullopt,
                                                  out.confidence});
                } else {
                    records.push_back(TrackRecord{frame_idx, track.id, track.team,
                                                  TrackStatus::Active, out.bbox, out.confidence});
                    track.appearance.push(appearance_from_bbox(frame, out.bbox));
                    push_history(track, frame_idx, bbox_center(out.bbox), cfg.history_size);
                    track.last_bbox = out.bbox;
                    track.last_confidence = out.confidence;
                }
                break;
            }
            case TrackStatus::Lost: {
                const int duration = frame_idx - track.status_since;
                bool recovered = false;
                if (duration >= cfg.recovery.loss_frames &&
                    duration % cfg.recovery.interval == 0) {
                    events.push_back(PipelineEvent{EventKind::RecoveryAttempt, track.id, frame_idx,
                                                   "lost for " + std::to_string(duration) +
                                                       " frames"});
                    const RecoveryOutcome outcome =
                        attempt_recovery(track, frame, frame_idx, segmenter, cfg, events);
                    if (outcome.recovered) {
                        events.push_back(PipelineEvent{EventKind::OcclusionEnd, track.id,
                                                       frame_idx, ""});
                        records.push_back(TrackRecord{frame_idx, track.id, track.team,
                                                      TrackStatus::Active, outcome.bbox, 1.0});
                        recovered = true;
                    }
                }
                if (!recovered)
                    records.push_back(TrackRecord{frame_idx, track.id, track.team,
                                                  TrackStatus::Lost, std::nullopt, 0.0});
                break;
            }
            case TrackStatus::OffScreen: {
                // after the loss threshold, boundary re-entry is a cheap
                // localized probe, so it runs every frame rather than on the
                // occlusion cadence
                const int duration = frame_idx - track.status_since;
                RecoveryOutcome outcome;
                if (duration >= cfg.recovery.loss_frames)
                    outcome = try_recover(track, frame, frame_idx, segmenter, cfg);
                if (outcome.recovered) {
                    events.push_back(PipelineEvent{
                        EventKind::RecoverySuccess, track.id, frame_idx,
                        "re-acquired after off-screen, similarity " +
                            format_double(outcome.best_similarity)});
                    records.push_back(TrackRecord{frame_idx, track.id, track.team,
                                                  TrackStatus::Active, outcome.bbox, 1.0});
                } else {
                    records.push_back(TrackRecord{frame_idx, track.id, track.team,
                                                  TrackStatus::OffScreen, std::nullopt, 0.0});
                }
                break;
            }
        }
    }
}

TrackLog run(const FrameSequence& sequence, const std::vector<PointPrompt>& prompts,
             const Segmenter& segmenter, const PipelineConfig& cfg) {
    using clock = std::chrono::steady_clock;
    if (sequence.frames.empty())
        throw Error(ErrorKind::EmptySequence, "run: empty frame sequence");

    TrackLog log;
    log.frame_count = sequence.frame_count();

    const auto t0 = clock::now();
    InitResult init = initialize(sequence.frames.front(), prompts, segmenter, cfg);
    log.rejected_prompts = init.rejected;
    std::vector<PlayerTrack>& tracks = init.tracks;
    for (const auto& track : tracks)
        log.records.push_back(TrackRecord{0, track.id, track.team, TrackStatus::Active,
                                          track.last_bbox, 1.0});
    log.frame_ms.push_back(
        std::chrono::duration<double, std::milli>(clock::now() - t0).count());

    for (int f = 1; f < sequence.frame_count(); ++f) {
        const auto t = clock::now();
        step_frame(tracks, sequence.frames[f], f, segmenter, cfg, log.records, log.events);
        log.frame_ms.push_back(
            std::chrono::duration<double, std::milli>(clock::now() - t).count());
    }

    for (const auto& track : tracks)
        if (track.status == TrackStatus::OffScreen)
            log.events.push_back(PipelineEvent{EventKind::ReacquisitionFailure, track.id,
                                               sequence.frame_count() - 1,
                                               "not re-acquired by end of run"});
    return log;
}

}  // namespace teamtrack
