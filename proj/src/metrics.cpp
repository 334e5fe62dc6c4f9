#include "teamtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace teamtrack {

namespace {

constexpr double kTrackedIouThreshold = 0.3;
constexpr double kOcclusionVisibility = 0.7;

// records grouped per player, frame-ordered
std::map<PlayerId, std::vector<const TrackRecord*>> by_player(const TrackLog& log) {
    std::map<PlayerId, std::vector<const TrackRecord*>> out;
    for (const auto& r : log.records) out[r.player].push_back(&r);
    for (auto& [id, recs] : out)
        std::sort(recs.begin(), recs.end(),
                  [](const TrackRecord* a, const TrackRecord* b) { return a->frame < b->frame; });
    return out;
}

void check_consistency(const TrackLog& log, const GroundTruth& gt) {
    if (log.records.empty())
        throw Error(ErrorKind::InvalidArgument, "evaluate: empty track log");
    int max_frame = 0;
    for (const auto& r : log.records) {
        max_frame = std::max(max_frame, r.frame);
        if (r.frame < 0 || r.frame >= gt.frame_count)
            throw Error(ErrorKind::SchemaMismatch,
                        "log frame " + std::to_string(r.frame) + " outside ground truth range");
        if (r.player < 0 || r.player >= gt.player_count)
            throw Error(ErrorKind::SchemaMismatch,
                        "log player " + std::to_string(r.player) + " not present in ground truth");
    }
    if (log.frame_count != gt.frame_count || max_frame + 1 != gt.frame_count)
        throw Error(ErrorKind::SchemaMismatch,
                    "log covers " + std::to_string(max_frame + 1) + " frames but ground truth has " +
                        std::to_string(gt.frame_count));
}

std::vector<int> active_segment_lengths(const std::vector<const TrackRecord*>& recs) {
    std::vector<int> lengths;
    int run = 0;
    for (const auto* r : recs) {
        if (r->status == TrackStatus::Active) {
            ++run;
        } else if (run > 0) {
            lengths.push_back(run);
            run = 0;
        }
    }
    if (run > 0) lengths.push_back(run);
    return lengths;
}

}  // namespace

std::map<PlayerId, double> tsr_per_player(const TrackLog& log, const GroundTruth& gt) {
    check_consistency(log, gt);
    std::map<PlayerId, double> out;
    for (const auto& [id, recs] : by_player(log)) {
        long long on_screen = 0, tracked = 0;
        for (const auto* r : recs) {
            const PlayerGt& g = gt.at(r->frame, id);
            if (!g.on_screen) continue;
            ++on_screen;
            if (r->status == TrackStatus::Active && r->bbox &&
                iou(*r->bbox, g.bbox) >= kTrackedIouThreshold)
                ++tracked;
        }
        if (on_screen == 0) continue;  // never on screen: excluded
        out[id] = 100.0 * static_cast<double>(tracked) / static_cast<double>(on_screen);
    }
    return out;
}

double tsr(const TrackLog& log, const GroundTruth& gt) {
    const auto per_player = tsr_per_player(log, gt);
    if (per_player.empty())
        throw Error(ErrorKind::InvalidArgument, "tsr: no player visible in ground truth");
    double sum = 0.0;
    for (const auto& [id, value] : per_player) sum += value;
    return sum / static_cast<double>(per_player.size());
}

std::optional<double> bbox_stability(const TrackLog& log) {
    double sum = 0.0;
    long long pairs = 0;
    for (const auto& [id, recs] : by_player(log)) {
        for (std::size_t i = 1; i < recs.size(); ++i) {
            const TrackRecord* prev = recs[i - 1];
            const TrackRecord* cur = recs[i];
            if (cur->frame != prev->frame + 1) continue;
            if (prev->status != TrackStatus::Active || cur->status != TrackStatus::Active)
                continue;
            if (!prev->bbox || !cur->bbox) continue;
            const double a = static_cast<double>(prev->bbox->pixel_area());
            const double b = static_cast<double>(cur->bbox->pixel_area());
            sum += std::min(a, b) / std::max(a, b);
            ++pairs;
        }
    }
    if (pairs == 0) return std::nullopt;
    return sum / static_cast<double>(pairs);
}

double fragmentation(const TrackLog& log) {
    const auto players = by_player(log);
    if (players.empty())
        throw Error(ErrorKind::InvalidArgument, "fragmentation: empty track log");
    double sum = 0.0;
    for (const auto& [id, recs] : players)
        sum += static_cast<double>(active_segment_lengths(recs).size());
    return sum / static_cast<double>(players.size());
}

double occlusion_frame_ratio(const TrackLog& log, const GroundTruth& gt) {
    check_consistency(log, gt);
    long long occluded = 0;
    for (int f = 0; f < gt.frame_count; ++f) {
        for (int p = 0; p < gt.player_count; ++p) {
            const PlayerGt& g = gt.at(f, p);
            if (g.on_screen && g.visible < kOcclusionVisibility) {
                ++occluded;
                break;
            }
        }
    }
    return 100.0 * static_cast<double>(occluded) / static_cast<double>(gt.frame_count);
}

int identity_switches(const TrackLog& log, const GroundTruth& gt) {
    check_consistency(log, gt);
    int switches = 0;
    for (const auto& [id, recs] : by_player(log)) {
        std::optional<int> last_match;
        for (const auto* r : recs) {
            if (r->status != TrackStatus::Active || !r->bbox) continue;
            int best_gt = -1;
            double best_iou = 0.0;
            for (int p = 0; p < gt.player_count; ++p) {
                const PlayerGt& g = gt.at(r->frame, p);
                if (!g.on_screen) continue;
                const double v = iou(*r->bbox, g.bbox);
                if (v > best_iou) {
                    best_iou = v;
                    best_gt = p;
                }
            }
            if (best_gt < 0 || best_iou < kTrackedIouThreshold) continue;  // unmatched
            if (last_match && *last_match != best_gt) ++switches;
            last_match = best_gt;
        }
    }
    return switches;
}

RecoveryStats occlusion_recovery(const std::vector<PipelineEvent>& events) {
    enum class Open { None, Occlusion, OffScreen };
    struct PlayerState {
        Open open = Open::None;
        int start_frame = 0;
        bool attempted = false;
    };
    std::map<PlayerId, PlayerState> state;

    RecoveryStats stats;
    int successes = 0, terminal_failures = 0;
    std::vector<double> recovery_times;

    for (const auto& e : events) {
        PlayerState& s = state[e.player];
        switch (e.kind) {
            case EventKind::OcclusionStart:
                s.open = Open::Occlusion;
                s.start_frame = e.frame;
                s.attempted = false;
                ++stats.occlusion.total;
                break;
            case EventKind::OffScreenStart:
                s.open = Open::OffScreen;
                s.start_frame = e.frame;
                s.attempted = false;
                ++stats.off_screen.total;
                break;
            case EventKind::RecoveryFailure:
                if (s.open == Open::Occlusion) s.attempted = true;
                break;
            case EventKind::RecoverySuccess:
                if (s.open == Open::Occlusion) {
                    ++successes;
                    ++stats.occlusion.recovered;
                    recovery_times.push_back(static_cast<double>(e.frame - s.start_frame));
                } else if (s.open == Open::OffScreen) {
                    ++stats.off_screen.reacquired;
                }
                s.open = Open::None;
                break;
            case EventKind::ReacquisitionFailure:
                if (s.open == Open::OffScreen) {
                    ++stats.off_screen.failed;
                    s.open = Open::None;
                }
                break;
            case EventKind::RecoveryAttempt:
            case EventKind::OcclusionEnd:
                break;
        }
    }
    for (const auto& [id, s] : state) {
        if (s.open == Open::Occlusion && s.attempted) {
            ++terminal_failures;
            ++stats.occlusion.failed;
        } else if (s.open == Open::OffScreen) {
            ++stats.off_screen.failed;
        }
    }

    const int denominator = successes + terminal_failures;
    if (denominator > 0)
        stats.orr = 100.0 * static_cast<double>(successes) / static_cast<double>(denominator);
    if (!recovery_times.empty()) {
        double sum = 0.0;
        for (double t : recovery_times) sum += t;
        stats.avg_recovery_time = sum / static_cast<double>(recovery_times.size());
    }
    return stats;
}

double persistence(const TrackLog& log) {
    double sum = 0.0;
    long long segments = 0;
    for (const auto& [id, recs] : by_player(log)) {
        for (int len : active_segment_lengths(recs)) {
            sum += static_cast<double>(len);
            ++segments;
        }
    }
    if (segments == 0) return 0.0;
    return sum / static_cast<double>(segments);
}

double robustness_score(std::optional<double> orr, double normalized_persistence,
                        int switches, int player_count) {
    const double recovery = orr.value_or(0.0);
    const double consistency =
        std::max(0.0, 1.0 - static_cast<double>(switches) / std::max(1, player_count));
    return 0.4 * recovery + 0.3 * (normalized_persistence * 100.0) +
           0.3 * (consistency * 100.0);
}

FpsStats perf_stats(const TrackLog& log) {
    if (log.frame_ms.empty())
        throw Error(ErrorKind::MissingTimings, "perf_stats: no per-frame timings recorded");
    FpsStats stats;
    stats.min_frame_ms = log.frame_ms.front();
    stats.max_frame_ms = log.frame_ms.front();
    double sum = 0.0;
    for (double ms : log.frame_ms) {
        sum += ms;
        stats.min_frame_ms = std::min(stats.min_frame_ms, ms);
        stats.max_frame_ms = std::max(stats.max_frame_ms, ms);
    }
    stats.mean_frame_ms = sum / static_cast<double>(log.frame_ms.size());
    stats.average_fps = stats.mean_frame_ms > 0.0 ? 1000.0 / stats.mean_frame_ms : 0.0;
    return stats;
}

namespace {

struct OffScreenPeriod {
    PlayerId player;
    int start;
    int end;  // closing frame, or the final frame when never closed
};

std::vector<OffScreenPeriod> off_screen_periods(const TrackLog& log) {
    std::vector<OffScreenPeriod> periods;
    std::map<PlayerId, std::optional<std::size_t>> open;
    for (const auto& e : log.events) {
        if (e.kind == EventKind::OffScreenStart) {
            open[e.player] = periods.size();
            periods.push_back(OffScreenPeriod{e.player, e.frame, log.frame_count - 1});
        } else if (e.kind == EventKind::RecoverySuccess) {
            auto it = open.find(e.player);
            if (it != open.end() && it->second) {
                periods[*it->second].end = e.frame;
                it->second.reset();
            }
        }
    }
    return periods;
}

// Duration of an off-screen period is the length of the ground-truth absence
// run it overlaps (the frames the player was actually gone); the period's own
// span is the fallback when no absence run overlaps it.
std::optional<double> off_screen_avg_duration(const TrackLog& log, const GroundTruth& gt) {
    const auto periods = off_screen_periods(log);
    if (periods.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& period : periods) {
        int best = 0;
        int run = 0, run_start = 0;
        for (int f = 0; f < gt.frame_count; ++f) {
            if (!gt.at(f, period.player).on_screen) {
                if (run == 0) run_start = f;
                ++run;
                if (run_start <= period.end && f >= period.start)
                    best = std::max(best, run);
            } else {
                run = 0;
            }
        }
        sum += best > 0 ? static_cast<double>(best)
                        : static_cast<double>(period.end - period.start);
    }
    return sum / static_cast<double>(periods.size());
}

}  // namespace

EvalReport evaluate(const TrackLog& log, const GroundTruth& gt) {
    check_consistency(log, gt);

    EvalReport report;
    report.tsr_per_player = tsr_per_player(log, gt);
    report.tsr_aggregate = tsr(log, gt);

    {
        double sum = 0.0;
        long long n = 0;
        for (const auto& r : log.records) {
            if (r.status != TrackStatus::Active || !r.bbox) continue;
            const PlayerGt& g = gt.at(r.frame, r.player);
            if (!g.on_screen) continue;
            sum += iou(*r.bbox, g.bbox);
            ++n;
        }
        if (n > 0) report.mean_iou = sum / static_cast<double>(n);
    }

    report.bbox_stability = bbox_stability(log);
    report.fragmentation = fragmentation(log);
    report.occlusion_frame_ratio = occlusion_frame_ratio(log, gt);
    report.identity_switches = identity_switches(log, gt);

    RecoveryStats recovery = occlusion_recovery(log.events);
    report.orr = recovery.orr;
    report.avg_recovery_time = recovery.avg_recovery_time;
    report.occlusion_events = recovery.occlusion;
    report.off_screen_events = recovery.off_screen;

    report.persistence = persistence(log);
    report.normalized_persistence =
        log.frame_count > 0 ? report.persistence / static_cast<double>(log.frame_count) : 0.0;

    const int players = static_cast<int>(by_player(log).size());
    report.robustness_score = robustness_score(report.orr, report.normalized_persistence,
                                               report.identity_switches, players);
    report.fps = perf_stats(log);

    report.off_screen_events.avg_duration = off_screen_avg_duration(log, gt);

    return report;
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
    using json = nlohmann::ordered_json;
    json j;
    json per_player = json::object();
    for (const auto& [id, value] : report.tsr_per_player)
        per_player[std::to_string(id)] = value;
    j["tsr"] = {{"per_player", per_player}, {"aggregate", report.tsr_aggregate}};
    j["mean_iou"] = report.mean_iou ? json(*report.mean_iou) : json(nullptr);
    j["bbox_stability"] = report.bbox_stability ? json(*report.bbox_stability) : json(nullptr);
    j["fragmentation"] = report.fragmentation;
    j["occlusion_frame_ratio"] = report.occlusion_frame_ratio;
    j["identity_switches"] = report.identity_switches;
    j["orr"] = report.orr ? json(*report.orr) : json(nullptr);
    j["avg_recovery_time"] =
        report.avg_recovery_time ? json(*report.avg_recovery_time) : json(nullptr);
    j["persistence"] = report.persistence;
    j["normalized_persistence"] = report.normalized_persistence;
    j["robustness_score"] = report.robustness_score;
    j["fps"] = {{"mean_frame_ms", report.fps.mean_frame_ms},
                {"min_frame_ms", report.fps.min_frame_ms},
                {"max_frame_ms", report.fps.max_frame_ms},
                {"average_fps", report.fps.average_fps},
                {"avg_memory_mb", nullptr},
                {"peak_memory_mb", nullptr}};
    j["occlusion_events"] = {{"total", report.occlusion_events.total},
                             {"recovered", report.occlusion_events.recovered},
                             {"failed", report.occlusion_events.failed}};
    j["off_screen_events"] = {{"total", report.off_screen_events.total},
                              {"reacquired", report.off_screen_events.reacquired},
                              {"failed", report.off_screen_events.failed},
                              {"avg_duration", report.off_screen_events.avg_duration
                                                   ? json(*report.off_screen_events.avg_duration)
                                                   : json(nullptr)}};
    return j;
}

namespace {

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v, int digits = 4) {
    return v ? fmt(*v, digits) : std::string("n/a");
}

void row(std::ostringstream& out, const std::string& name, const std::string& value) {
    out << "  " << name;
    for (std::size_t i = name.size(); i < 36; ++i) out << ' ';
    out << value << "\n";
}

}  // namespace

std::string render_report_table(const EvalReport& r) {
    std::ostringstream out;
    out << "== Computational Performance ==\n";
    row(out, "Average FPS", fmt(r.fps.average_fps, 2));
    row(out, "Mean Frame Time (ms)", fmt(r.fps.mean_frame_ms, 2));
    row(out, "Min Frame Time (ms)", fmt(r.fps.min_frame_ms, 2));
    row(out, "Max Frame Time (ms)", fmt(r.fps.max_frame_ms, 2));
    row(out, "Avg Memory Usage (MB)", "n/a");
    row(out, "Peak Memory Usage (MB)", "n/a");
    out << "== Tracking Accuracy ==\n";
    row(out, "Tracking Success Rate (%)", fmt(r.tsr_aggregate, 2));
    for (const auto& [id, value] : r.tsr_per_player)
        row(out, "  player " + std::to_string(id), fmt(value, 2));
    row(out, "Mean IoU", fmt_opt(r.mean_iou));
    row(out, "BBox Stability (area ratio)", fmt_opt(r.bbox_stability, 5));
    row(out, "Track Fragmentation", fmt(r.fragmentation, 2));
    out << "== Robustness Metrics ==\n";
    row(out, "Occlusion Frame Ratio (%)", fmt(r.occlusion_frame_ratio, 2));
    row(out, "Identity Switches", std::to_string(r.identity_switches));
    row(out, "Overall Robustness Score", fmt(r.robustness_score, 1));
    row(out, "Occlusion Recovery Rate (%)", fmt_opt(r.orr, 1));
    row(out, "Avg Recovery Time (frames)", fmt_opt(r.avg_recovery_time, 1));
    row(out, "Track Persistence (frames)", fmt(r.persistence, 2));
    out << "== Occlusion Events ==\n";
    row(out, "Total Occlusion Events", std::to_string(r.occlusion_events.total));
    row(out, "Successfully Recovered", std::to_string(r.occlusion_events.recovered));
    row(out, "Failed Recoveries", std::to_string(r.occlusion_events.failed));
    out << "== Off-Screen Events ==\n";
    row(out, "Total Off-Screen Events", std::to_string(r.off_screen_events.total));
    row(out, "Successfully Re-acquired", std::to_string(r.off_screen_events.reacquired));
    row(out, "Failed Re-acquisitions", std::to_string(r.off_screen_events.failed));
    row(out, "Avg Off-Screen Duration (frames)", fmt_opt(r.off_screen_events.avg_duration, 1));
    return out.str();
}

}  // namespace teamtrack
