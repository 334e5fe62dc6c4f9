#include <doctest.h>

#include <fstream>
#include <random>

#include "teamtrack/log_io.hpp"
#include "teamtrack/metrics.hpp"

using namespace teamtrack;

namespace {

GroundTruth uniform_gt(int frames, int players, const BBox& box) {
    GroundTruth gt;
    gt.frame_count = frames;
    gt.player_count = players;
    gt.per_frame.assign(frames, {});
    for (int f = 0; f < frames; ++f)
        for (int p = 0; p < players; ++p) {
            PlayerGt g{p % 2 == 0 ? TeamLabel::Team1 : TeamLabel::Team2,
                       BBox{box.x + 40 * p, box.y, box.w, box.h}, 1.0, true};
            gt.per_frame[f].push_back(g);
        }
    return gt;
}

TrackRecord rec(int frame, int player, TrackStatus status, std::optional<BBox> box,
                double conf = 0.9) {
    return TrackRecord{frame, player,
                       player % 2 == 0 ? TeamLabel::Team1 : TeamLabel::Team2, status, box, conf};
}

TrackLog log_for(const GroundTruth& gt, const std::vector<TrackRecord>& records) {
    TrackLog log;
    log.frame_count = gt.frame_count;
    log.records = records;
    log.frame_ms.assign(gt.frame_count, 100.0);
    return log;
}

// run-length oracle over a player's status string
int segment_count(const std::string& statuses) {
    int segments = 0;
    bool in_run = false;
    for (char c : statuses) {
        if (c == 'A' && !in_run) {
            ++segments;
            in_run = true;
        } else if (c != 'A') {
            in_run = false;
        }
    }
    return segments;
}

}  // namespace

TEST_CASE("tsr counts tracked on-screen frames") {
    const GroundTruth gt = uniform_gt(10, 1, BBox{10, 10, 9, 9});
    std::vector<TrackRecord> records;
    for (int f = 0; f < 10; ++f) {
        if (f == 4)
            records.push_back(rec(f, 0, TrackStatus::Lost, std::nullopt, 0.0));
        else
            records.push_back(rec(f, 0, TrackStatus::Active, BBox{10, 10, 9, 9}));
    }
    CHECK(tsr(log_for(gt, records), gt) == doctest::Approx(90.0));

    std::vector<TrackRecord> full;
    for (int f = 0; f < 10; ++f) full.push_back(rec(f, 0, TrackStatus::Active, BBox{10, 10, 9, 9}));
    CHECK(tsr(log_for(gt, full), gt) == doctest::Approx(100.0));
}

TEST_CASE("tsr equals exhaustive enumeration on a two-player log") {
    const int frames = 12;
    GroundTruth gt = uniform_gt(frames, 2, BBox{10, 10, 9, 9});
    gt.per_frame[3][1].on_screen = false;  // one absent frame for player 1
    std::mt19937 rng(5);
    std::bernoulli_distribution good(0.7);
    std::vector<TrackRecord> records;
    long long tracked[2] = {0, 0}, on_screen[2] = {0, 0};
    for (int f = 0; f < frames; ++f) {
        for (int p = 0; p < 2; ++p) {
            const PlayerGt& g = gt.at(f, p);
            if (good(rng)) {
                records.push_back(rec(f, p, TrackStatus::Active, g.bbox));
                if (g.on_screen) {
                    ++tracked[p];  // IoU 1.0 against own annotation
                    ++on_screen[p];
                }
            } else {
                records.push_back(rec(f, p, TrackStatus::Lost, std::nullopt, 0.0));
                if (g.on_screen) ++on_screen[p];
            }
        }
    }
    const double expect = 0.5 * (100.0 * tracked[0] / on_screen[0] +
                                 100.0 * tracked[1] / on_screen[1]);
    CHECK(tsr(log_for(gt, records), gt) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("tsr rejects mismatched frame ranges") {
    const GroundTruth gt = uniform_gt(10, 1, BBox{10, 10, 9, 9});
    std::vector<TrackRecord> records{rec(0, 0, TrackStatus::Active, BBox{10, 10, 9, 9})};
    TrackLog log = log_for(gt, records);
    log.frame_count = 1;
    try {
        tsr(log, gt);
        FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SchemaMismatch);
    }
}

TEST_CASE("bbox_stability") {
    const GroundTruth gt = uniform_gt(6, 1, BBox{0, 0, 9, 9});

    // constant boxes: exactly 1.0
    std::vector<TrackRecord> constant;
    for (int f = 0; f < 6; ++f) constant.push_back(rec(f, 0, TrackStatus::Active, BBox{0, 0, 9, 9}));
    CHECK(*bbox_stability(log_for(gt, constant)) == doctest::Approx(1.0));

    // alternating 100 and 81 px^2: every pair contributes 81/100
    std::vector<TrackRecord> alternating;
    for (int f = 0; f < 6; ++f)
        alternating.push_back(rec(f, 0, TrackStatus::Active,
                                  f % 2 == 0 ? BBox{0, 0, 9, 9} : BBox{0, 0, 8, 8}));
    CHECK(*bbox_stability(log_for(gt, alternating)) == doctest::Approx(0.81));

    // no consecutive active pair: null
    std::vector<TrackRecord> sparse;
    for (int f = 0; f < 6; ++f)
        sparse.push_back(f % 2 == 0 ? rec(f, 0, TrackStatus::Active, BBox{0, 0, 9, 9})
                                    : rec(f, 0, TrackStatus::Lost, std::nullopt, 0.0));
    CHECK_FALSE(bbox_stability(log_for(gt, sparse)).has_value());
}

TEST_CASE("fragmentation counts maximal active segments") {
    const GroundTruth gt = uniform_gt(25, 1, BBox{0, 0, 9, 9});
    std::vector<TrackRecord> records;
    for (int f = 0; f < 25; ++f) {
        const bool active = f < 10 || f >= 15;  // active 10, lost 5, active 10
        records.push_back(active ? rec(f, 0, TrackStatus::Active, BBox{0, 0, 9, 9})
                                 : rec(f, 0, TrackStatus::Lost, std::nullopt, 0.0));
    }
    CHECK(fragmentation(log_for(gt, records)) == doctest::Approx(2.0));

    std::vector<TrackRecord> unbroken;
    for (int f = 0; f < 25; ++f) unbroken.push_back(rec(f, 0, TrackStatus::Active, BBox{0, 0, 9, 9}));
    CHECK(fragmentation(log_for(gt, unbroken)) == doctest::Approx(1.0));
}

TEST_CASE("fragmentation and persistence match the run-length oracle on random logs") {
    std::mt19937 rng(11);
    std::bernoulli_distribution active(0.6);
    for (int trial = 0; trial < 20; ++trial) {
        const int frames = 30;
        const GroundTruth gt = uniform_gt(frames, 2, BBox{0, 0, 9, 9});
        std::vector<TrackRecord> records;
        std::string statuses[2];
        for (int f = 0; f < frames; ++f)
            for (int p = 0; p < 2; ++p) {
                if (active(rng)) {
                    records.push_back(rec(f, p, TrackStatus::Active, gt.at(f, p).bbox));
                    statuses[p] += 'A';
                } else {
                    records.push_back(rec(f, p, TrackStatus::Lost, std::nullopt, 0.0));
                    statuses[p] += 'L';
                }
            }
        const TrackLog log = log_for(gt, records);
        const double expect_frag = 0.5 * (segment_count(statuses[0]) + segment_count(statuses[1]));
        CHECK(fragmentation(log) == doctest::Approx(expect_frag));

        // persistence oracle: mean run length across both players
        double total = 0;
        int segments = 0;
        for (const auto& s : statuses) {
            int run = 0;
            for (char c : s) {
                if (c == 'A') ++run;
                else if (run > 0) { total += run; ++segments; run = 0; }
            }
            if (run > 0) { total += run; ++segments; }
        }
        if (segments > 0)
            CHECK(persistence(log) == doctest::Approx(total / segments).epsilon(1e-12));
    }
}

TEST_CASE("occlusion_frame_ratio") {
    GroundTruth gt = uniform_gt(125, 2, BBox{0, 0, 9, 9});
    std::vector<TrackRecord> records;
    for (int f = 0; f < 125; ++f)
        records.push_back(rec(f, 0, TrackStatus::Active, BBox{0, 0, 9, 9}));
    CHECK(occlusion_frame_ratio(log_for(gt, records), gt) == doctest::Approx(0.0));

    for (int f = 50; f < 62; ++f) gt.per_frame[f][1].visible = 0.5;  // 12 of 125 frames
    CHECK(occlusion_frame_ratio(log_for(gt, records), gt) == doctest::Approx(9.6));

    for (int f = 0; f < 125; ++f) gt.per_frame[f][0].visible = 0.0;
    CHECK(occlusion_frame_ratio(log_for(gt, records), gt) == doctest::Approx(100.0));
}

TEST_CASE("identity_switches counts changes of the best-matched annotation") {
    const GroundTruth gt = uniform_gt(12, 2, BBox{10, 10, 9, 9});  // players at x=10 and x=50
    auto own = [&](int f, int p) { return rec(f, 0, TrackStatus::Active, gt.at(f, p).bbox); };

    std::vector<TrackRecord> faithful;
    for (int f = 0; f < 12; ++f) faithful.push_back(own(f, 0));
    CHECK(identity_switches(log_for(gt, faithful), gt) == 0);

    std::vector<TrackRecord> jump;  // follows annotation 0, then jumps to 1
    for (int f = 0; f < 12; ++f) jump.push_back(own(f, f < 6 ? 0 : 1));
    CHECK(identity_switches(log_for(gt, jump), gt) == 1);

    std::vector<TrackRecord> back;  // 0 -> 1 -> 0
    for (int f = 0; f < 12; ++f) back.push_back(own(f, f < 4 ? 0 : (f < 8 ? 1 : 0)));
    CHECK(identity_switches(log_for(gt, back), gt) == 2);

    // unmatched frames in between do not reset the last match
    std::vector<TrackRecord> gap;
    for (int f = 0; f < 12; ++f) {
        if (f >= 4 && f < 8)
            gap.push_back(rec(f, 0, TrackStatus::Lost, std::nullopt, 0.0));
        else
            gap.push_back(own(f, 0));
    }
    CHECK(identity_switches(log_for(gt, gap), gt) == 0);
}

TEST_CASE("occlusion_recovery pairs events into periods") {
    auto ev = [](EventKind k, int player, int frame) {
        return PipelineEvent{k, player, frame, ""};
    };

    SUBCASE("one success and one terminal failure give 50 percent") {
        const std::vector<PipelineEvent> events{
            ev(EventKind::OcclusionStart, 0, 10),
            ev(EventKind::RecoveryAttempt, 0, 20),
            ev(EventKind::RecoverySuccess, 0, 20),
            ev(EventKind::OcclusionStart, 1, 30),
            ev(EventKind::RecoveryAttempt, 1, 40),
            ev(EventKind::RecoveryFailure, 1, 40),
        };
        const RecoveryStats stats = occlusion_recovery(events);
        CHECK(*stats.orr == doctest::Approx(50.0));
        CHECK(*stats.avg_recovery_time == doctest::Approx(10.0));
        CHECK(stats.occlusion.total == 2);
        CHECK(stats.occlusion.recovered == 1);
        CHECK(stats.occlusion.failed == 1);
    }

    SUBCASE("failures before an eventual success are not terminal") {
        const std::vector<PipelineEvent> events{
            ev(EventKind::OcclusionStart, 0, 5),
            ev(EventKind::RecoveryFailure, 0, 15),
            ev(EventKind::RecoveryFailure, 0, 25),
            ev(EventKind::RecoverySuccess, 0, 35),
        };
        const RecoveryStats stats = occlusion_recovery(events);
        CHECK(*stats.orr == doctest::Approx(100.0));
        CHECK(*stats.avg_recovery_time == doctest::Approx(30.0));
    }

    SUBCASE("no recovery-requiring events give a null rate and zero tallies") {
        const RecoveryStats stats = occlusion_recovery({});
        CHECK_FALSE(stats.orr.has_value());
        CHECK_FALSE(stats.avg_recovery_time.has_value());
        CHECK(stats.occlusion.total == 0);
        CHECK(stats.occlusion.recovered == 0);
        CHECK(stats.occlusion.failed == 0);
    }

    SUBCASE("off-screen periods are tallied separately from occlusions") {
        const std::vector<PipelineEvent> events{
            ev(EventKind::OffScreenStart, 0, 10),
            ev(EventKind::RecoverySuccess, 0, 30),
            ev(EventKind::OffScreenStart, 1, 40),
            ev(EventKind::ReacquisitionFailure, 1, 99),
        };
        const RecoveryStats stats = occlusion_recovery(events);
        CHECK_FALSE(stats.orr.has_value());  // no occlusion periods at all
        CHECK(stats.off_screen.total == 2);
        CHECK(stats.off_screen.reacquired == 1);
        CHECK(stats.off_screen.failed == 1);
    }
}

TEST_CASE("persistence") {
    const GroundTruth gt = uniform_gt(100, 1, BBox{0, 0, 9, 9});
    std::vector<TrackRecord> one_segment;
    for (int f = 0; f < 100; ++f)
        one_segment.push_back(rec(f, 0, TrackStatus::Active, BBox{0, 0, 9, 9}));
    const TrackLog log = log_for(gt, one_segment);
    CHECK(persistence(log) == doctest::Approx(100.0));

    const GroundTruth gt2 = uniform_gt(45, 1, BBox{0, 0, 9, 9});
    std::vector<TrackRecord> split;  // 30-frame and 10-frame segments
    for (int f = 0; f < 45; ++f) {
        const bool active = f < 30 || f >= 35;
        split.push_back(active ? rec(f, 0, TrackStatus::Active, BBox{0, 0, 9, 9})
                               : rec(f, 0, TrackStatus::Lost, std::nullopt, 0.0));
    }
    CHECK(persistence(log_for(gt2, split)) == doctest::Approx(20.0));
}

TEST_CASE("robustness_score") {
    CHECK(robustness_score(100.0, 1.0, 0, 2) == doctest::Approx(100.0));
    CHECK(robustness_score(std::nullopt, 1.0, 0, 2) == doctest::Approx(60.0));
    CHECK(robustness_score(0.0, 0.0, 2, 2) == doctest::Approx(0.0));
    CHECK(robustness_score(std::nullopt, 0.5, 1, 2) == doctest::Approx(30.0));

    // monotone in each argument
    double last = -1.0;
    for (double orr : {0.0, 25.0, 50.0, 75.0, 100.0}) {
        const double s = robustness_score(orr, 0.5, 1, 4);
        CHECK(s >= last);
        last = s;
    }
    last = -1.0;
    for (double np : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double s = robustness_score(50.0, np, 1, 4);
        CHECK(s >= last);
        last = s;
    }
    last = 101.0;
    for (int sw : {0, 1, 2, 3, 4, 5}) {
        const double s = robustness_score(50.0, 0.5, sw, 4);
        CHECK(s <= last);
        last = s;
    }
}

TEST_CASE("perf_stats") {
    const GroundTruth gt = uniform_gt(2, 1, BBox{0, 0, 9, 9});
    std::vector<TrackRecord> records{rec(0, 0, TrackStatus::Active, BBox{0, 0, 9, 9}),
                                     rec(1, 0, TrackStatus::Active, BBox{0, 0, 9, 9})};
    TrackLog log = log_for(gt, records);

    log.frame_ms = {131.61, 131.61};
    FpsStats s = perf_stats(log);
    CHECK(s.average_fps == doctest::Approx(1000.0 / 131.61).epsilon(1e-12));
    CHECK(s.average_fps == doctest::Approx(7.6).epsilon(0.01));

    log.frame_ms = {100.0, 200.0};
    s = perf_stats(log);
    CHECK(s.mean_frame_ms == doctest::Approx(150.0));
    CHECK(s.min_frame_ms == doctest::Approx(100.0));
    CHECK(s.max_frame_ms == doctest::Approx(200.0));
    CHECK(s.average_fps == doctest::Approx(1000.0 / 150.0).epsilon(1e-12));

    log.frame_ms.clear();
    try {
        perf_stats(log);
        FAIL("expected MissingTimings");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingTimings);
    }
}

TEST_CASE("evaluate rejects an empty log") {
    const GroundTruth gt = uniform_gt(5, 1, BBox{0, 0, 9, 9});
    TrackLog log;
    log.frame_count = 5;
    CHECK_THROWS_AS(evaluate(log, gt), Error);
}

TEST_CASE("golden fixture: every metric matches the worked arithmetic byte for byte") {
    const std::filesystem::path dir = TEAMTRACK_GOLDEN_DIR;
    const TrackLog log = load_track_log(dir / "golden_track.jsonl", dir / "golden_events.jsonl");
    const GroundTruth gt = load_ground_truth(dir / "golden_gt.jsonl");
    const EvalReport report = evaluate(log, gt);

    // hand-computed values (derivations in golden_worked.md)
    CHECK(report.tsr_per_player.at(0) == 100.0);
    CHECK(report.tsr_per_player.at(1) == 50.0);
    CHECK(report.tsr_aggregate == 75.0);
    CHECK(*report.mean_iou == doctest::Approx(29.0 / 30.0).epsilon(1e-12));
    CHECK(*report.bbox_stability == doctest::Approx(26.9 / 27.0).epsilon(1e-12));
    CHECK(report.fragmentation == 1.5);
    CHECK(report.occlusion_frame_ratio == doctest::Approx(35.0));
    CHECK(report.identity_switches == 0);
    CHECK(*report.orr == 100.0);
    CHECK(*report.avg_recovery_time == 10.0);
    CHECK(report.persistence == doctest::Approx(10.0));
    CHECK(report.normalized_persistence == doctest::Approx(0.5));
    CHECK(report.robustness_score == doctest::Approx(85.0));
    CHECK(report.fps.mean_frame_ms == 100.0);
    CHECK(report.fps.average_fps == 10.0);
    CHECK(report.occlusion_events.total == 1);
    CHECK(report.occlusion_events.recovered == 1);
    CHECK(report.occlusion_events.failed == 0);
    CHECK(report.off_screen_events.total == 0);
    CHECK_FALSE(report.off_screen_events.avg_duration.has_value());

    // byte-identical serialized report
    std::ifstream golden(dir / "golden_report.json", std::ios::binary);
    REQUIRE(golden.good());
    const std::string expect((std::istreambuf_iterator<char>(golden)),
                             std::istreambuf_iterator<char>());
    CHECK(report_to_json(report).dump(2) + "\n" == expect);

    // evaluate is pure: a second run serializes identically
    CHECK(report_to_json(evaluate(log, gt)).dump(2) == report_to_json(report).dump(2));
}

TEST_CASE("every ratio metric stays in range on random logs") {
    std::mt19937 rng(2024);
    std::bernoulli_distribution active(0.5), visible(0.8);
    std::uniform_int_distribution<int> jitter(-6, 6);
    for (int trial = 0; trial < 15; ++trial) {
        const int frames = 25;
        GroundTruth gt = uniform_gt(frames, 3, BBox{20, 20, 11, 15});
        for (int f = 0; f < frames; ++f)
            for (int p = 0; p < 3; ++p)
                if (!visible(rng)) gt.per_frame[f][p].visible = 0.3;
        std::vector<TrackRecord> records;
        std::vector<PipelineEvent> events;
        std::optional<int> open[3];
        for (int f = 0; f < frames; ++f)
            for (int p = 0; p < 3; ++p) {
                if (active(rng)) {
                    BBox b = gt.at(f, p).bbox;
                    b.x += jitter(rng);
                    b.y += jitter(rng);
                    records.push_back(rec(f, p, TrackStatus::Active, b));
                    if (open[p]) {
                        events.push_back({EventKind::RecoverySuccess, p, f, ""});
                        open[p].reset();
                    }
                } else {
                    records.push_back(rec(f, p, TrackStatus::Lost, std::nullopt, 0.0));
                    if (!open[p]) {
                        events.push_back({EventKind::OcclusionStart, p, f, ""});
                        open[p] = f;
                    } else if ((f - *open[p]) % 7 == 0) {
                        events.push_back({EventKind::RecoveryFailure, p, f, ""});
                    }
                }
            }
        TrackLog log = log_for(gt, records);
        log.events = events;
        const EvalReport r = evaluate(log, gt);
        CHECK(r.tsr_aggregate >= 0.0);
        CHECK(r.tsr_aggregate <= 100.0);
        if (r.orr) {
            CHECK(*r.orr >= 0.0);
            CHECK(*r.orr <= 100.0);
        }
        CHECK(r.occlusion_frame_ratio >= 0.0);
        CHECK(r.occlusion_frame_ratio <= 100.0);
        if (r.bbox_stability) {
            CHECK(*r.bbox_stability > 0.0);
            CHECK(*r.bbox_stability <= 1.0);
        }
        CHECK(r.robustness_score >= 0.0);
        CHECK(r.robustness_score <= 100.0);
        CHECK(r.fragmentation >= 1.0);
        CHECK(r.normalized_persistence >= 0.0);
        CHECK(r.normalized_persistence <= 1.0);
    }
}
