#include "teamtrack/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "teamtrack/log_io.hpp"
#include "teamtrack/metrics.hpp"
#include "teamtrack/run_config.hpp"
#include "teamtrack/scenario.hpp"
#include "teamtrack/util.hpp"

namespace teamtrack {

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Io:
            return kExitIo;
        default:
            return kExitValidation;
    }
}

struct TrackArtifacts {
    TrackLog log;
    GroundTruth gt;
    std::filesystem::path track_path;
    std::filesystem::path events_path;
};

// Shared by cmd_track and cmd_repro: resolve the scenario, validate prompts,
// run the pipeline and write track.jsonl/events.jsonl.
TrackArtifacts run_tracking(const RunConfig& cfg, bool quiet) {
    namespace fs = std::filesystem;
    fs::path data_dir = cfg.scenario;
    const auto presets = scenario_preset_names();
    if (std::find(presets.begin(), presets.end(), cfg.scenario) != presets.end() &&
        !fs::is_directory(data_dir)) {
        data_dir = cfg.output_dir / cfg.scenario;
        generate(scenario_preset(cfg.scenario), data_dir);
    }
    if (!fs::is_directory(data_dir))
        throw Error(ErrorKind::Io, "scenario directory not found: " + data_dir.string());

    FrameSequence seq = load_frame_sequence(data_dir);
    for (std::size_t i = 0; i < cfg.prompts.size(); ++i) {
        const auto& p = cfg.prompts[i];
        if (p.x < 0 || p.x >= seq.width() || p.y < 0 || p.y >= seq.height())
            throw Error(ErrorKind::SchemaMismatch,
                        "prompt " + std::to_string(i) + " at (" + std::to_string(p.x) + "," +
                            std::to_string(p.y) + ") outside " + std::to_string(seq.width()) +
                            "x" + std::to_string(seq.height()) + " frame");
    }

    const fs::path gt_path = data_dir / "gt.jsonl";
    if (cfg.segmenter.implementation == "oracle" && !fs::exists(gt_path))
        throw Error(ErrorKind::SchemaMismatch,
                    "oracle segmenter requires ground truth: missing " + gt_path.string());
    GroundTruth gt = load_ground_truth(gt_path);

    auto segmenter = make_segmenter(cfg.segmenter, &gt);
    TrackLog log = run(seq, cfg.prompts, *segmenter, cfg.pipeline);
    log.scenario = cfg.scenario;
    log.config_hash = cfg.hash();

    std::filesystem::create_directories(cfg.output_dir);
    TrackArtifacts art{std::move(log), std::move(gt), cfg.output_dir / "track.jsonl",
                       cfg.output_dir / "events.jsonl"};
    save_track_log(art.log, art.track_path);
    save_events(art.log.events, art.events_path);

    if (!quiet) {
        std::size_t active_players = 0;
        {
            std::set<PlayerId> ids;
            for (const auto& r : art.log.records) ids.insert(r.player);
            active_players = ids.size();
        }
        std::cout << "tracked " << active_players << " players over " << art.log.frame_count
                  << " frames (config " << std::hex << art.log.config_hash << std::dec << ") -> "
                  << art.track_path.string() << "\n";
        for (const auto& rej : art.log.rejected_prompts)
            std::cout << "prompt " << rej.index << " rejected: " << rej.reason << "\n";
    }
    return art;
}

RunConfig preset_config(const std::string& name, const std::filesystem::path& out_dir,
                        const GroundTruth& gt) {
    RunConfig cfg;
    cfg.scenario = name;
    cfg.output_dir = out_dir;
    for (int p = 0; p < gt.player_count; ++p) {
        const PlayerGt& g = gt.at(0, p);
        if (!g.on_screen)
            throw Error(ErrorKind::InvalidArgument,
                        "preset player " + std::to_string(p) + " not visible on frame 0");
        const Vec2 c = bbox_center(g.bbox);
        cfg.prompts.push_back(PointPrompt{static_cast<int>(std::lround(c.x)),
                                          static_cast<int>(std::lround(c.y)), g.team});
    }
    return cfg;
}

struct Assertion {
    std::string name;
    bool passed;
    std::string detail;
};

void check(std::vector<Assertion>& out, const std::string& name, bool ok,
           const std::string& detail = "") {
    out.push_back(Assertion{name, ok, detail});
}

std::string fmt1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Player with the longest fully-hidden on-screen run, with its run bounds.
struct HiddenRun {
    int player = -1;
    int start = 0;
    int length = 0;
};

HiddenRun longest_hidden_run(const GroundTruth& gt) {
    HiddenRun best;
    for (int p = 0; p < gt.player_count; ++p) {
        int run = 0, start = 0;
        for (int f = 0; f < gt.frame_count; ++f) {
            const PlayerGt& g = gt.at(f, p);
            if (g.on_screen && g.visible == 0.0) {
                if (run == 0) start = f;
                ++run;
                if (run > best.length) best = HiddenRun{p, start, run};
            } else {
                run = 0;
            }
        }
    }
    return best;
}

std::vector<Assertion> repro_assertions(const std::string& name, const EvalReport& report,
                                        const TrackLog& log, const GroundTruth& gt) {
    std::vector<Assertion> checks;
    if (name == "light") {
        check(checks, "TSR == 100", report.tsr_aggregate == 100.0, fmt1(report.tsr_aggregate));
        check(checks, "identity switches == 0", report.identity_switches == 0,
              std::to_string(report.identity_switches));
        check(checks, "fragmentation == 1.0", report.fragmentation == 1.0,
              fmt1(report.fragmentation));
        check(checks, "bbox stability >= 0.95",
              report.bbox_stability && *report.bbox_stability >= 0.95,
              report.bbox_stability ? fmt1(*report.bbox_stability) : "null");
        check(checks, "occlusion events == 0", report.occlusion_events.total == 0,
              std::to_string(report.occlusion_events.total));
        check(checks, "robustness == 60.0", report.robustness_score == 60.0,
              fmt1(report.robustness_score));
    } else if (name == "heavy") {
        const HiddenRun hidden = longest_hidden_run(gt);
        check(checks, "full occlusion >= 12 frames in ground truth", hidden.length >= 12,
              std::to_string(hidden.length) + " frames, player " + std::to_string(hidden.player));
        std::optional<int> occlusion_start;
        bool attempt_at_10 = false;
        std::optional<int> success_frame;
        for (const auto& e : log.events) {
            if (e.player != hidden.player) continue;
            if (e.kind == EventKind::OcclusionStart && !occlusion_start)
                occlusion_start = e.frame;
            if (e.kind == EventKind::RecoveryAttempt && occlusion_start &&
                e.frame == *occlusion_start + 10)
                attempt_at_10 = true;
            if (e.kind == EventKind::RecoverySuccess && !success_frame)
                success_frame = e.frame;
        }
        check(checks, "occluded player flagged lost", occlusion_start.has_value(),
              occlusion_start ? "frame " + std::to_string(*occlusion_start) : "never");
        check(checks, "recovery attempted at lost-duration 10", attempt_at_10);
        check(checks, "occluded player recovered", success_frame.has_value(),
              success_frame ? "frame " + std::to_string(*success_frame) : "never");
        if (success_frame) {
            double own_iou = -1.0, decoy_iou = -1.0;
            for (const auto& r : log.records) {
                if (r.player != hidden.player || r.frame < *success_frame) continue;
                if (r.status != TrackStatus::Active || !r.bbox) continue;
                const PlayerGt& own = gt.at(r.frame, hidden.player);
                own_iou = own.on_screen ? iou(*r.bbox, own.bbox) : -1.0;
                decoy_iou = 0.0;
                for (int p = 0; p < gt.player_count; ++p) {
                    if (p == hidden.player) continue;
                    const PlayerGt& other = gt.at(r.frame, p);
                    if (other.on_screen)
                        decoy_iou = std::max(decoy_iou, iou(*r.bbox, other.bbox));
                }
                break;
            }
            check(checks, "post-recovery IoU vs own annotation >= 0.5", own_iou >= 0.5,
                  fmt1(own_iou));
            check(checks, "recovered box not on another player", decoy_iou >= 0.0 && decoy_iou < 0.3,
                  fmt1(decoy_iou));
        }
        check(checks, "ORR >= 50", report.orr && *report.orr >= 50.0,
              report.orr ? fmt1(*report.orr) : "null");
        check(checks, "TSR >= 85", report.tsr_aggregate >= 85.0, fmt1(report.tsr_aggregate));
    } else if (name == "longterm") {
        int off_screen_starts = 0;
        for (const auto& e : log.events)
            if (e.kind == EventKind::OffScreenStart) ++off_screen_starts;
        check(checks, "exactly one off-screen event", off_screen_starts == 1,
              std::to_string(off_screen_starts));
        check(checks, "off-screen tally total == 1", report.off_screen_events.total == 1,
              std::to_string(report.off_screen_events.total));
        check(checks, "off-screen duration == 15",
              report.off_screen_events.avg_duration &&
                  *report.off_screen_events.avg_duration == 15.0,
              report.off_screen_events.avg_duration ? fmt1(*report.off_screen_events.avg_duration)
                                                    : "null");
        int exiter = -1;
        for (int p = 0; p < gt.player_count && exiter < 0; ++p)
            for (int f = 0; f < gt.frame_count; ++f)
                if (!gt.at(f, p).on_screen) {
                    exiter = p;
                    break;
                }
        bool ghost_boxes = false;
        for (const auto& r : log.records)
            if (r.player == exiter && r.bbox && !gt.at(r.frame, exiter).on_screen)
                ghost_boxes = true;
        check(checks, "no bbox records while off screen", !ghost_boxes);
        check(checks, "identity switches == 0", report.identity_switches == 0,
              std::to_string(report.identity_switches));
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown repro scenario: " + name);
    }
    return checks;
}

}  // namespace

int cmd_synth(const std::string& preset, const std::filesystem::path& spec_file,
              const std::filesystem::path& out_dir, bool quiet) {
    try {
        ScenarioSpec spec;
        if (!preset.empty())
            spec = scenario_preset(preset);
        else if (!spec_file.empty())
            spec = load_scenario_spec(spec_file);
        else
            throw Error(ErrorKind::InvalidArgument, "synth needs --preset or --spec");
        const GroundTruth gt = generate(spec, out_dir);
        if (!quiet)
            std::cout << "wrote " << gt.frame_count << " frames, " << gt.frame_count * gt.player_count
                      << " ground-truth rows -> " << out_dir.string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_track(const std::filesystem::path& config_path, bool quiet) {
    try {
        const RunConfig cfg = load_run_config(config_path);
        run_tracking(cfg, quiet);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "track: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "track: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_eval(const std::filesystem::path& log_path, const std::filesystem::path& events_path,
             const std::filesystem::path& gt_path, const std::filesystem::path& report_path,
             bool quiet) {
    try {
        std::filesystem::path events = events_path;
        if (events.empty()) events = log_path.parent_path() / "events.jsonl";
        const TrackLog log = load_track_log(log_path, events);
        const GroundTruth gt = load_ground_truth(gt_path);
        const EvalReport report = evaluate(log, gt);
        save_report(report, report_path);
        if (!quiet) std::cout << render_report_table(report);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_repro(const std::string& scenario, const std::filesystem::path& out_dir, bool quiet) {
    try {
        const ScenarioSpec spec = scenario_preset(scenario);
        const std::filesystem::path data_dir = out_dir / "data";
        const GroundTruth gt = generate(spec, data_dir);

        RunConfig cfg = preset_config(scenario, out_dir, gt);
        cfg.scenario = data_dir.string();
        const TrackArtifacts art = run_tracking(cfg, quiet);

        const EvalReport report = evaluate(art.log, art.gt);
        save_report(report, out_dir / "report.json");
        if (!quiet) std::cout << render_report_table(report);

        const auto checks = repro_assertions(scenario, report, art.log, art.gt);
        bool all_ok = true;
        for (const auto& c : checks) {
            all_ok = all_ok && c.passed;
            if (!quiet || !c.passed)
                std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << scenario << ": " << c.name
                          << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
        }
        return all_ok ? kExitOk : kExitAcceptance;
    } catch (const Error& e) {
        std::cerr << "repro: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "repro: " << e.what() << "\n";
        return kExitIo;
    }
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"team-aware multi-player tracking pipeline"};
    app.require_subcommand(1);
    app.fallthrough();
    bool quiet = false;
    app.add_flag("--quiet", quiet, "suppress progress output");

    std::string preset;
    std::filesystem::path spec_file, synth_out;
    auto* synth = app.add_subcommand("synth", "generate a synthetic scenario");
    synth->fallthrough();
    synth->add_option("--preset", preset, "built-in scenario: light, heavy, longterm");
    synth->add_option("--spec", spec_file, "scenario spec JSON file");
    synth->add_option("-o,--out", synth_out, "output directory")->required();

    std::filesystem::path config_path;
    auto* track = app.add_subcommand("track", "run the tracking pipeline");
    track->fallthrough();
    track->add_option("--config", config_path, "run config JSON")->required();

    std::filesystem::path log_path, events_path, gt_path, report_path;
    auto* eval = app.add_subcommand("eval", "evaluate a track log against ground truth");
    eval->fallthrough();
    eval->add_option("--log", log_path, "track.jsonl path")->required();
    eval->add_option("--events", events_path, "events.jsonl path (default: sibling of --log)");
    eval->add_option("--gt", gt_path, "gt.jsonl path")->required();
    eval->add_option("-o,--out", report_path, "report JSON output path")->required();

    std::string repro_name;
    std::filesystem::path repro_out;
    auto* repro = app.add_subcommand("repro", "synth + track + eval with published defaults");
    repro->fallthrough();
    repro->add_option("scenario", repro_name, "light, heavy or longterm")->required();
    repro->add_option("-o,--out", repro_out, "output directory (default runs/<scenario>)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    if (synth->parsed()) return cmd_synth(preset, spec_file, synth_out, quiet);
    if (track->parsed()) return cmd_track(config_path, quiet);
    if (eval->parsed()) return cmd_eval(log_path, events_path, gt_path, report_path, quiet);
    if (repro->parsed()) {
        if (repro_out.empty()) repro_out = std::filesystem::path("runs") / repro_name;
        return cmd_repro(repro_name, repro_out, quiet);
    }
    return kExitValidation;
}

}  // namespace teamtrack
