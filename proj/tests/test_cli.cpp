#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "teamtrack/cli_commands.hpp"
#include "teamtrack/run_config.hpp"
#include "teamtrack/scenario.hpp"

using namespace teamtrack;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("teamtrack_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_config(const fs::path& path, const fs::path& data_dir, const fs::path& out_dir,
                  const std::string& prompts) {
    std::ofstream out(path);
    out << "{\n"
        << "  \"scenario\": \"" << data_dir.string() << "\",\n"
        << "  \"prompts\": " << prompts << ",\n"
        << "  \"output_dir\": \"" << out_dir.string() << "\"\n"
        << "}\n";
}

}  // namespace

TEST_CASE("synth writes a scenario; bad preset names are rejected") {
    const fs::path dir = temp_dir("synth");
    CHECK(cmd_synth("light", {}, dir / "light", true) == kExitOk);
    CHECK(fs::exists(dir / "light" / "gt.jsonl"));
    CHECK(fs::exists(dir / "light" / "seq.json"));
    CHECK(fs::exists(dir / "light" / "scenario.json"));
    CHECK(fs::exists(dir / "light" / "frame_000124.ppm"));

    CHECK(cmd_synth("mediumrare", {}, dir / "x", true) == kExitValidation);
    CHECK(cmd_synth("", {}, dir / "y", true) == kExitValidation);
}

TEST_CASE("synth from a spec file") {
    const fs::path dir = temp_dir("synth_spec");
    save_scenario_spec(scenario_preset("longterm"), dir / "spec.json");
    CHECK(cmd_synth("", dir / "spec.json", dir / "out", true) == kExitOk);
    CHECK(fs::exists(dir / "out" / "frame_000099.ppm"));
}

TEST_CASE("track validates prompts and oracle prerequisites") {
    const fs::path dir = temp_dir("track");
    REQUIRE(cmd_synth("light", {}, dir / "data", true) == kExitOk);

    // prompt outside the 320x180 frame
    write_config(dir / "bad_prompt.json", dir / "data", dir / "out",
                 R"([{"x": 400, "y": 90, "team": "team1"}])");
    CHECK(cmd_track(dir / "bad_prompt.json", true) == kExitValidation);

    // oracle without ground truth
    fs::rename(dir / "data" / "gt.jsonl", dir / "data" / "gt.hidden");
    write_config(dir / "no_gt.json", dir / "data", dir / "out",
                 R"([{"x": 60, "y": 86, "team": "team1"}])");
    CHECK(cmd_track(dir / "no_gt.json", true) == kExitValidation);
    fs::rename(dir / "data" / "gt.hidden", dir / "data" / "gt.jsonl");

    // nominal run: one record per frame per player
    write_config(dir / "ok.json", dir / "data", dir / "out",
                 R"([{"x": 60, "y": 86, "team": "team1"}, {"x": 246, "y": 110, "team": "team2"}])");
    CHECK(cmd_track(dir / "ok.json", true) == kExitOk);
    int rows = 0;
    std::ifstream in(dir / "out" / "track.jsonl");
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 2 * 125);
}

TEST_CASE("run config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_run_config(R"({"scenario": "x", "prompts": [{"x":1,"y":1,"team":"team1"}], "bogus": 1})"),
                    Error);
    CHECK_THROWS_AS(parse_run_config(R"({"scenario": "x", "prompts": []})"), Error);
    CHECK_THROWS_AS(parse_run_config(R"({"scenario": "x", "prompts": [{"x":1,"y":1,"team":"team1"}], "recovery": {"similarity_threshold": 1.5}})"),
                    Error);
    CHECK_THROWS_AS(parse_run_config("not json"), Error);

    const RunConfig cfg = parse_run_config(
        R"({"scenario": "data", "prompts": [{"x":1,"y":2,"team":"referee"}]})");
    CHECK(cfg.pipeline.thresholds.confidence == 0.3);
    CHECK(cfg.pipeline.recovery.loss_frames == 10);
    CHECK(cfg.pipeline.recovery.similarity_threshold == 0.6);
    CHECK(cfg.pipeline.tracker.learning_rate == 0.125);
    CHECK(cfg.segmenter.perturbation_radius == 2);
    CHECK(cfg.hash() == cfg.hash());
}

TEST_CASE("eval reproduces the golden report byte for byte and validates inputs") {
    const fs::path golden = TEAMTRACK_GOLDEN_DIR;
    const fs::path dir = temp_dir("eval");
    CHECK(cmd_eval(golden / "golden_track.jsonl", golden / "golden_events.jsonl",
                   golden / "golden_gt.jsonl", dir / "report.json", true) == kExitOk);
    CHECK(file_bytes(dir / "report.json") == file_bytes(golden / "golden_report.json"));

    // frame-count mismatch: evaluate against a different scenario's ground truth
    const fs::path data = temp_dir("eval_mismatch");
    REQUIRE(cmd_synth("light", {}, data / "light", true) == kExitOk);
    CHECK(cmd_eval(golden / "golden_track.jsonl", golden / "golden_events.jsonl",
                   data / "light" / "gt.jsonl", dir / "r2.json", true) == kExitValidation);

    CHECK(cmd_eval(dir / "missing.jsonl", {}, golden / "golden_gt.jsonl", dir / "r3.json",
                   true) == kExitIo);
}

TEST_CASE("cli argument parsing maps to the right commands") {
    const fs::path dir = temp_dir("cli_args");
    const std::string out = (dir / "lt").string();
    const char* argv_synth[] = {"teamtrack", "synth", "--preset", "longterm", "-o", out.c_str(),
                                "--quiet"};
    CHECK(run_cli(7, argv_synth) == kExitOk);
    CHECK(fs::exists(dir / "lt" / "gt.jsonl"));

    const char* argv_bad[] = {"teamtrack", "synth"};
    CHECK(run_cli(2, argv_bad) == kExitValidation);

    const char* argv_none[] = {"teamtrack"};
    CHECK(run_cli(1, argv_none) == kExitValidation);
}

TEST_CASE("synth to an unwritable path exits with the I/O code") {
    const fs::path dir = temp_dir("unwritable");
    std::ofstream(dir / "blocker") << "x";
    CHECK(cmd_synth("light", {}, dir / "blocker" / "sub", true) == kExitIo);
}

TEST_CASE("worker parallelism does not change the artifacts") {
    const fs::path dir = temp_dir("threads");
    REQUIRE(cmd_synth("light", {}, dir / "data", true) == kExitOk);
    const std::string prompts =
        R"([{"x": 60, "y": 86, "team": "team1"}, {"x": 246, "y": 110, "team": "team2"}])";
    write_config(dir / "seq.json.cfg", dir / "data", dir / "seq_out", prompts);
    write_config(dir / "par.json.cfg", dir / "data", dir / "par_out", prompts);

    REQUIRE(cmd_track(dir / "seq.json.cfg", true) == kExitOk);
    setenv("TEAMTRACK_THREADS", "4", 1);
    const int rc = cmd_track(dir / "par.json.cfg", true);
    unsetenv("TEAMTRACK_THREADS");
    REQUIRE(rc == kExitOk);

    auto strip_ms = [](const fs::path& p) {
        std::ifstream in(p);
        std::string out, line;
        while (std::getline(in, line)) {
            const auto pos = line.find(",\"ms\":");
            out += line.substr(0, pos) + "\n";
        }
        return out;
    };
    CHECK(strip_ms(dir / "seq_out" / "track.jsonl") == strip_ms(dir / "par_out" / "track.jsonl"));
    CHECK(file_bytes(dir / "seq_out" / "events.jsonl") == file_bytes(dir / "par_out" / "events.jsonl"));
}
