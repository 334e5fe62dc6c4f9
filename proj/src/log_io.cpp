#include "teamtrack/log_io.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

namespace teamtrack {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return in;
}

}  // namespace

void save_track_log(const TrackLog& log, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& r : log.records) {
        ordered_json row;
        row["frame"] = r.frame;
        row["player"] = r.player;
        row["team"] = team_label_name(r.team);
        row["status"] = track_status_name(r.status);
        if (r.bbox)
            row["bbox"] = {r.bbox->x, r.bbox->y, r.bbox->w, r.bbox->h};
        else
            row["bbox"] = nullptr;
        row["confidence"] = r.confidence;
        row["ms"] = r.frame < static_cast<int>(log.frame_ms.size()) ? log.frame_ms[r.frame] : 0.0;
        out << row.dump() << "\n";
    }
}

void save_events(const std::vector<PipelineEvent>& events, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& e : events) {
        ordered_json row;
        row["frame"] = e.frame;
        row["player"] = e.player;
        row["kind"] = event_kind_name(e.kind);
        row["detail"] = e.detail;
        out << row.dump() << "\n";
    }
}

TrackLog load_track_log(const std::filesystem::path& track_path,
                        const std::filesystem::path& events_path) {
    TrackLog log;
    {
        auto in = open_in(track_path);
        std::string line;
        std::map<int, double> frame_ms;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json row;
            try {
                row = nlohmann::json::parse(line);
            } catch (const std::exception& e) {
                throw Error(ErrorKind::SchemaMismatch,
                            "invalid track log row: " + std::string(e.what()));
            }
            TrackRecord r;
            try {
                r.frame = row.at("frame").get<int>();
                r.player = row.at("player").get<int>();
                r.team = parse_team_label(row.at("team").get<std::string>());
                r.status = parse_track_status(row.at("status").get<std::string>());
                if (!row.at("bbox").is_null()) {
                    const auto& b = row.at("bbox");
                    r.bbox = BBox{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                                  b.at(3).get<int>()};
                }
                r.confidence = row.at("confidence").get<double>();
                frame_ms[r.frame] = row.at("ms").get<double>();
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::SchemaMismatch,
                            "track log row missing field: " + std::string(e.what()));
            }
            log.records.push_back(r);
            log.frame_count = std::max(log.frame_count, r.frame + 1);
        }
        if (log.records.empty())
            throw Error(ErrorKind::SchemaMismatch, "track log has no rows: " + track_path.string());
        log.frame_ms.assign(log.frame_count, 0.0);
        for (const auto& [frame, ms] : frame_ms)
            if (frame < log.frame_count) log.frame_ms[frame] = ms;
    }
    if (std::filesystem::exists(events_path)) {
        auto in = open_in(events_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json row = nlohmann::json::parse(line);
            PipelineEvent e;
            try {
                e.frame = row.at("frame").get<int>();
                e.player = row.at("player").get<int>();
                e.kind = parse_event_kind(row.at("kind").get<std::string>());
                e.detail = row.value("detail", std::string());
            } catch (const nlohmann::json::exception& ex) {
                throw Error(ErrorKind::SchemaMismatch,
                            "event row missing field: " + std::string(ex.what()));
            }
            log.events.push_back(e);
        }
    }
    return log;
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << report_to_json(report).dump(2) << "\n";
}

}  // namespace teamtrack
