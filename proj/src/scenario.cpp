#include "teamtrack/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "teamtrack/util.hpp"

namespace teamtrack {

namespace {

using ordered_json = nlohmann::ordered_json;

struct RectPx {
    int x0, y0, x1, y1;  // inclusive; empty when x1 < x0
    bool empty() const { return x1 < x0 || y1 < y0; }
};

RectPx body_rect(const PlayerSpec& p, const Vec2& center) {
    const int cx = static_cast<int>(center.x);
    const int cy = static_cast<int>(center.y);
    const int x0 = cx - p.body_w / 2;
    const int y0 = cy - p.body_h / 2;
    return RectPx{x0, y0, x0 + p.body_w - 1, y0 + p.body_h - 1};
}

RectPx clip(const RectPx& r, int w, int h) {
    return RectPx{std::max(r.x0, 0), std::max(r.y0, 0),
                  std::min(r.x1, w - 1), std::min(r.y1, h - 1)};
}

std::uint8_t shade(std::uint8_t base, int offset) {
    return static_cast<std::uint8_t>(std::clamp(static_cast<int>(base) + offset, 0, 255));
}

}  // namespace

Vec2 player_center_at(const PlayerSpec& player, int frame_idx) {
    const auto& wp = player.trajectory;
    if (wp.empty())
        throw Error(ErrorKind::InvalidArgument,
                    "player " + std::to_string(player.id) + " has no trajectory");
    double x, y;
    if (frame_idx <= wp.front().frame) {
        x = wp.front().x;
        y = wp.front().y;
    } else if (frame_idx >= wp.back().frame) {
        x = wp.back().x;
        y = wp.back().y;
    } else {
        std::size_t i = 1;
        while (wp[i].frame < frame_idx) ++i;
        const Waypoint& a = wp[i - 1];
        const Waypoint& b = wp[i];
        const double t = static_cast<double>(frame_idx - a.frame) / (b.frame - a.frame);
        x = a.x + (b.x - a.x) * t;
        y = a.y + (b.y - a.y) * t;
    }
    return Vec2{static_cast<double>(std::lround(x)), static_cast<double>(std::lround(y))};
}

RenderedFrame render_frame(const ScenarioSpec& spec, int frame_idx) {
    if (frame_idx < 0 || frame_idx >= spec.frame_count)
        throw Error(ErrorKind::OutOfBounds, "render_frame: frame index out of range");

    RenderedFrame out;
    out.frame = Frame::solid(spec.width, spec.height, spec.field.r, spec.field.g, spec.field.b);
    out.gt.resize(spec.players.size());

    std::vector<const PlayerSpec*> order;
    order.reserve(spec.players.size());
    for (const auto& p : spec.players) order.push_back(&p);
    std::sort(order.begin(), order.end(), [](const PlayerSpec* a, const PlayerSpec* b) {
        return a->depth != b->depth ? a->depth < b->depth : a->id < b->id;
    });

    // owner[pixel] = index into spec.players of the topmost player there
    std::vector<int> owner(static_cast<std::size_t>(spec.width) * spec.height, -1);

    for (const PlayerSpec* p : order) {
        const Vec2 c = player_center_at(*p, frame_idx);
        const RectPx full = body_rect(*p, c);
        const RectPx vis = clip(full, spec.width, spec.height);

        const std::size_t pi = static_cast<std::size_t>(p - spec.players.data());
        PlayerGt& gt = out.gt[pi];
        gt.team = p->team;
        gt.on_screen = !vis.empty();
        if (gt.on_screen)
            gt.bbox = BBox{vis.x0, vis.y0, vis.x1 - vis.x0, vis.y1 - vis.y0};

        if (vis.empty()) continue;
        const int jersey_rows = static_cast<int>(std::ceil(0.6 * p->body_h));
        for (int y = vis.y0; y <= vis.y1; ++y) {
            const int ly = y - full.y0;
            const Rgb& base = ly < jersey_rows ? p->jersey : p->shorts;
            for (int x = vis.x0; x <= vis.x1; ++x) {
                const int lx = x - full.x0;
                const int offset = ((lx / 4 + ly / 4) % 2 == 0) ? 12 : -12;
                out.frame.set_pixel(x, y, shade(base.r, offset), shade(base.g, offset),
                                    shade(base.b, offset));
                owner[static_cast<std::size_t>(y) * spec.width + x] = static_cast<int>(pi);
            }
        }
    }

    // visible fraction: pixels the player actually owns over its full body area
    std::vector<long long> owned(spec.players.size(), 0);
    for (int v : owner)
        if (v >= 0) ++owned[v];
    for (std::size_t i = 0; i < spec.players.size(); ++i) {
        const auto& p = spec.players[i];
        out.gt[i].visible =
            static_cast<double>(owned[i]) / (static_cast<double>(p.body_w) * p.body_h);
    }
    return out;
}

Mask GroundTruth::silhouette(int frame, int player, int width, int height) const {
    Mask m(width, height);
    const PlayerGt& gt = per_frame[frame][player];
    if (!gt.on_screen) return m;
    for (int y = gt.bbox.y; y <= gt.bbox.bottom(); ++y)
        for (int x = gt.bbox.x; x <= gt.bbox.right(); ++x) m.set(x, y);
    return m;
}

std::optional<int> GroundTruth::resolve_point(int frame, int x, int y) const {
    std::optional<int> best;
    double best_visible = -1.0;
    for (int p = 0; p < player_count; ++p) {
        const PlayerGt& gt = per_frame[frame][p];
        if (!gt.on_screen || !gt.bbox.contains(x, y)) continue;
        if (gt.visible > best_visible) {
            best_visible = gt.visible;
            best = p;
        }
    }
    return best;
}

GroundTruth generate(const ScenarioSpec& spec, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir))
        throw Error(ErrorKind::Io, "generate: cannot create output directory " + out_dir.string());

    std::vector<RenderedFrame> rendered(spec.frame_count);
    parallel_for(spec.frame_count, [&](int i) { rendered[i] = render_frame(spec, i); });

    GroundTruth gt;
    gt.frame_count = spec.frame_count;
    gt.player_count = static_cast<int>(spec.players.size());
    gt.per_frame.reserve(spec.frame_count);
    for (int i = 0; i < spec.frame_count; ++i) {
        save_ppm(rendered[i].frame, out_dir / frame_file_name(i));
        gt.per_frame.push_back(std::move(rendered[i].gt));
    }

    ordered_json meta;
    meta["fps"] = spec.fps;
    meta["width"] = spec.width;
    meta["height"] = spec.height;
    meta["frames"] = spec.frame_count;
    std::ofstream meta_out(out_dir / "seq.json");
    meta_out << meta.dump(2) << "\n";

    save_ground_truth(gt, out_dir / "gt.jsonl");
    save_scenario_spec(spec, out_dir / "scenario.json");
    return gt;
}

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    for (int f = 0; f < gt.frame_count; ++f) {
        for (int p = 0; p < gt.player_count; ++p) {
            const PlayerGt& e = gt.per_frame[f][p];
            ordered_json row;
            row["frame"] = f;
            row["player"] = p;
            row["team"] = team_label_name(e.team);
            if (e.on_screen)
                row["bbox"] = {e.bbox.x, e.bbox.y, e.bbox.w, e.bbox.h};
            else
                row["bbox"] = nullptr;
            row["visible"] = e.visible;
            row["on_screen"] = e.on_screen;
            out << row.dump() << "\n";
        }
    }
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open ground truth " + path.string());
    GroundTruth gt;
    std::string line;
    int max_frame = -1, max_player = -1;
    std::vector<std::tuple<int, int, PlayerGt>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json row = nlohmann::json::parse(line);
        const int f = row.at("frame").get<int>();
        const int p = row.at("player").get<int>();
        PlayerGt e;
        e.team = parse_team_label(row.at("team").get<std::string>());
        e.visible = row.at("visible").get<double>();
        e.on_screen = row.at("on_screen").get<bool>();
        if (e.on_screen) {
            const auto& b = row.at("bbox");
            e.bbox = BBox{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                          b.at(3).get<int>()};
        }
        max_frame = std::max(max_frame, f);
        max_player = std::max(max_player, p);
        rows.emplace_back(f, p, e);
    }
    if (rows.empty())
        throw Error(ErrorKind::SchemaMismatch, "ground truth file has no rows: " + path.string());
    gt.frame_count = max_frame + 1;
    gt.player_count = max_player + 1;
    gt.per_frame.assign(gt.frame_count, std::vector<PlayerGt>(gt.player_count));
    for (const auto& [f, p, e] : rows) gt.per_frame[f][p] = e;
    return gt;
}

namespace {

ordered_json rgb_json(const Rgb& c) { return ordered_json{c.r, c.g, c.b}; }

Rgb rgb_from_json(const nlohmann::json& j) {
    return Rgb{j.at(0).get<std::uint8_t>(), j.at(1).get<std::uint8_t>(),
               j.at(2).get<std::uint8_t>()};
}

}  // namespace

void save_scenario_spec(const ScenarioSpec& spec, const std::filesystem::path& path) {
    ordered_json j;
    j["name"] = spec.name;
    j["frame_count"] = spec.frame_count;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["fps"] = spec.fps;
    j["field_color"] = rgb_json(spec.field);
    j["players"] = ordered_json::array();
    for (const auto& p : spec.players) {
        ordered_json pj;
        pj["id"] = p.id;
        pj["team"] = team_label_name(p.team);
        pj["jersey"] = rgb_json(p.jersey);
        pj["shorts"] = rgb_json(p.shorts);
        pj["size"] = {p.body_w, p.body_h};
        pj["depth"] = p.depth;
        pj["trajectory"] = ordered_json::array();
        for (const auto& w : p.trajectory)
            pj["trajectory"].push_back({{"frame", w.frame}, {"x", w.x}, {"y", w.y}});
        j["players"].push_back(std::move(pj));
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open scenario spec " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, "invalid scenario spec JSON: " + std::string(e.what()));
    }
    ScenarioSpec spec;
    try {
        spec.name = j.at("name").get<std::string>();
        spec.frame_count = j.at("frame_count").get<int>();
        spec.width = j.at("width").get<int>();
        spec.height = j.at("height").get<int>();
        if (j.contains("fps")) spec.fps = j.at("fps").get<double>();
        spec.field = rgb_from_json(j.at("field_color"));
        for (const auto& pj : j.at("players")) {
            PlayerSpec p;
            p.id = pj.at("id").get<int>();
            p.team = parse_team_label(pj.at("team").get<std::string>());
            p.jersey = rgb_from_json(pj.at("jersey"));
            p.shorts = rgb_from_json(pj.at("shorts"));
            p.body_w = pj.at("size").at(0).get<int>();
            p.body_h = pj.at("size").at(1).get<int>();
            p.depth = pj.at("depth").get<int>();
            for (const auto& wj : pj.at("trajectory"))
                p.trajectory.push_back(Waypoint{wj.at("frame").get<int>(),
                                                wj.at("x").get<double>(),
                                                wj.at("y").get<double>()});
            spec.players.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, "scenario spec missing field: " + std::string(e.what()));
    }
    validate_scenario_spec(spec);
    return spec;
}

void validate_scenario_spec(const ScenarioSpec& spec) {
    if (spec.frame_count < 2)
        throw Error(ErrorKind::InvalidArgument, "scenario needs at least 2 frames");
    if (spec.width < 1 || spec.height < 1)
        throw Error(ErrorKind::InvalidArgument, "scenario has empty dimensions");
    for (const auto& p : spec.players) {
        if (p.body_w < 12 || p.body_h < 24)
            throw Error(ErrorKind::InvalidArgument,
                        "player " + std::to_string(p.id) + " body smaller than 12x24");
        if (p.trajectory.empty())
            throw Error(ErrorKind::InvalidArgument,
                        "player " + std::to_string(p.id) + " has no trajectory");
        for (std::size_t i = 1; i < p.trajectory.size(); ++i)
            if (p.trajectory[i].frame <= p.trajectory[i - 1].frame)
                throw Error(ErrorKind::InvalidArgument,
                            "player " + std::to_string(p.id) +
                                " waypoint frames not strictly increasing");
    }
}

std::vector<std::string> scenario_preset_names() { return {"light", "heavy", "longterm"}; }

namespace {

PlayerSpec make_player(int id, TeamLabel team, Rgb jersey, Rgb shorts, int w, int h,
                       int depth, std::vector<Waypoint> traj) {
    PlayerSpec p;
    p.id = id;
    p.team = team;
    p.jersey = jersey;
    p.shorts = shorts;
    p.body_w = w;
    p.body_h = h;
    p.depth = depth;
    p.trajectory = std::move(traj);
    return p;
}

const Rgb kRedJersey{200, 40, 40};
const Rgb kGreenJersey{80, 170, 90};
const Rgb kWhiteShorts{235, 235, 235};
const Rgb kBlueShorts{30, 30, 120};

// Two players crossing with a shallow (~25%) partial overlap near mid-run.
ScenarioSpec light_preset() {
    ScenarioSpec s;
    s.name = "light";
    s.frame_count = 125;
    s.width = 320;
    s.height = 180;
    s.players.push_back(make_player(0, TeamLabel::Team1, kRedJersey, kWhiteShorts, 16, 32, 0,
                                    {{0, 60, 86}, {124, 246, 86}}));
    s.players.push_back(make_player(1, TeamLabel::Team2, kGreenJersey, kBlueShorts, 16, 32, 1,
                                    {{0, 246, 110}, {124, 60, 110}}));
    return s;
}

// Six players in a penalty-box cluster. Player 2 (red) passes fully behind the
// wider static player 3 (green decoy) for exactly 12 frames.
ScenarioSpec heavy_preset() {
    ScenarioSpec s;
    s.name = "heavy";
    s.frame_count = 250;
    s.width = 352;
    s.height = 198;
    s.players.push_back(make_player(0, TeamLabel::Team1, kRedJersey, kWhiteShorts, 16, 32, 0,
                                    {{0, 80, 50}, {249, 140, 60}}));
    s.players.push_back(make_player(1, TeamLabel::Team2, kGreenJersey, kBlueShorts, 16, 32, 1,
                                    {{0, 250, 40}, {249, 200, 55}}));
    s.players.push_back(make_player(2, TeamLabel::Team1, kRedJersey, kWhiteShorts, 16, 32, 2,
                                    {{0, 36, 100}, {120, 276, 100}, {249, 300, 100}}));
    s.players.push_back(make_player(3, TeamLabel::Team2, kGreenJersey, kBlueShorts, 39, 44, 3,
                                    {{0, 163, 102}}));
    s.players.push_back(make_player(4, TeamLabel::Team1, kRedJersey, kWhiteShorts, 16, 32, 4,
                                    {{0, 100, 160}, {249, 150, 150}}));
    s.players.push_back(make_player(5, TeamLabel::Team2, kGreenJersey, kBlueShorts, 16, 32, 5,
                                    {{0, 280, 150}, {249, 230, 145}}));
    return s;
}

// Player 0 walks off the left edge, stays out for exactly 15 frames
// (29..43) and walks back in; player 1 stands far away on the right.
ScenarioSpec longterm_preset() {
    ScenarioSpec s;
    s.name = "longterm";
    s.frame_count = 100;
    s.width = 320;
    s.height = 180;
    s.players.push_back(make_player(0, TeamLabel::Team1, kRedJersey, kWhiteShorts, 16, 32, 0,
                                    {{0, 108, 90}, {29, -8, 90}, {43, -8, 90}, {44, -7, 90}, {99, 103, 90}}));
    s.players.push_back(make_player(1, TeamLabel::Team2, kGreenJersey, kBlueShorts, 16, 32, 1,
                                    {{0, 250, 90}}));
    return s;
}

}  // namespace

ScenarioSpec scenario_preset(const std::string& name) {
    if (name == "light") return light_preset();
    if (name == "heavy") return heavy_preset();
    if (name == "longterm") return longterm_preset();
    throw Error(ErrorKind::InvalidArgument,
                "unknown preset '" + name + "' (valid: light, heavy, longterm)");
}

}  // namespace teamtrack
