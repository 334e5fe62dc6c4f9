#include "teamtrack/run_config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "teamtrack/util.hpp"

namespace teamtrack {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key))
            throw Error(ErrorKind::SchemaMismatch,
                        "unknown key \"" + key + "\" in " + where);
}

double num(const json& obj, const char* key, double fallback) {
    return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

int integer(const json& obj, const char* key, int fallback) {
    return obj.contains(key) ? obj.at(key).get<int>() : fallback;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, "invalid config JSON: " + std::string(e.what()));
    }
    if (!j.is_object())
        throw Error(ErrorKind::SchemaMismatch, "config must be a JSON object");
    reject_unknown(j, {"scenario", "prompts", "thresholds", "recovery", "segmenter",
                       "tracker", "output_dir", "seed"},
                   "config");

    RunConfig cfg;
    try {
        cfg.scenario = j.at("scenario").get<std::string>();
        for (const auto& pj : j.at("prompts")) {
            reject_unknown(pj, {"x", "y", "team"}, "prompt");
            cfg.prompts.push_back(PointPrompt{pj.at("x").get<int>(), pj.at("y").get<int>(),
                                              parse_team_label(pj.at("team").get<std::string>())});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, "config missing field: " + std::string(e.what()));
    }
    if (cfg.prompts.empty())
        throw Error(ErrorKind::SchemaMismatch, "config needs at least one prompt");

    if (j.contains("thresholds")) {
        const auto& t = j["thresholds"];
        reject_unknown(t, {"confidence", "area_change", "position_change"}, "thresholds");
        cfg.pipeline.thresholds.confidence = num(t, "confidence", 0.3);
        cfg.pipeline.thresholds.area_change = num(t, "area_change", 0.5);
        cfg.pipeline.thresholds.position_change = num(t, "position_change", 1.0);
    }
    if (j.contains("recovery")) {
        const auto& r = j["recovery"];
        reject_unknown(r, {"loss_frames", "interval", "similarity_threshold", "grid_spacing"},
                       "recovery");
        cfg.pipeline.recovery.loss_frames = integer(r, "loss_frames", 10);
        cfg.pipeline.recovery.interval = integer(r, "interval", 10);
        cfg.pipeline.recovery.similarity_threshold = num(r, "similarity_threshold", 0.6);
        cfg.pipeline.recovery.grid_spacing = num(r, "grid_spacing", 0.5);
    }
    if (j.contains("segmenter")) {
        const auto& s = j["segmenter"];
        reject_unknown(s, {"implementation", "perturbation_radius"}, "segmenter");
        if (s.contains("implementation"))
            cfg.segmenter.implementation = s.at("implementation").get<std::string>();
        cfg.segmenter.perturbation_radius = integer(s, "perturbation_radius", 2);
    }
    if (j.contains("tracker")) {
        const auto& t = j["tracker"];
        reject_unknown(t,
                       {"template_size", "search_scale", "learning_rate", "response_sigma",
                        "regularization", "update_confidence"},
                       "tracker");
        cfg.pipeline.tracker.template_size = integer(t, "template_size", 32);
        cfg.pipeline.tracker.search_scale = num(t, "search_scale", 2.0);
        cfg.pipeline.tracker.learning_rate = num(t, "learning_rate", 0.125);
        cfg.pipeline.tracker.response_sigma = num(t, "response_sigma", 2.0);
        cfg.pipeline.tracker.regularization = num(t, "regularization", 1e-3);
        cfg.pipeline.tracker.update_confidence = num(t, "update_confidence", 0.3);
    }
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<unsigned>();

    if (cfg.pipeline.recovery.loss_frames < 1 || cfg.pipeline.recovery.interval < 1)
        throw Error(ErrorKind::SchemaMismatch, "recovery frames/interval must be >= 1");
    if (cfg.pipeline.recovery.similarity_threshold <= 0.0 ||
        cfg.pipeline.recovery.similarity_threshold >= 1.0)
        throw Error(ErrorKind::SchemaMismatch, "similarity_threshold must be in (0,1)");
    if (cfg.pipeline.thresholds.confidence <= 0.0 || cfg.pipeline.thresholds.area_change <= 0.0 ||
        cfg.pipeline.thresholds.position_change <= 0.0)
        throw Error(ErrorKind::SchemaMismatch, "thresholds must be positive");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_run_config(text);
}

std::string RunConfig::canonical_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["prompts"] = nlohmann::ordered_json::array();
    for (const auto& p : prompts)
        j["prompts"].push_back({{"x", p.x}, {"y", p.y}, {"team", team_label_name(p.team)}});
    j["thresholds"] = {{"confidence", pipeline.thresholds.confidence},
                       {"area_change", pipeline.thresholds.area_change},
                       {"position_change", pipeline.thresholds.position_change}};
    j["recovery"] = {{"loss_frames", pipeline.recovery.loss_frames},
                     {"interval", pipeline.recovery.interval},
                     {"similarity_threshold", pipeline.recovery.similarity_threshold},
                     {"grid_spacing", pipeline.recovery.grid_spacing}};
    j["segmenter"] = {{"implementation", segmenter.implementation},
                      {"perturbation_radius", segmenter.perturbation_radius}};
    j["tracker"] = {{"template_size", pipeline.tracker.template_size},
                    {"search_scale", pipeline.tracker.search_scale},
                    {"learning_rate", pipeline.tracker.learning_rate},
                    {"response_sigma", pipeline.tracker.response_sigma},
                    {"regularization", pipeline.tracker.regularization},
                    {"update_confidence", pipeline.tracker.update_confidence}};
    j["seed"] = seed;
    return j.dump();
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical_json()); }

}  // namespace teamtrack
