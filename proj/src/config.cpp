#include "picrr/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "picrr/error.hpp"

namespace picrr {

using nlohmann::json;

void RunConfig::validate() const
{
    schedule.validate();
    breathing.validate();
    canny.validate();
    if (canonical_len < 2) throw Error("canonical_len must be >= 2");
    if (!(geometry.k_w > 0.0 && geometry.k_h > 0.0)) throw Error("ROI geometry constants must be positive");
    if (fixed_roi && (fixed_roi->w < kMinRoiSide || fixed_roi->h < kMinRoiSide)) {
        throw Error("fixed_roi must be at least 8x8");
    }
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

RunConfig apply_config_json(RunConfig cfg, std::string_view json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object()) throw Error("config must be a JSON object");

    static const char* known[] = {"window_s", "step_s", "reest_s", "reest_shift_px", "top_frac", "group_frac", "smooth_s", "rr_min",
                                  "rr_max", "prominence_factor", "min_peaks", "cycles_per_peak", "sigma", "low", "high",
                                  "dilation_radius", "k_w", "k_top", "k_h", "profile_mode", "canonical_len",
                                  "fixed_roi", "video", "landmarks"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw Error("unknown config key '" + key + "'");
        }
    }

    try {
        take(j, "window_s", cfg.schedule.window_s);
        take(j, "step_s", cfg.schedule.step_s);
        take(j, "reest_s", cfg.schedule.reest_s);
        take(j, "reest_shift_px", cfg.schedule.reest_shift_px);
        take(j, "top_frac", cfg.breathing.top_frac);
        take(j, "group_frac", cfg.breathing.group_frac);
        take(j, "smooth_s", cfg.breathing.smooth_s);
        take(j, "rr_min", cfg.breathing.rr_min);
        take(j, "rr_max", cfg.breathing.rr_max);
        take(j, "prominence_factor", cfg.breathing.prominence_factor);
        take(j, "min_peaks", cfg.breathing.min_peaks);
        take(j, "cycles_per_peak", cfg.breathing.cycles_per_peak);
        take(j, "sigma", cfg.canny.sigma);
        take(j, "low", cfg.canny.low);
        take(j, "high", cfg.canny.high);
        take(j, "dilation_radius", cfg.canny.dilation_radius);
        take(j, "k_w", cfg.geometry.k_w);
        take(j, "k_top", cfg.geometry.k_top);
        take(j, "k_h", cfg.geometry.k_h);
        if (j.contains("profile_mode")) cfg.profile_mode = parse_profile_mode(j["profile_mode"].get<std::string>());
        take(j, "canonical_len", cfg.canonical_len);
        if (j.contains("fixed_roi")) {
            const auto& r = j["fixed_roi"];
            if (r.is_null()) {
                cfg.fixed_roi.reset();
            } else {
                if (!r.is_array() || r.size() != 4) throw Error("fixed_roi must be [x, y, w, h]");
                cfg.fixed_roi = RoiRect{r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()};
            }
        }
        take(j, "video", cfg.video);
        take(j, "landmarks", cfg.landmarks);
    } catch (const json::exception& e) {
        throw Error(std::string("bad config value: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return apply_config_json(std::move(base), ss.str());
}

std::string dump_run_config(const RunConfig& cfg)
{
    nlohmann::ordered_json j;
    j["window_s"] = cfg.schedule.window_s;
    j["step_s"] = cfg.schedule.step_s;
    j["reest_s"] = cfg.schedule.reest_s;
    j["reest_shift_px"] = cfg.schedule.reest_shift_px;
    j["top_frac"] = cfg.breathing.top_frac;
    j["group_frac"] = cfg.breathing.group_frac;
    j["smooth_s"] = cfg.breathing.smooth_s;
    j["rr_min"] = cfg.breathing.rr_min;
    j["rr_max"] = cfg.breathing.rr_max;
    j["prominence_factor"] = cfg.breathing.prominence_factor;
    j["min_peaks"] = cfg.breathing.min_peaks;
    j["cycles_per_peak"] = cfg.breathing.cycles_per_peak;
    j["sigma"] = cfg.canny.sigma;
    j["low"] = cfg.canny.low;
    j["high"] = cfg.canny.high;
    j["dilation_radius"] = cfg.canny.dilation_radius;
    j["k_w"] = cfg.geometry.k_w;
    j["k_top"] = cfg.geometry.k_top;
    j["k_h"] = cfg.geometry.k_h;
    j["profile_mode"] = std::string(to_string(cfg.profile_mode));
    j["canonical_len"] = cfg.canonical_len;
    if (cfg.fixed_roi) {
        j["fixed_roi"] = {cfg.fixed_roi->x, cfg.fixed_roi->y, cfg.fixed_roi->w, cfg.fixed_roi->h};
    } else {
        j["fixed_roi"] = nullptr;
    }
    j["video"] = cfg.video;
    j["landmarks"] = cfg.landmarks;
    return j.dump(2) + "\n";
}

}  // namespace picrr
