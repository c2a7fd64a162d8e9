#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "picrr/breathing.hpp"
#include "picrr/edges.hpp"
#include "picrr/profile.hpp"
#include "picrr/roi.hpp"
#include "picrr/window.hpp"

namespace picrr {

/// Every tunable of a run. Config files are flat JSON objects whose keys are
/// the field names below; see README for the full list.
struct RunConfig {
    ScheduleConfig schedule;
    BreathingConfig breathing;
    CannyConfig canny;
    RoiGeometryConfig geometry;
    ProfileMode profile_mode = ProfileMode::Edges;
    int canonical_len = 100;
    std::optional<RoiRect> fixed_roi;
    std::string video;
    std::string landmarks;

    void validate() const;
};

/// Overlays the keys of a flat JSON object onto `base`. Unknown keys throw.
RunConfig apply_config_json(RunConfig base, std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
/// Pretty JSON with every key; parsing it back gives an identical RunConfig.
std::string dump_run_config(const RunConfig& cfg);

}  // namespace picrr
