#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "picrr/breathing.hpp"
#include "picrr/config.hpp"
#include "picrr/profile.hpp"
#include "picrr/roi.hpp"

namespace picrr {

/// Step-hold reference series read from a `t,rr_bpm` CSV.
class GroundTruth {
public:
    static GroundTruth load(const std::filesystem::path& path);
    static GroundTruth from_points(std::vector<std::pair<double, double>> points);

    /// Value of the last point with time <= t; throws before the first point.
    double at(double t) const;
    const std::vector<std::pair<double, double>>& points() const { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
};

inline constexpr double kSuccessBoundBpm = 2.0;

struct EvalMetrics {
    double mae = 0.0;
    double sr2 = 0.0;  // percent of valid predictions with |error| <= 2 BPM
    int n = 0;
    int invalid_count = 0;
};

struct Score {
    std::optional<EvalMetrics> metrics;  // absent when nothing was valid
    int invalid_count = 0;
};

Score score(std::span<const RRPrediction> predictions, const GroundTruth& truth);

/// Share of windows whose winning group index is >= 2.
double group_rank_stats(std::span<const int> winners);
std::optional<double> group_rank_stats(std::span<const RRPrediction> predictions);

struct Recording {
    std::filesystem::path video;
    std::filesystem::path ground_truth;
    std::optional<std::filesystem::path> landmarks;
    std::optional<RoiRect> fixed_roi;
};

/// JSON list of {video_path, ground_truth_path, landmarks_path | fixed_roi};
/// relative paths resolve against the manifest's directory.
std::vector<Recording> load_dataset_manifest(const std::filesystem::path& path);

struct AblationCell {
    ProfileMode mode = ProfileMode::Edges;
    double fraction = 0.30;  // top share of motion signals
};

/// The four default cells: {full_roi, edges} x {0.05, 0.30}.
std::vector<AblationCell> default_ablation_cells();
AblationCell parse_ablation_cell(const std::string& text);

/// Run configuration of a cell: fraction 0.05 degenerates to a single top-5% group.
RunConfig cell_config(const RunConfig& base, const AblationCell& cell);

struct AblationRow {
    AblationCell cell;
    Score score;
    std::optional<double> group_gt1_share;
    std::vector<RRPrediction> predictions;
    int failed_recordings = 0;
    bool failed() const { return failed_recordings > 0; }
};

struct AblationResult {
    std::vector<AblationRow> rows;
    std::vector<std::string> errors;  // one per failed recording
};

/// Each recording is decoded once and fed to every cell's pipeline.
AblationResult ablation(std::span<const Recording> recordings, const RunConfig& base,
                        std::span<const AblationCell> cells);

std::string format_ablation_csv(const std::string& dataset, const AblationResult& result);

}  // namespace picrr
