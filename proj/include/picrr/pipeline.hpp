#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "picrr/breathing.hpp"
#include "picrr/config.hpp"
#include "picrr/ingest.hpp"

namespace picrr {

/// Where the ROI comes from at each re-estimation: a fixed rectangle or a landmark track.
using RoiSource = std::variant<RoiRect, LandmarkTrack>;

/// fixed_roi when set, otherwise the landmark CSV named by cfg.landmarks.
RoiSource roi_source_from_config(const RunConfig& cfg);

struct LatencySummary {
    std::size_t count = 0;
    double p50_ms = 0.0;
    double p99_ms = 0.0;
    double max_ms = 0.0;
};

/// Nearest-rank percentiles.
LatencySummary summarize_latency(std::vector<double> samples_ms);

/**
 * Streaming estimator: frames in, one WindowAnalysis per step once the window
 * is full. Re-estimates ROI and edge mask on the schedule, stitches epochs in
 * the sliding window and times every stage.
 */
class Pipeline {
public:
    Pipeline(RunConfig cfg, VideoMeta meta, RoiSource roi_source);

    std::optional<WindowAnalysis> push_frame(const FrameBuffer& frame);

    int epoch() const { return epoch_; }
    /// Re-estimations triggered by landmark motion rather than the schedule.
    int shift_reestimations() const { return shift_reestimations_; }
    const RoiRect& roi() const { return roi_; }
    const EdgeMask& mask() const { return mask_; }
    /// Epochs whose edge mask came out empty and fell back to full-ROI rows.
    int mask_fallbacks() const { return mask_fallbacks_; }
    const SlidingWindow& window() const { return window_; }

    /// Profile extraction + window push, per frame.
    const std::vector<double>& frame_times_ms() const { return frame_ms_; }
    /// Window analysis, per emitted prediction.
    const std::vector<double>& window_times_ms() const { return window_ms_; }

private:
    void reestimate(const FrameBuffer& frame);
    bool landmarks_moved(int frame_index);

    RunConfig cfg_;
    VideoMeta meta_;
    RoiSource roi_source_;
    SlidingWindow window_;
    RoiRect roi_;
    EdgeMask mask_;
    bool use_mask_ = false;
    int epoch_ = -1;
    int mask_fallbacks_ = 0;
    int shift_reestimations_ = 0;
    int checked_record_ = -1;  // landmark record the current ROI was compared against
    std::vector<double> frame_ms_;
    std::vector<double> window_ms_;
};

struct RunResult {
    std::vector<RRPrediction> predictions;
    int frames = 0;
    int mask_fallbacks = 0;
    LatencySummary frame_latency;
    LatencySummary window_latency;
};

/// Drains `source` through a Pipeline; `on_prediction` sees each row as it is produced.
RunResult run_stream(FrameSource& source, const RunConfig& cfg, const RoiSource& roi_source,
                     const std::function<void(const RRPrediction&)>& on_prediction = {});

}  // namespace picrr
