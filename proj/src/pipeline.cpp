#include "picrr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "picrr/error.hpp"

namespace picrr {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

RoiSource roi_source_from_config(const RunConfig& cfg)
{
    if (cfg.fixed_roi) return *cfg.fixed_roi;
    if (cfg.landmarks.empty()) throw Error("need either landmarks or fixed_roi");
    return LandmarkTrack::load(cfg.landmarks);
}

LatencySummary summarize_latency(std::vector<double> samples)
{
    LatencySummary s;
    s.count = samples.size();
    if (samples.empty()) return s;
    std::sort(samples.begin(), samples.end());
    auto rank = [&](double q) {
        auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
        return samples[std::clamp<std::size_t>(k, 1, samples.size()) - 1];
    };
    s.p50_ms = rank(0.50);
    s.p99_ms = rank(0.99);
    s.max_ms = samples.back();
    return s;
}

Pipeline::Pipeline(RunConfig cfg, VideoMeta meta, RoiSource roi_source)
    : cfg_(std::move(cfg)), meta_(meta), roi_source_(std::move(roi_source)),
      window_(cfg_.canonical_len, meta_.fps, cfg_.schedule)
{
    cfg_.validate();
    meta_.validate();
}

void Pipeline::reestimate(const FrameBuffer& frame)
{
    if (const auto* fixed = std::get_if<RoiRect>(&roi_source_)) {
        roi_ = clamp_roi(*fixed, meta_);
    } else {
        const auto& track = std::get<LandmarkTrack>(roi_source_);
        const LandmarkSet& lm = track.lookup(frame.index);
        roi_ = roi_from_landmarks(lm, meta_, cfg_.geometry);
        checked_record_ = lm.frame_index;
    }
    ++epoch_;
    use_mask_ = false;
    if (cfg_.profile_mode == ProfileMode::Edges) {
        mask_ = dilate(canny(crop_grayscale(frame, roi_), cfg_.canny), cfg_.canny.dilation_radius);
        use_mask_ = !mask_.none();
        if (!use_mask_) ++mask_fallbacks_;
    }
}

// Between scheduled re-estimations, a new landmark record whose ROI has moved
// far enough starts a new epoch right away instead of leaving a stale ROI.
bool Pipeline::landmarks_moved(int frame_index)
{
    const auto* track = std::get_if<LandmarkTrack>(&roi_source_);
    if (!track || cfg_.schedule.reest_shift_px <= 0.0) return false;
    const LandmarkSet& lm = track->lookup(frame_index);
    if (lm.frame_index == checked_record_) return false;
    checked_record_ = lm.frame_index;
    const RoiRect next = roi_from_landmarks(lm, meta_, cfg_.geometry);
    const int shift = std::max({std::abs(next.x - roi_.x), std::abs(next.y - roi_.y),
                                std::abs(next.x + next.w - roi_.x - roi_.w), std::abs(next.y + next.h - roi_.y - roi_.h)});
    return shift >= cfg_.schedule.reest_shift_px;
}

std::optional<WindowAnalysis> Pipeline::push_frame(const FrameBuffer& frame)
{
    if (frame.meta.width != meta_.width || frame.meta.height != meta_.height ||
        frame.meta.pixel_format != meta_.pixel_format) {
        throw Error("frame " + std::to_string(frame.index) + " does not match the stream geometry");
    }
    const auto t0 = Clock::now();
    if (epoch_ < 0 || schedule_reestimation(frame.index, window_.frames())) {
        reestimate(frame);
    } else if (landmarks_moved(frame.index)) {
        ++shift_reestimations_;
        reestimate(frame);
    }

    const GrayImage gray = crop_grayscale(frame, roi_);
    const std::vector<double> raw = use_mask_ ? edges_profile(gray, mask_).values : full_roi_profile(gray);
    Profile1D profile{resample_profile(raw, cfg_.canonical_len), epoch_, frame.index};
    const bool ready = window_.push(profile);
    frame_ms_.push_back(elapsed_ms(t0));
    if (!ready) return std::nullopt;

    const auto t1 = Clock::now();
    const MotionWindow snapshot = window_.snapshot();
    WindowAnalysis analysis = analyze_window(snapshot, cfg_.breathing);
    window_ms_.push_back(elapsed_ms(t1));
    return analysis;
}

RunResult run_stream(FrameSource& source, const RunConfig& cfg, const RoiSource& roi_source,
                     const std::function<void(const RRPrediction&)>& on_prediction)
{
    Pipeline pipeline(cfg, source.meta(), roi_source);
    RunResult result;
    while (auto frame = source.next()) {
        ++result.frames;
        if (auto analysis = pipeline.push_frame(*frame)) {
            result.predictions.push_back(analysis->prediction);
            if (on_prediction) on_prediction(analysis->prediction);
        }
    }
    result.mask_fallbacks = pipeline.mask_fallbacks();
    result.frame_latency = summarize_latency(pipeline.frame_times_ms());
    result.window_latency = summarize_latency(pipeline.window_times_ms());
    return result;
}

}  // namespace picrr
