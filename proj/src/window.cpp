#include "picrr/window.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "picrr/error.hpp"

namespace picrr {

void ScheduleConfig::validate() const
{
    if (!(step_s > 0.0)) throw Error("step_s must be positive");
    if (!(window_s >= 2.0 * step_s)) throw Error("window_s must be at least 2*step_s");
    if (!(reest_s > 0.0)) throw Error("reest_s must be positive");
    if (!(reest_shift_px >= 0.0)) throw Error("reest_shift_px must be >= 0");
}

ScheduleFrames ScheduleFrames::from(const ScheduleConfig& cfg, double fps)
{
    cfg.validate();
    if (!(fps > 0.0)) throw Error("fps must be positive");
    auto frames = [fps](double seconds) { return std::max(1, static_cast<int>(std::lround(seconds * fps))); };
    return {frames(cfg.window_s), frames(cfg.step_s), frames(cfg.reest_s)};
}

bool schedule_reestimation(int frame_index, const ScheduleFrames& frames)
{
    return frame_index >= 0 && frame_index % frames.reestimate == 0;
}

std::vector<double> stitch_offsets(std::span<const double> prev_last, std::span<const double> new_first)
{
    if (prev_last.size() != new_first.size()) throw Error("stitching columns differ in length");
    std::vector<double> off(new_first.size());
    for (std::size_t i = 0; i < off.size(); ++i) off[i] = new_first[i] - prev_last[i];
    return off;
}

SlidingWindow::SlidingWindow(int profile_length, double fps, const ScheduleConfig& cfg)
    : length_(profile_length), fps_(fps), frames_(ScheduleFrames::from(cfg, fps))
{
    if (profile_length < 2) throw Error("profile length must be >= 2");
    ring_.assign(static_cast<std::size_t>(length_) * static_cast<std::size_t>(frames_.window), 0.0);
    offsets_.assign(static_cast<std::size_t>(length_), 0.0);
}

bool SlidingWindow::push(const Profile1D& p)
{
    if (static_cast<int>(p.values.size()) != length_) {
        throw Error("profile length " + std::to_string(p.values.size()) + " differs from window length " +
                    std::to_string(length_));
    }
    if (last_frame_ >= 0 && p.frame != last_frame_ + 1) {
        throw Error("out-of-order profile: frame " + std::to_string(p.frame) + " after " + std::to_string(last_frame_));
    }
    for (double v : p.values) {
        if (!std::isfinite(v)) throw Error("non-finite profile value");
    }

    const auto L = static_cast<std::size_t>(length_);
    if (pushed_ > 0 && p.epoch != epoch_) {
        const int prev_slot = (head_ + frames_.window - 1) % frames_.window;
        std::span<const double> prev_last(ring_.data() + static_cast<std::size_t>(prev_slot) * L, L);
        offsets_ = stitch_offsets(prev_last, p.values);
    }
    epoch_ = p.epoch;

    double* col = ring_.data() + static_cast<std::size_t>(head_) * L;
    for (std::size_t i = 0; i < L; ++i) col[i] = p.values[i] - offsets_[i];
    head_ = (head_ + 1) % frames_.window;
    ++pushed_;
    last_frame_ = p.frame;

    return pushed_ >= frames_.window && (pushed_ - frames_.window) % frames_.step == 0;
}

MotionWindow SlidingWindow::snapshot() const
{
    if (pushed_ < frames_.window) throw Error("window not yet full");
    MotionWindow w;
    w.rows = length_;
    w.cols = frames_.window;
    w.fs = fps_;
    w.end_frame = last_frame_;
    w.values.resize(static_cast<std::size_t>(w.rows) * static_cast<std::size_t>(w.cols));
    const auto L = static_cast<std::size_t>(length_);
    // head_ is the oldest slot once the ring is full.
    for (int c = 0; c < w.cols; ++c) {
        const auto slot = static_cast<std::size_t>((head_ + c) % frames_.window);
        for (std::size_t i = 0; i < L; ++i) {
            w.values[i * static_cast<std::size_t>(w.cols) + static_cast<std::size_t>(c)] = ring_[slot * L + i];
        }
    }
    return w;
}

}  // namespace picrr
