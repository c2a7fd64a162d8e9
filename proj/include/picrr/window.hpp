#pragma once

#include <span>
#include <vector>

#include "picrr/profile.hpp"

namespace picrr {

struct ScheduleConfig {
    double window_s = 20.0;
    double step_s = 1.0;
    double reest_s = 20.0;
    // Re-estimate early when the landmark ROI moves by at least this many pixels; 0 disables.
    double reest_shift_px = 4.0;

    void validate() const;
};

/// Frame counts derived from a schedule at a given frame rate.
struct ScheduleFrames {
    int window = 0;   // N = round(window_s * fps)
    int step = 0;     // round(step_s * fps)
    int reestimate = 0;

    static ScheduleFrames from(const ScheduleConfig& cfg, double fps);
};

/// True on frame 0 and every reest_s*fps frames after it.
bool schedule_reestimation(int frame_index, const ScheduleFrames& frames);

/// Immutable L x N snapshot of the motion signals, columns oldest to newest.
struct MotionWindow {
    int rows = 0;  // L
    int cols = 0;  // N
    double fs = 0.0;
    int end_frame = 0;
    std::vector<double> values;  // row-major

    std::span<const double> row(int i) const
    {
        return {values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols), static_cast<std::size_t>(cols)};
    }
    /// Window end time in seconds, (end_frame + 1) / fs.
    double end_time() const { return (end_frame + 1) / fs; }
};

/// offset[i] = new_first[i] - prev_last[i].
std::vector<double> stitch_offsets(std::span<const double> prev_last, std::span<const double> new_first);

/**
 * Ring buffer of the last N stitched profile columns.
 *
 * When a profile arrives from a new epoch, each row gets a running offset so
 * the stored signal continues from the previous column; stored columns are
 * never rewritten.
 */
class SlidingWindow {
public:
    SlidingWindow(int profile_length, double fps, const ScheduleConfig& cfg);

    /// Appends a column; returns true when a window is ready at this frame.
    bool push(const Profile1D& profile);

    MotionWindow snapshot() const;

    int length() const { return length_; }
    const ScheduleFrames& frames() const { return frames_; }
    int pushed() const { return pushed_; }
    const std::vector<double>& offsets() const { return offsets_; }

private:
    int length_;
    double fps_;
    ScheduleFrames frames_;
    std::vector<double> ring_;  // column-major, frames_.window columns
    std::vector<double> offsets_;
    int head_ = 0;  // slot for the next column
    int pushed_ = 0;
    int last_frame_ = -1;
    int epoch_ = 0;
};

}  // namespace picrr
