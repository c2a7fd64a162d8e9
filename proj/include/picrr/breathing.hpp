#pragma once

#include <optional>
#include <span>
#include <vector>

#include "picrr/window.hpp"

namespace picrr {

struct BreathingConfig {
    double top_frac = 0.30;    // share of motion signals kept, ranked by std
    double group_frac = 0.05;  // share per group; G = top_frac / group_frac
    double smooth_s = 0.4;     // moving-average span
    double rr_min = 6.0;       // BPM
    double rr_max = 45.0;      // BPM
    double prominence_factor = 0.3;  // minimum peak prominence, in units of wave std
    int min_peaks = 3;
    double cycles_per_peak = 1.0;  // breaths represented by one inter-peak interval

    int group_count() const;
    void validate() const;
};

/// Population mean / standard deviation, summed in index order.
double mean_of(std::span<const double> x);
double stddev_of(std::span<const double> x);

/// Subtracts the least-squares line a + b*t (t = sample index).
std::vector<double> detrend(std::span<const double> signal);

struct SignalGroup {
    std::vector<int> rows;                      // window rows, in rank order
    std::vector<std::vector<double>> signals;   // detrended
};

struct Grouping {
    std::vector<SignalGroup> groups;  // G entries; group 1 holds the highest std
    bool flat = false;                // every row had zero variance
};

/**
 * Detrends every row, ranks rows by std (descending, ties to the lower row),
 * keeps the top floor(L*top_frac) and splits them in rank order into G
 * contiguous groups of floor(L*group_frac). Flooring leftovers join no group.
 */
Grouping select_and_group(const MotionWindow& window, const BreathingConfig& cfg);

struct RespiratoryWave {
    std::vector<double> samples;
    double fs = 0.0;
    int group_index = 0;  // 1-based
};

/// Element-wise mean of the group's signals; nullopt for an empty group.
std::optional<RespiratoryWave> group_to_wave(const SignalGroup& group, double fs, int group_index);

/// round(smooth_s * fs), bumped to the next odd number.
int smoothing_width(double smooth_s, double fs);

/// Centred moving average of width k (odd); the window is truncated at the
/// ends and divided by the number of samples actually covered.
std::vector<double> moving_average(std::span<const double> x, int k);

RespiratoryWave smooth(const RespiratoryWave& wave, const BreathingConfig& cfg);

/// Strict rise on the left, non-strict fall on the right (plateaus report their leftmost sample).
std::vector<int> local_maxima(std::span<const double> x);

/// Height above the higher of the two bases (lowest points before a strictly higher sample).
std::vector<double> peak_prominences(std::span<const double> x, std::span<const int> peaks);

/// Greedy by descending height (ties: lower index); drops peaks closer than min_distance to a kept one.
std::vector<int> thin_by_distance(std::span<const double> x, std::span<const int> peaks, double min_distance);

/// Minimum peak spacing in samples implied by rr_max.
double min_peak_distance(double fs, const BreathingConfig& cfg);

std::vector<int> detect_peaks(std::span<const double> wave, double fs, const BreathingConfig& cfg);

struct RRSeries {
    std::vector<int> peak_indices;
    std::vector<double> inst_rr;  // BPM per consecutive peak pair, within [rr_min, rr_max]
};

RRSeries instantaneous_rr(std::span<const int> peak_indices, double fs, const BreathingConfig& cfg);

struct BestGroup {
    int group_index = 0;  // 1-based
    RRSeries series;
};

/// `per_group[g]` belongs to group g+1; nullopt marks an empty group.
std::optional<BestGroup> best_group(std::span<const std::optional<RRSeries>> per_group, const BreathingConfig& cfg);

struct RRPrediction {
    double t = 0.0;  // window end, seconds
    std::optional<double> rr_bpm;
    std::optional<int> group_index;
    int n_peaks = 0;
    bool valid = false;
};

RRPrediction predict(const std::optional<BestGroup>& best, double t);

struct GroupReport {
    int group_index = 0;
    std::vector<int> rows;
    int n_peaks = 0;
    std::vector<double> inst_rr;
    bool eligible = false;
};

struct WindowAnalysis {
    RRPrediction prediction;
    std::vector<GroupReport> groups;
    bool flat = false;
};

/// Full per-window chain: group, average, smooth, find peaks, pick the best group, predict.
WindowAnalysis analyze_window(const MotionWindow& window, const BreathingConfig& cfg);

}  // namespace picrr
