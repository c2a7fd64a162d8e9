#include "picrr/breathing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "picrr/error.hpp"

namespace picrr {

namespace {

constexpr double kFracEps = 1e-9;

int floor_count(int n, double frac)
{
    return static_cast<int>(std::floor(n * frac + kFracEps));
}

}  // namespace

int BreathingConfig::group_count() const
{
    return static_cast<int>(std::lround(top_frac / group_frac));
}

void BreathingConfig::validate() const
{
    if (!(top_frac > 0.0 && top_frac <= 1.0)) throw Error("top_frac must lie in (0, 1]");
    if (!(group_frac > 0.0 && group_frac <= top_frac)) throw Error("group_frac must lie in (0, top_frac]");
    const double ratio = top_frac / group_frac;
    if (std::abs(ratio - std::round(ratio)) > 1e-6) {
        throw Error("group_frac must divide top_frac into a whole number of groups");
    }
    if (!(rr_min > 0.0 && rr_min < rr_max)) throw Error("need 0 < rr_min < rr_max");
    if (!(smooth_s >= 0.0)) throw Error("smooth_s must be >= 0");
    if (!(prominence_factor >= 0.0)) throw Error("prominence_factor must be >= 0");
    if (min_peaks < 2) throw Error("min_peaks must be >= 2");
    if (!(cycles_per_peak > 0.0)) throw Error("cycles_per_peak must be positive");
}

double mean_of(std::span<const double> x)
{
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double stddev_of(std::span<const double> x)
{
    if (x.empty()) return 0.0;
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

std::vector<double> detrend(std::span<const double> signal)
{
    const std::size_t n = signal.size();
    if (n < 2) throw Error("detrend needs at least 2 samples");
    const double t_mean = static_cast<double>(n - 1) / 2.0;
    const double x_mean = mean_of(signal);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = static_cast<double>(i) - t_mean;
        sxy += dt * (signal[i] - x_mean);
        sxx += dt * dt;
    }
    const double slope = sxy / sxx;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (signal[i] - x_mean) - slope * (static_cast<double>(i) - t_mean);
    }
    // Residual mean from rounding is removed so the output is centred.
    const double residual = mean_of(out);
    for (auto& v : out) v -= residual;
    return out;
}

Grouping select_and_group(const MotionWindow& window, const BreathingConfig& cfg)
{
    cfg.validate();
    const int L = window.rows;
    const int group_size = floor_count(L, cfg.group_frac);
    if (group_size < 1) throw Error("window has too few rows for group_frac");
    const int G = cfg.group_count();
    const int top = std::min(floor_count(L, cfg.top_frac), L);

    std::vector<std::vector<double>> detrended(static_cast<std::size_t>(L));
    std::vector<double> stds(static_cast<std::size_t>(L));
    double max_std = 0.0;
    double max_abs = 0.0;
    for (int i = 0; i < L; ++i) {
        detrended[static_cast<std::size_t>(i)] = detrend(window.row(i));
        stds[static_cast<std::size_t>(i)] = stddev_of(detrended[static_cast<std::size_t>(i)]);
        max_std = std::max(max_std, stds[static_cast<std::size_t>(i)]);
        for (double v : window.row(i)) max_abs = std::max(max_abs, std::abs(v));
    }

    Grouping out;
    out.groups.resize(static_cast<std::size_t>(G));
    if (max_std <= 1e-12 * std::max(1.0, max_abs)) {
        out.flat = true;
        return out;
    }

    std::vector<int> order(static_cast<std::size_t>(L));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return stds[static_cast<std::size_t>(a)] > stds[static_cast<std::size_t>(b)];
    });

    for (int g = 0; g < G; ++g) {
        auto& grp = out.groups[static_cast<std::size_t>(g)];
        for (int k = g * group_size; k < (g + 1) * group_size && k < top; ++k) {
            const int row = order[static_cast<std::size_t>(k)];
            grp.rows.push_back(row);
            grp.signals.push_back(std::move(detrended[static_cast<std::size_t>(row)]));
        }
    }
    return out;
}

std::optional<RespiratoryWave> group_to_wave(const SignalGroup& group, double fs, int group_index)
{
    if (group.signals.empty()) return std::nullopt;
    const std::size_t n = group.signals.front().size();
    RespiratoryWave w{std::vector<double>(n, 0.0), fs, group_index};
    for (const auto& s : group.signals) {
        if (s.size() != n) throw Error("group signals differ in length");
        for (std::size_t i = 0; i < n; ++i) w.samples[i] += s[i];
    }
    const auto count = static_cast<double>(group.signals.size());
    for (auto& v : w.samples) v /= count;
    return w;
}

int smoothing_width(double smooth_s, double fs)
{
    int k = static_cast<int>(std::lround(smooth_s * fs));
    if (k < 1) k = 1;
    if (k % 2 == 0) ++k;
    return k;
}

std::vector<double> moving_average(std::span<const double> x, int k)
{
    if (k < 1 || k % 2 == 0) throw Error("moving average width must be odd and positive");
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t half = k / 2;
    std::vector<double> out(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        double s = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) s += x[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s / static_cast<double>(hi - lo + 1);
    }
    return out;
}

RespiratoryWave smooth(const RespiratoryWave& wave, const BreathingConfig& cfg)
{
    return {moving_average(wave.samples, smoothing_width(cfg.smooth_s, wave.fs)), wave.fs, wave.group_index};
}

std::vector<int> local_maxima(std::span<const double> x)
{
    std::vector<int> peaks;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] > x[i - 1] && x[i] >= x[i + 1]) peaks.push_back(static_cast<int>(i));
    }
    return peaks;
}

std::vector<double> peak_prominences(std::span<const double> x, std::span<const int> peaks)
{
    std::vector<double> out;
    out.reserve(peaks.size());
    const auto n = static_cast<int>(x.size());
    for (int p : peaks) {
        const double h = x[static_cast<std::size_t>(p)];
        double left_min = h;
        for (int j = p - 1; j >= 0 && x[static_cast<std::size_t>(j)] <= h; --j) {
            left_min = std::min(left_min, x[static_cast<std::size_t>(j)]);
        }
        double right_min = h;
        for (int j = p + 1; j < n && x[static_cast<std::size_t>(j)] <= h; ++j) {
            right_min = std::min(right_min, x[static_cast<std::size_t>(j)]);
        }
        out.push_back(h - std::max(left_min, right_min));
    }
    return out;
}

std::vector<int> thin_by_distance(std::span<const double> x, std::span<const int> peaks, double min_distance)
{
    std::vector<int> order(peaks.begin(), peaks.end());
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ha = x[static_cast<std::size_t>(a)];
        const double hb = x[static_cast<std::size_t>(b)];
        return ha != hb ? ha > hb : a < b;
    });
    std::vector<int> kept;
    for (int p : order) {
        const bool clash = std::any_of(kept.begin(), kept.end(),
                                       [&](int k) { return std::abs(k - p) < min_distance; });
        if (!clash) kept.push_back(p);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

double min_peak_distance(double fs, const BreathingConfig& cfg)
{
    return fs * 60.0 * cfg.cycles_per_peak / cfg.rr_max;
}

std::vector<int> detect_peaks(std::span<const double> wave, double fs, const BreathingConfig& cfg)
{
    const auto candidates = local_maxima(wave);
    if (candidates.empty()) return {};
    const auto prom = peak_prominences(wave, candidates);
    const double threshold = cfg.prominence_factor * stddev_of(wave);
    std::vector<int> prominent;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (prom[i] >= threshold && prom[i] > 0.0) prominent.push_back(candidates[i]);
    }
    return thin_by_distance(wave, prominent, min_peak_distance(fs, cfg));
}

RRSeries instantaneous_rr(std::span<const int> peak_indices, double fs, const BreathingConfig& cfg)
{
    RRSeries s{std::vector<int>(peak_indices.begin(), peak_indices.end()), {}};
    for (std::size_t i = 1; i < peak_indices.size(); ++i) {
        if (peak_indices[i] <= peak_indices[i - 1]) throw Error("peak indices must be ascending");
        const double ibi = (peak_indices[i] - peak_indices[i - 1]) / fs;
        const double rr = 60.0 * cfg.cycles_per_peak / ibi;
        if (rr >= cfg.rr_min && rr <= cfg.rr_max) s.inst_rr.push_back(rr);
    }
    return s;
}

std::optional<BestGroup> best_group(std::span<const std::optional<RRSeries>> per_group, const BreathingConfig& cfg)
{
    std::optional<BestGroup> best;
    double best_std = 0.0;
    for (std::size_t g = 0; g < per_group.size(); ++g) {
        const auto& s = per_group[g];
        if (!s || static_cast<int>(s->peak_indices.size()) < cfg.min_peaks || s->inst_rr.size() < 2) continue;
        const double sd = stddev_of(s->inst_rr);
        if (!best || sd < best_std) {
            best = BestGroup{static_cast<int>(g) + 1, *s};
            best_std = sd;
        }
    }
    return best;
}

RRPrediction predict(const std::optional<BestGroup>& best, double t)
{
    RRPrediction p;
    p.t = t;
    if (!best || best->series.inst_rr.empty()) return p;
    p.rr_bpm = mean_of(best->series.inst_rr);
    p.group_index = best->group_index;
    p.n_peaks = static_cast<int>(best->series.peak_indices.size());
    p.valid = true;
    return p;
}

WindowAnalysis analyze_window(const MotionWindow& window, const BreathingConfig& cfg)
{
    WindowAnalysis result;
    const Grouping grouping = select_and_group(window, cfg);
    result.flat = grouping.flat;

    std::vector<std::optional<RRSeries>> series(grouping.groups.size());
    for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
        GroupReport report;
        report.group_index = static_cast<int>(g) + 1;
        report.rows = grouping.groups[g].rows;
        if (auto wave = group_to_wave(grouping.groups[g], window.fs, report.group_index)) {
            const RespiratoryWave smoothed = smooth(*wave, cfg);
            series[g] = instantaneous_rr(detect_peaks(smoothed.samples, window.fs, cfg), window.fs, cfg);
            report.n_peaks = static_cast<int>(series[g]->peak_indices.size());
            report.inst_rr = series[g]->inst_rr;
            report.eligible = report.n_peaks >= cfg.min_peaks && report.inst_rr.size() >= 2;
        }
        result.groups.push_back(std::move(report));
    }
    result.prediction = predict(best_group(series, cfg), window.end_time());
    return result;
}

}  // namespace picrr
