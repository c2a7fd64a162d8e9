// picrr: respiratory rate from chest-region video.
//
//   picrr run   --video DIR --landmarks CSV [--config run.json] [flags]
//   picrr synth --out DIR [--config synth.json] [flags]
//   picrr eval  --manifest dataset.json [--config run.json] [--single-cell edges,0.30]
//
// Exit codes: 0 ok, 1 bad input, 2 evaluation finished with failed cells.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "picrr/config.hpp"
#include "picrr/error.hpp"
#include "picrr/eval.hpp"
#include "picrr/pipeline.hpp"
#include "picrr/synth.hpp"

namespace {

using namespace picrr;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitPartial = 2;

/// Flag values override the config file only when given on the command line.
struct ConfigFlags {
    std::string config_path;
    std::optional<double> window_s, step_s, reest_s, reest_shift_px;
    std::optional<double> top_frac, group_frac, smooth_s, rr_min, rr_max, prominence_factor, cycles_per_peak;
    std::optional<int> min_peaks;
    std::optional<double> sigma, low, high;
    std::optional<int> dilation_radius;
    std::optional<double> k_w, k_top, k_h;
    std::optional<std::string> profile_mode;
    std::optional<int> canonical_len;
    std::optional<std::string> fixed_roi;
    bool dump_config = false;

    void attach(CLI::App& app)
    {
        app.add_option("--config", config_path, "JSON run configuration (flags take precedence)");
        app.add_option("--window-s", window_s, "sliding window length, seconds");
        app.add_option("--step-s", step_s, "prediction step, seconds");
        app.add_option("--reest-s", reest_s, "ROI / edge-mask re-estimation period, seconds");
        app.add_option("--reest-shift-px", reest_shift_px, "re-estimate early when the landmark ROI moves this far (0 = off)");
        app.add_option("--top-frac", top_frac, "share of motion signals kept");
        app.add_option("--group-frac", group_frac, "share of motion signals per group");
        app.add_option("--smooth-s", smooth_s, "moving-average span, seconds");
        app.add_option("--rr-min", rr_min, "lowest accepted rate, BPM");
        app.add_option("--rr-max", rr_max, "highest accepted rate, BPM");
        app.add_option("--prominence-factor", prominence_factor, "minimum peak prominence in wave std units");
        app.add_option("--min-peaks", min_peaks, "peaks a group needs to be eligible");
        app.add_option("--cycles-per-peak", cycles_per_peak, "breaths per inter-peak interval");
        app.add_option("--sigma", sigma, "Canny Gaussian sigma");
        app.add_option("--low", low, "Canny low threshold (Sobel magnitude)");
        app.add_option("--high", high, "Canny high threshold (Sobel magnitude)");
        app.add_option("--dilation-radius", dilation_radius, "edge mask dilation radius, pixels");
        app.add_option("--k-w", k_w, "ROI half-width in face widths");
        app.add_option("--k-top", k_top, "chin-to-ROI gap in face widths");
        app.add_option("--k-h", k_h, "ROI height in face widths");
        app.add_option("--profile-mode", profile_mode, "full_roi or edges")->check(CLI::IsMember({"full_roi", "edges"}));
        app.add_option("--canonical-len", canonical_len, "profile length after resampling");
        app.add_option("--fixed-roi", fixed_roi, "x,y,w,h chest rectangle instead of landmarks");
        app.add_flag("--dump-config", dump_config, "print the effective configuration as JSON and exit");
    }

    RunConfig resolve(RunConfig cfg) const
    {
        if (!config_path.empty()) cfg = load_run_config(config_path, cfg);
        auto set = [](const auto& flag, auto& field) {
            if (flag) field = *flag;
        };
        set(window_s, cfg.schedule.window_s);
        set(step_s, cfg.schedule.step_s);
        set(reest_s, cfg.schedule.reest_s);
        set(reest_shift_px, cfg.schedule.reest_shift_px);
        set(top_frac, cfg.breathing.top_frac);
        set(group_frac, cfg.breathing.group_frac);
        set(smooth_s, cfg.breathing.smooth_s);
        set(rr_min, cfg.breathing.rr_min);
        set(rr_max, cfg.breathing.rr_max);
        set(prominence_factor, cfg.breathing.prominence_factor);
        set(min_peaks, cfg.breathing.min_peaks);
        set(cycles_per_peak, cfg.breathing.cycles_per_peak);
        set(sigma, cfg.canny.sigma);
        set(low, cfg.canny.low);
        set(high, cfg.canny.high);
        set(dilation_radius, cfg.canny.dilation_radius);
        set(k_w, cfg.geometry.k_w);
        set(k_top, cfg.geometry.k_top);
        set(k_h, cfg.geometry.k_h);
        if (profile_mode) cfg.profile_mode = parse_profile_mode(*profile_mode);
        set(canonical_len, cfg.canonical_len);
        if (fixed_roi) cfg.fixed_roi = parse_roi(*fixed_roi);
        return cfg;
    }

    static RoiRect parse_roi(const std::string& text)
    {
        RoiRect r;
        char c1 = 0, c2 = 0, c3 = 0;
        std::istringstream ss(text);
        if (!(ss >> r.x >> c1 >> r.y >> c2 >> r.w >> c3 >> r.h) || c1 != ',' || c2 != ',' || c3 != ',') {
            throw Error("--fixed-roi expects x,y,w,h");
        }
        return r;
    }
};

std::string format_row(const RRPrediction& p)
{
    char buf[128];
    if (p.valid && p.rr_bpm && p.group_index) {
        std::snprintf(buf, sizeof buf, "%.3f,%.4f,%d,%d,1", p.t, *p.rr_bpm, *p.group_index, p.n_peaks);
    } else {
        std::snprintf(buf, sizeof buf, "%.3f,,,%d,0", p.t, p.n_peaks);
    }
    return buf;
}

int cmd_run(const RunConfig& cfg, const std::string& out_path)
{
    if (cfg.video.empty()) throw Error("run needs --video");
    cfg.validate();
    auto source = open_source(cfg.video);
    const RoiSource roi = roi_source_from_config(cfg);

    const auto frames = ScheduleFrames::from(cfg.schedule, source->meta().fps);
    if (source->meta().frame_count < frames.window) {
        std::cerr << "warning: video is shorter than window (" << source->meta().frame_count << " frames < "
                  << frames.window << ")\n";
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw Error("cannot write " + out_path);
        out = &file;
    }
    *out << "t_seconds,rr_bpm,group_index,n_peaks,valid\n" << std::flush;
    const RunResult result = run_stream(*source, cfg, roi, [&](const RRPrediction& p) {
        *out << format_row(p) << '\n' << std::flush;
    });

    const auto& fl = result.frame_latency;
    const auto& wl = result.window_latency;
    std::fprintf(stderr, "frames=%d predictions=%zu\n", result.frames, result.predictions.size());
    std::fprintf(stderr, "frame_ms p50=%.3f p99=%.3f max=%.3f budget=%.3f\n", fl.p50_ms, fl.p99_ms, fl.max_ms,
                 1000.0 / source->meta().fps);
    std::fprintf(stderr, "window_ms p50=%.3f p99=%.3f max=%.3f budget=%.3f\n", wl.p50_ms, wl.p99_ms, wl.max_ms,
                 1000.0 * cfg.schedule.step_s);
    if (result.mask_fallbacks > 0) {
        std::fprintf(stderr, "warning: %d epoch(s) had no edge pixels and used full-ROI rows\n", result.mask_fallbacks);
    }
    return kExitOk;
}

struct SynthFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<double> rr, fps, duration, noise, amplitude, jump_at, drift;
    std::optional<int> width, height;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> layout, pixel_format;

    void attach(CLI::App& app)
    {
        app.add_option("--config", config_path, "JSON synth configuration");
        app.add_option("--out", out_dir, "output directory (must not exist or be empty)")->required();
        app.add_option("--rr", rr, "constant breathing rate, BPM");
        app.add_option("--fps", fps, "frame rate");
        app.add_option("--duration", duration, "length, seconds");
        app.add_option("--noise", noise, "per-sample noise sigma");
        app.add_option("--amplitude", amplitude, "chest displacement, pixels");
        app.add_option("--drift", drift, "illumination drift, intensity/s");
        app.add_option("--jump-at", jump_at, "translate the scene at this time, seconds");
        app.add_option("--width", width, "frame width");
        app.add_option("--height", height, "frame height");
        app.add_option("--seed", seed, "texture/noise seed");
        app.add_option("--layout", layout, "frames or raw")->check(CLI::IsMember({"frames", "raw"}));
        app.add_option("--pixel-format", pixel_format, "RGB24 or GRAY8")->check(CLI::IsMember({"RGB24", "GRAY8"}));
    }

    SynthConfig resolve() const
    {
        SynthConfig cfg;
        if (!config_path.empty()) cfg = load_synth_config(config_path, cfg);
        if (rr) cfg.rr_segments = {{0.0, *rr}};
        if (fps) cfg.fps = *fps;
        if (duration) cfg.duration_s = *duration;
        if (noise) cfg.noise_sigma = *noise;
        if (amplitude) cfg.amplitude_px = *amplitude;
        if (drift) cfg.illum_drift = *drift;
        if (jump_at) cfg.roi_jump_at_s = *jump_at;
        if (width) cfg.width = *width;
        if (height) cfg.height = *height;
        if (seed) cfg.texture_seed = *seed;
        if (layout) cfg.layout = *layout == "raw" ? StorageLayout::Raw : StorageLayout::ImageSequence;
        if (pixel_format) cfg.pixel_format = parse_pixel_format(*pixel_format);
        return cfg;
    }
};

int cmd_eval(const RunConfig& cfg, const std::string& manifest, const std::string& single_cell,
             const std::string& out_path)
{
    cfg.validate();
    const auto recordings = load_dataset_manifest(manifest);
    std::vector<AblationCell> cells = default_ablation_cells();
    if (!single_cell.empty()) cells = {parse_ablation_cell(single_cell)};

    const AblationResult result = ablation(recordings, cfg, cells);
    const std::string csv = format_ablation_csv(std::filesystem::path(manifest).stem().string(), result);
    if (out_path.empty()) {
        std::cout << csv << std::flush;
    } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write " + out_path);
        out << csv;
    }

    for (const auto& e : result.errors) std::cerr << "failed: " << e << '\n';
    for (const auto& r : result.rows) {
        std::fprintf(stderr, "%-8s %.2f  ", std::string(to_string(r.cell.mode)).c_str(), r.cell.fraction);
        if (r.score.metrics) {
            std::fprintf(stderr, "MAE %.3f BPM  SR2 %.1f%%  (%d valid, %d invalid)", r.score.metrics->mae,
                         r.score.metrics->sr2, r.score.metrics->n, r.score.invalid_count);
        } else {
            std::fprintf(stderr, "no valid predictions (%d invalid)", r.score.invalid_count);
        }
        if (r.group_gt1_share) std::fprintf(stderr, "  best group >= 2 in %.0f%% of windows", 100.0 * *r.group_gt1_share);
        std::fprintf(stderr, "%s\n", r.failed() ? "  [failed]" : "");
    }
    return result.errors.empty() ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Respiratory rate from chest-region pixel intensity changes"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "estimate RR once per step from a video");
    ConfigFlags run_flags;
    run_flags.attach(*run);
    std::string video, landmarks, run_out;
    run->add_option("--video", video, "frame directory or raw video file");
    run->add_option("--landmarks", landmarks, "landmark CSV");
    run->add_option("--out", run_out, "write CSV here instead of stdout");

    auto* synth = app.add_subcommand("synth", "render a synthetic breathing video with ground truth");
    SynthFlags synth_flags;
    synth_flags.attach(*synth);

    auto* eval = app.add_subcommand("eval", "score a dataset over the profile-mode x signal-fraction ablation");
    ConfigFlags eval_flags;
    eval_flags.attach(*eval);
    std::string manifest, single_cell, eval_out;
    eval->add_option("--manifest", manifest, "dataset manifest JSON");
    eval->add_option("--single-cell", single_cell, "evaluate one cell only, e.g. edges,0.30");
    eval->add_option("--out", eval_out, "write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadInput;
    }

    try {
        if (*run) {
            RunConfig cfg = run_flags.resolve({});
            if (!video.empty()) cfg.video = video;
            if (!landmarks.empty()) cfg.landmarks = landmarks;
            if (run_flags.dump_config) {
                std::cout << dump_run_config(cfg);
                return kExitOk;
            }
            return cmd_run(cfg, run_out);
        }
        if (*synth) {
            const SynthConfig cfg = synth_flags.resolve();
            generate(cfg, synth_flags.out_dir);
            std::cerr << "wrote " << cfg.frame_count() << " frames to " << synth_flags.out_dir << '\n';
            return kExitOk;
        }
        if (*eval) {
            const RunConfig cfg = eval_flags.resolve({});
            if (eval_flags.dump_config) {
                std::cout << dump_run_config(cfg);
                return kExitOk;
            }
            if (manifest.empty()) throw Error("eval needs --manifest");
            return cmd_eval(cfg, manifest, single_cell, eval_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    }
    return kExitBadInput;
}
