#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "picrr/ingest.hpp"
#include "picrr/roi.hpp"

namespace picrr {

struct RrSegment {
    double start_s = 0.0;
    double rr_bpm = 15.0;
};

/**
 * Synthetic breathing scene. Geometry scales with the frame width: the face
 * is 0.1875*width wide, centred horizontally, chin at 0.29*height. The chest
 * top edge sits 30% down the landmark ROI.
 */
struct SynthConfig {
    int width = 320;
    int height = 240;
    double fps = 30.0;
    double duration_s = 60.0;
    std::vector<RrSegment> rr_segments{{0.0, 15.0}};
    double amplitude_px = 2.0;   // peak vertical chest displacement
    double noise_sigma = 2.0;    // per-sample Gaussian noise, intensity units
    double illum_drift = 0.0;    // intensity units per second
    std::uint64_t texture_seed = 1;
    std::optional<double> roi_jump_at_s;  // whole scene translates by (jump_dx, jump_dy)
    int jump_dx = 8;
    int jump_dy = 6;
    PixelFormat pixel_format = PixelFormat::RGB24;
    StorageLayout layout = StorageLayout::ImageSequence;

    double chest_contrast = 60.0;    // chest brightness above the brightest background band
    double torso_half_width = 0.7;   // in face widths; the ROI half-width is k_w = 1.0
    double clutter_frac = 0.0;       // ROI rows (from the bottom) covered by static checker texture
    double flicker_frac = 0.0;       // ROI rows carrying a random-walk brightness band
    double flicker_amp = 0.0;        // random-walk bound, intensity units

    int frame_count() const;
    void validate() const;
};

SynthConfig load_synth_config(const std::filesystem::path& path, SynthConfig base = {});
SynthConfig apply_synth_json(SynthConfig base, std::string_view json_text);

/// Deterministic frame renderer; render(i) depends only on the config and i.
class SynthRenderer {
public:
    explicit SynthRenderer(SynthConfig cfg);

    const SynthConfig& config() const { return cfg_; }
    const VideoMeta& meta() const { return meta_; }

    FrameBuffer render(int index) const;
    /// Noise-free grayscale scene at frame `index` (before channel tint and quantisation).
    GrayImage render_scene(int index) const;

    double rr_at(double t) const;
    /// Chest displacement in pixels at time t (positive = downward).
    double displacement(double t) const;
    /// Row (in frame coordinates, no jump applied) of the chest top edge at rest.
    double chest_top() const { return chest_top_; }

    /// Landmark records: frame 0, plus the jump frame when a jump is configured.
    std::vector<LandmarkSet> landmarks() const;
    /// (t, rr) rows: every whole second plus each segment start.
    std::vector<std::pair<double, double>> ground_truth() const;

private:
    struct Shift {
        int dx = 0;
        int dy = 0;
    };
    Shift shift_at(int index) const;
    void render_row(int index, int y, std::vector<double>& row) const;

    SynthConfig cfg_;
    VideoMeta meta_;
    double face_w_ = 0.0;
    double cx_ = 0.0;
    double chin_y_ = 0.0;
    RoiRect roi_;
    double chest_top_ = 0.0;
    int margin_ = 0;
    std::vector<double> bg_rows_;      // per scene row, offset by margin_
    std::vector<double> chest_rows_;   // chest texture, per row below the chest top
    std::vector<double> clutter_cells_;
    std::vector<double> flicker_walk_; // per frame
    int jump_frame_ = -1;
};

/// FrameSource over a renderer, so the pipeline can consume synthetic video without disk I/O.
class SynthSource final : public FrameSource {
public:
    explicit SynthSource(const SynthRenderer& renderer) : renderer_(renderer) {}
    const VideoMeta& meta() const override { return renderer_.meta(); }
    std::optional<FrameBuffer> next() override;

private:
    const SynthRenderer& renderer_;
    int next_ = 0;
};

inline constexpr std::string_view kGroundTruthName = "ground_truth.csv";
inline constexpr std::string_view kLandmarksName = "landmarks.csv";

/// Writes the video (manifest + frames), ground_truth.csv and landmarks.csv into `out_dir`.
void generate(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace picrr
