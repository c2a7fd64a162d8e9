#include "picrr/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "picrr/error.hpp"

namespace fs = std::filesystem;

namespace picrr {

namespace {

// Fixed-algorithm generator so textures and noise are identical on every platform.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next()
    {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal()
    {
        const double u1 = std::max(uniform(), 0x1.0p-60);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    SplitMix64 s{seed ^ (stream * 0xD1B54A32D192ED03ULL)};
    return s.next();
}

// 2^16 standard-normal deviates, indexed by 16 random bits per sample.
const std::array<double, 65536>& noise_table()
{
    static const std::array<double, 65536> table = [] {
        std::array<double, 65536> t{};
        SplitMix64 rng{0x6E6F697365ULL};
        for (auto& v : t) v = rng.normal();
        return t;
    }();
    return table;
}

constexpr double kBandLo = 70.0;
constexpr double kBandHi = 110.0;
constexpr double kChestTopFrac = 0.3;
constexpr double kFlickerTopFrac = 0.08;
constexpr double kFlickerStripe = 30.0;
constexpr int kFlickerStripeWidth = 4;
constexpr int kClutterCell = 4;
constexpr std::array<double, 3> kTint{6.0, 0.0, -6.0};

}  // namespace

int SynthConfig::frame_count() const
{
    return static_cast<int>(std::lround(duration_s * fps));
}

void SynthConfig::validate() const
{
    VideoMeta{width, height, fps, frame_count(), pixel_format}.validate();
    if (!(duration_s > 0.0)) throw Error("duration_s must be positive");
    if (rr_segments.empty()) throw Error("rr_segments must not be empty");
    if (rr_segments.front().start_s != 0.0) throw Error("first rr segment must start at t=0");
    for (std::size_t i = 0; i < rr_segments.size(); ++i) {
        const auto& s = rr_segments[i];
        if (!(s.rr_bpm >= 6.0 && s.rr_bpm <= 45.0)) {
            throw Error("rr segment " + std::to_string(i) + " has rr " + std::to_string(s.rr_bpm) +
                        " BPM outside [6, 45]");
        }
        if (i > 0 && !(s.start_s > rr_segments[i - 1].start_s)) throw Error("rr segment starts must increase");
    }
    if (!(amplitude_px >= 0.0)) throw Error("amplitude_px must be >= 0");
    if (!(noise_sigma >= 0.0)) throw Error("noise_sigma must be >= 0");
    if (!(chest_contrast >= 0.0)) throw Error("chest_contrast must be >= 0");
    if (!(torso_half_width > 0.0 && torso_half_width <= 1.5)) throw Error("torso_half_width must lie in (0, 1.5]");
    if (!(clutter_frac >= 0.0 && clutter_frac <= 0.6)) throw Error("clutter_frac must lie in [0, 0.6]");
    if (!(flicker_frac >= 0.0 && flicker_frac <= 0.2)) throw Error("flicker_frac must lie in [0, 0.2]");
    if (!(flicker_amp >= 0.0)) throw Error("flicker_amp must be >= 0");
    if (roi_jump_at_s && !(*roi_jump_at_s > 0.0 && *roi_jump_at_s < duration_s)) {
        throw Error("roi_jump_at_s must fall inside the recording");
    }
}

SynthConfig apply_synth_json(SynthConfig cfg, std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed synth config: ") + e.what());
    }
    if (!j.is_object()) throw Error("synth config must be a JSON object");
    static const std::set<std::string> known{"width", "height", "fps", "duration_s", "rr_segments", "amplitude_px",
                                             "noise_sigma", "illum_drift", "texture_seed", "roi_jump_at_s",
                                             "jump_dx", "jump_dy", "pixel_format", "layout", "chest_contrast",
                                             "torso_half_width", "clutter_frac", "flicker_frac", "flicker_amp"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw Error("unknown synth config key '" + key + "'");
    }
    try {
        auto take = [&](const char* key, auto& out) {
            if (j.contains(key)) out = j[key].get<std::remove_reference_t<decltype(out)>>();
        };
        take("width", cfg.width);
        take("height", cfg.height);
        take("fps", cfg.fps);
        take("duration_s", cfg.duration_s);
        if (j.contains("rr_segments")) {
            cfg.rr_segments.clear();
            for (const auto& seg : j["rr_segments"]) {
                if (!seg.is_array() || seg.size() != 2) throw Error("rr_segments entries must be [start_s, rr_bpm]");
                cfg.rr_segments.push_back({seg[0].get<double>(), seg[1].get<double>()});
            }
        }
        take("amplitude_px", cfg.amplitude_px);
        take("noise_sigma", cfg.noise_sigma);
        take("illum_drift", cfg.illum_drift);
        take("texture_seed", cfg.texture_seed);
        if (j.contains("roi_jump_at_s")) {
            if (j["roi_jump_at_s"].is_null()) cfg.roi_jump_at_s.reset();
            else cfg.roi_jump_at_s = j["roi_jump_at_s"].get<double>();
        }
        take("jump_dx", cfg.jump_dx);
        take("jump_dy", cfg.jump_dy);
        if (j.contains("pixel_format")) cfg.pixel_format = parse_pixel_format(j["pixel_format"].get<std::string>());
        if (j.contains("layout")) {
            const auto layout = j["layout"].get<std::string>();
            if (layout == "frames") cfg.layout = StorageLayout::ImageSequence;
            else if (layout == "raw") cfg.layout = StorageLayout::Raw;
            else throw Error("layout must be 'frames' or 'raw'");
        }
        take("chest_contrast", cfg.chest_contrast);
        take("torso_half_width", cfg.torso_half_width);
        take("clutter_frac", cfg.clutter_frac);
        take("flicker_frac", cfg.flicker_frac);
        take("flicker_amp", cfg.flicker_amp);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("bad synth config value: ") + e.what());
    }
    return cfg;
}

SynthConfig load_synth_config(const fs::path& path, SynthConfig base)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open synth config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return apply_synth_json(std::move(base), ss.str());
}

SynthRenderer::SynthRenderer(SynthConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
    meta_ = VideoMeta{cfg_.width, cfg_.height, cfg_.fps, cfg_.frame_count(), cfg_.pixel_format};
    face_w_ = 0.1875 * cfg_.width;
    cx_ = cfg_.width / 2.0;
    chin_y_ = 0.29 * cfg_.height;

    const LandmarkSet lm0 = landmarks().front();
    const RoiExtent extent = roi_extent(lm0, RoiGeometryConfig{});
    roi_ = roi_from_landmarks(lm0, meta_, RoiGeometryConfig{});
    if (extent.y1 > cfg_.height || extent.x0 < 0.0 || extent.x1 > cfg_.width) {
        throw Error("frame too small for the synthetic chest ROI");
    }
    chest_top_ = roi_.y + kChestTopFrac * roi_.h;

    if (cfg_.roi_jump_at_s) {
        jump_frame_ = static_cast<int>(std::ceil(*cfg_.roi_jump_at_s * cfg_.fps - 1e-9));
    }
    margin_ = std::abs(cfg_.jump_dy) + 4;

    SplitMix64 rng{mix_seed(cfg_.texture_seed, 1)};
    const int scene_rows = cfg_.height + 2 * margin_;
    bg_rows_.resize(static_cast<std::size_t>(scene_rows));
    for (int y = 0; y < scene_rows;) {
        const int band = 5 + static_cast<int>(rng.next() % 10);
        const double v = rng.uniform(kBandLo, kBandHi);
        for (int k = 0; k < band && y < scene_rows; ++k, ++y) bg_rows_[static_cast<std::size_t>(y)] = v;
    }

    const double chest_base = kBandHi + cfg_.chest_contrast;
    chest_rows_.resize(static_cast<std::size_t>(scene_rows));
    for (int y = 0; y < scene_rows;) {
        const int band = 6 + static_cast<int>(rng.next() % 11);
        const double v = chest_base + (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(4.0, 12.0);
        for (int k = 0; k < band && y < scene_rows; ++k, ++y) chest_rows_[static_cast<std::size_t>(y)] = v;
    }

    const int cells_x = cfg_.width / kClutterCell + 2;
    const int cells_y = scene_rows / kClutterCell + 2;
    clutter_cells_.resize(static_cast<std::size_t>(cells_x) * static_cast<std::size_t>(cells_y));
    for (auto& c : clutter_cells_) c = rng.uniform(30.0, 230.0);

    SplitMix64 walk_rng{mix_seed(cfg_.texture_seed, 2)};
    flicker_walk_.resize(static_cast<std::size_t>(std::max(meta_.frame_count, 1)));
    double w = 0.0;
    const double step = 0.1 * cfg_.flicker_amp;
    for (auto& v : flicker_walk_) {
        v = w;
        w += step * walk_rng.normal();
        if (w > cfg_.flicker_amp) w = 2.0 * cfg_.flicker_amp - w;
        if (w < -cfg_.flicker_amp) w = -2.0 * cfg_.flicker_amp - w;
    }
}

double SynthRenderer::rr_at(double t) const
{
    double rr = cfg_.rr_segments.front().rr_bpm;
    for (const auto& s : cfg_.rr_segments) {
        if (t >= s.start_s) rr = s.rr_bpm;
    }
    return rr;
}

double SynthRenderer::displacement(double t) const
{
    // Phase integrates the piecewise-constant breathing frequency so segment switches are smooth.
    double phase = 0.0;
    const auto& segs = cfg_.rr_segments;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const double start = segs[i].start_s;
        if (t <= start) break;
        const double end = i + 1 < segs.size() ? std::min(t, segs[i + 1].start_s) : t;
        phase += 2.0 * std::numbers::pi * segs[i].rr_bpm / 60.0 * (end - start);
    }
    return cfg_.amplitude_px * std::sin(phase);
}

SynthRenderer::Shift SynthRenderer::shift_at(int index) const
{
    if (jump_frame_ >= 0 && index >= jump_frame_) return {cfg_.jump_dx, cfg_.jump_dy};
    return {};
}

std::vector<LandmarkSet> SynthRenderer::landmarks() const
{
    auto at = [&](int frame, double dx, double dy) {
        LandmarkSet lm;
        lm.frame_index = frame;
        lm.chin = {cx_ + dx, chin_y_ + dy};
        lm.left_ear = {cx_ - face_w_ / 2.0 + dx, chin_y_ - 0.45 * face_w_ + dy};
        lm.right_ear = {cx_ + face_w_ / 2.0 + dx, chin_y_ - 0.45 * face_w_ + dy};
        return lm;
    };
    std::vector<LandmarkSet> out{at(0, 0.0, 0.0)};
    if (jump_frame_ > 0) out.push_back(at(jump_frame_, cfg_.jump_dx, cfg_.jump_dy));
    return out;
}

std::vector<std::pair<double, double>> SynthRenderer::ground_truth() const
{
    std::set<double> times;
    for (int s = 0; s <= static_cast<int>(std::floor(cfg_.duration_s)); ++s) times.insert(s);
    for (const auto& seg : cfg_.rr_segments) times.insert(seg.start_s);
    std::vector<std::pair<double, double>> out;
    for (double t : times) out.emplace_back(t, rr_at(t));
    return out;
}

void SynthRenderer::render_row(int index, int y, std::vector<double>& row) const
{
    const double t = index / cfg_.fps;
    const Shift sh = shift_at(index);
    const int ys = y - sh.dy;  // scene row
    const auto scene = static_cast<std::size_t>(ys + margin_);
    const double drift = cfg_.illum_drift * t;

    std::fill(row.begin(), row.end(), bg_rows_[scene]);

    // Torso: rows below the displaced chest edge, with box-filtered coverage of the edge row.
    const double edge = chest_top_ + displacement(t);
    const double coverage = std::clamp(ys + 1.0 - edge, 0.0, 1.0);
    if (coverage > 0.0) {
        const double pos = std::max(ys + 0.5 - edge - 0.5, 0.0);
        const auto k = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(k);
        const std::size_t k1 = std::min(k + 1, chest_rows_.size() - 1);
        const double chest = chest_rows_[std::min(k, chest_rows_.size() - 1)] * (1.0 - frac) + chest_rows_[k1] * frac;
        const double v = bg_rows_[scene] * (1.0 - coverage) + chest * coverage;
        const double half = cfg_.torso_half_width * face_w_;
        const int x0 = std::max(0, static_cast<int>(std::lround(cx_ - half)) + sh.dx);
        const int x1 = std::min(cfg_.width, static_cast<int>(std::lround(cx_ + half)) + sh.dx);
        for (int x = x0; x < x1; ++x) row[static_cast<std::size_t>(x)] = v;
    }

    const int rx0 = std::max(0, roi_.x + sh.dx);
    const int rx1 = std::min(cfg_.width, roi_.x + roi_.w + sh.dx);

    if (cfg_.clutter_frac > 0.0) {
        const int cy0 = roi_.y + static_cast<int>(std::lround(roi_.h * (1.0 - cfg_.clutter_frac)));
        if (ys >= cy0 && ys < roi_.y + roi_.h) {
            const int cells_x = cfg_.width / kClutterCell + 2;
            const auto cell_y = static_cast<std::size_t>((ys + margin_) / kClutterCell);
            for (int x = rx0; x < rx1; ++x) {
                const auto cell_x = static_cast<std::size_t>((x - sh.dx) / kClutterCell);
                row[static_cast<std::size_t>(x)] = clutter_cells_[cell_y * static_cast<std::size_t>(cells_x) + cell_x];
            }
        }
    }

    if (cfg_.flicker_frac > 0.0) {
        const int fy0 = roi_.y + static_cast<int>(std::lround(roi_.h * kFlickerTopFrac));
        const int fy1 = fy0 + static_cast<int>(std::ceil(roi_.h * cfg_.flicker_frac));
        if (ys >= fy0 && ys < fy1) {
            const double base = 128.0 + flicker_walk_[static_cast<std::size_t>(index)];
            for (int x = rx0; x < rx1; ++x) {
                const bool odd = ((x - sh.dx) / kFlickerStripeWidth) % 2 != 0;
                row[static_cast<std::size_t>(x)] = base + (odd ? kFlickerStripe : -kFlickerStripe);
            }
        }
    }

    if (drift != 0.0) {
        for (auto& v : row) v += drift;
    }
}

GrayImage SynthRenderer::render_scene(int index) const
{
    GrayImage img(cfg_.width, cfg_.height);
    std::vector<double> row(static_cast<std::size_t>(cfg_.width));
    for (int y = 0; y < cfg_.height; ++y) {
        render_row(index, y, row);
        std::copy(row.begin(), row.end(), img.row(y).begin());
    }
    return img;
}

FrameBuffer SynthRenderer::render(int index) const
{
    if (index < 0 || index >= meta_.frame_count) throw Error("frame index out of range");
    FrameBuffer frame{index, std::vector<std::uint8_t>(meta_.frame_bytes()), meta_};
    const auto& table = noise_table();
    SplitMix64 rng{mix_seed(cfg_.texture_seed ^ 0xA5A5A5A5ULL, static_cast<std::uint64_t>(index) + 3)};
    std::uint64_t bits = 0;
    int bits_left = 0;
    auto noise = [&] {
        if (bits_left == 0) {
            bits = rng.next();
            bits_left = 4;
        }
        const double n = table[bits & 0xFFFF];
        bits >>= 16;
        --bits_left;
        return n;
    };

    const int ch = meta_.channels();
    const double sigma = cfg_.noise_sigma;
    std::vector<double> row(static_cast<std::size_t>(cfg_.width));
    std::uint8_t* out = frame.data.data();
    for (int y = 0; y < cfg_.height; ++y) {
        render_row(index, y, row);
        for (int x = 0; x < cfg_.width; ++x) {
            for (int c = 0; c < ch; ++c) {
                double v = row[static_cast<std::size_t>(x)] + (ch == 3 ? kTint[static_cast<std::size_t>(c)] : 0.0);
                if (sigma > 0.0) v += sigma * noise();
                *out++ = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return frame;
}

std::optional<FrameBuffer> SynthSource::next()
{
    if (next_ >= renderer_.meta().frame_count) return std::nullopt;
    return renderer_.render(next_++);
}

void generate(const SynthConfig& cfg, const fs::path& out_dir)
{
    const SynthRenderer renderer(cfg);
    VideoWriter writer(out_dir, renderer.meta(), cfg.layout);
    for (int i = 0; i < renderer.meta().frame_count; ++i) writer.write(renderer.render(i));
    writer.finish();

    std::ofstream gt(out_dir / kGroundTruthName);
    if (!gt) throw Error("cannot write ground truth in " + out_dir.string());
    gt << "t,rr_bpm\n" << std::setprecision(17);
    for (const auto& [t, rr] : renderer.ground_truth()) gt << t << ',' << rr << '\n';

    const auto lms = renderer.landmarks();
    write_landmark_csv(out_dir / kLandmarksName, lms);
}

}  // namespace picrr
