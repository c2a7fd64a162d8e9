#include <doctest.h>

#include <cmath>
#include <numbers>

#include "picrr/breathing.hpp"
#include "picrr/pipeline.hpp"
#include "picrr/synth.hpp"
#include "support.hpp"

using namespace picrr;
using testing::contains;
using testing::error_of;

namespace {

SynthConfig quiet(double duration_s = 4.0)
{
    SynthConfig c;
    c.duration_s = duration_s;
    c.noise_sigma = 0.0;
    return c;
}

// Sub-pixel chest edge position in one column, read back from the box-filtered
// edge row: rows above the edge equal the background column, the edge row mixes
// background and the first chest row by its coverage.
double measured_edge(const GrayImage& scene, const GrayImage& rest, int col, int bg_col, int rest_row)
{
    const double chest0 = rest.at(col, rest_row);
    for (int y = 0; y < scene.height(); ++y) {
        const double bg = scene.at(bg_col, y);
        const double v = scene.at(col, y);
        if (std::abs(v - bg) > 1e-9) return y + 1.0 - (v - bg) / (chest0 - bg);
    }
    return -1.0;
}

}  // namespace

TEST_CASE("default recording layout")
{
    const SynthRenderer r(SynthConfig{});
    CHECK(r.meta().frame_count == 1800);
    CHECK(r.meta().width == 320);
    CHECK(r.chest_top() == doctest::Approx(127.0));
    const auto gt = r.ground_truth();
    CHECK(gt.size() == 61u);
    for (const auto& [t, rr] : gt) CHECK(rr == 15.0);
    const auto lms = r.landmarks();
    REQUIRE(lms.size() == 1u);
    CHECK(roi_from_landmarks(lms[0], r.meta(), {}) == RoiRect{100, 100, 120, 90});
}

TEST_CASE("rate segments")
{
    SynthConfig c = quiet(60.0);
    c.rr_segments = {{0.0, 15.0}, {30.0, 20.0}};
    const SynthRenderer r(c);
    CHECK(r.rr_at(29.99) == 15.0);
    CHECK(r.rr_at(30.0) == 20.0);
    for (const auto& [t, rr] : r.ground_truth()) CHECK(rr == (t < 30.0 ? 15.0 : 20.0));
    // continuous displacement across the switch
    CHECK(std::abs(r.displacement(30.0 + 1e-6) - r.displacement(30.0 - 1e-6)) < 1e-4);
    // phase at 30 s is 7.5 cycles, i.e. back at zero
    CHECK(std::abs(r.displacement(30.0)) < 1e-9);

    c.rr_segments = {{0.0, 60.0}};
    CHECK(contains(error_of([&] { SynthRenderer{c}; }), "rr"));
    c.rr_segments = {{1.0, 15.0}};
    CHECK(error_of([&] { SynthRenderer{c}; }) != "<no error>");
}

TEST_CASE("rendering is deterministic")
{
    SynthConfig c = quiet();
    c.noise_sigma = 3.0;
    const SynthRenderer a(c), b(c);
    for (int i : {0, 17, 119}) CHECK(a.render(i).data == b.render(i).data);
    c.texture_seed = 2;
    CHECK(SynthRenderer(c).render(0).data != a.render(0).data);
    CHECK(error_of([&] { a.render(120); }) != "<no error>");
}

TEST_CASE("the rendered chest edge follows A sin(2 pi f t)")
{
    SynthConfig c = quiet(8.0);
    c.amplitude_px = 2.0;
    const SynthRenderer r(c);
    SynthConfig still = c;
    still.amplitude_px = 0.0;
    const auto rest = SynthRenderer(still).render_scene(0);
    const int col = c.width / 2, bg_col = 5;
    const int rest_row = static_cast<int>(r.chest_top());
    for (int i = 0; i < r.meta().frame_count; i += 7) {
        const double t = i / c.fps;
        const double expected = r.chest_top() + 2.0 * std::sin(2.0 * std::numbers::pi * 0.25 * t);
        REQUIRE(std::abs(measured_edge(r.render_scene(i), rest, col, bg_col, rest_row) - expected) <= 0.2);
    }
}

TEST_CASE("RGB channels average back to the scene")
{
    const SynthRenderer r(quiet());
    const auto scene = r.render_scene(10);
    const auto gray = to_grayscale(r.render(10));
    for (int y = 0; y < scene.height(); ++y)
        for (int x = 0; x < scene.width(); ++x) REQUIRE(std::abs(gray.at(x, y) - scene.at(x, y)) <= 0.5 + 1e-9);

    SynthConfig g = quiet();
    g.pixel_format = PixelFormat::GRAY8;
    const SynthRenderer rg(g);
    CHECK(rg.render(0).data.size() == static_cast<std::size_t>(320 * 240));
}

TEST_CASE("a jump translates the scene and adds a landmark record")
{
    SynthConfig c = quiet(4.0);
    c.roi_jump_at_s = 2.0;
    const SynthRenderer r(c);
    const auto lms = r.landmarks();
    REQUIRE(lms.size() == 2u);
    CHECK(lms[1].frame_index == 60);
    CHECK(lms[1].chin.x - lms[0].chin.x == doctest::Approx(8.0));
    CHECK(lms[1].chin.y - lms[0].chin.y == doctest::Approx(6.0));
    const auto before = r.render_scene(59), after = r.render_scene(60);
    // Away from the moving edge the scene is a pure shift.
    for (int y = 20; y < 100; ++y)
        for (int x = 20; x < 300; ++x) REQUIRE(after.at(x + 8, y + 6) == doctest::Approx(before.at(x, y)));

    c.roi_jump_at_s = 10.0;
    CHECK(error_of([&] { SynthRenderer{c}; }) != "<no error>");
}

TEST_CASE("no motion gives no confident rate")
{
    SynthConfig c = quiet(30.0);
    c.amplitude_px = 0.0;
    c.noise_sigma = 2.0;
    const SynthRenderer r(c);
    SynthSource src(r);
    RunConfig cfg;
    const auto res = run_stream(src, cfg, RoiSource{LandmarkTrack::from_records(r.landmarks())});
    REQUIRE(res.predictions.size() == 11u);
    // Noise alone must not look like a steady 15 BPM breath.
    int near_truth = 0;
    for (const auto& p : res.predictions)
        if (p.valid && std::abs(*p.rr_bpm - 15.0) <= 2.0) ++near_truth;
    CHECK(near_truth < 6);
}

TEST_CASE("generate writes video, ground truth and landmarks")
{
    testing::TempDir tmp;
    SynthConfig c = quiet(1.0);
    c.fps = 10.0;
    c.width = 160;
    c.height = 120;
    c.layout = StorageLayout::Raw;
    generate(c, tmp / "rec");
    CHECK(std::filesystem::exists(tmp / "rec" / std::string(kGroundTruthName)));
    CHECK(std::filesystem::exists(tmp / "rec" / std::string(kLandmarksName)));
    const auto src = open_source(tmp / "rec");
    CHECK(src->meta().frame_count == 10);
    const SynthRenderer r(c);
    CHECK(src->next()->data == r.render(0).data);
    CHECK(testing::read_text(tmp / "rec" / std::string(kGroundTruthName)).rfind("t,rr_bpm\n0,15\n1,15\n", 0) == 0);
    CHECK(LandmarkTrack::load(tmp / "rec" / std::string(kLandmarksName)).records().size() == 1u);
}

TEST_CASE("synth JSON overrides")
{
    const auto c = apply_synth_json({}, R"({"fps": 20, "rr_segments": [[0, 12], [10, 18]], "roi_jump_at_s": 5})");
    CHECK(c.fps == 20.0);
    REQUIRE(c.rr_segments.size() == 2u);
    CHECK(c.rr_segments[1].rr_bpm == 18.0);
    CHECK(*c.roi_jump_at_s == 5.0);
    CHECK(error_of([] { apply_synth_json({}, R"({"fsp": 20})"); }) != "<no error>");
}
