#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "picrr/image.hpp"
#include "picrr/ingest.hpp"

namespace picrr {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Chin and ear landmarks of one face observation, in frame pixels.
struct LandmarkSet {
    int frame_index = 0;
    Point2 chin;
    Point2 left_ear;
    Point2 right_ear;
};

struct RoiRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const RoiRect&) const = default;
};

/// Un-rounded, un-clamped chest rectangle as [x0,x1) x [y0,y1).
struct RoiExtent {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

/// Chest box in units of face width (ear-to-ear distance).
struct RoiGeometryConfig {
    double k_w = 1.0;    // half-width
    double k_top = 0.5;  // gap between chin and ROI top
    double k_h = 1.5;    // height
};

inline constexpr int kMinRoiSide = 8;

RoiExtent roi_extent(const LandmarkSet& lm, const RoiGeometryConfig& geometry);

/// Rounds the extent half-up and clamps it to the frame. Throws on degenerate
/// landmarks or when less than 8x8 pixels remain.
RoiRect roi_from_landmarks(const LandmarkSet& lm, const VideoMeta& meta, const RoiGeometryConfig& geometry);

/// Clamps an explicit rectangle to the frame and enforces the 8x8 minimum.
RoiRect clamp_roi(const RoiRect& roi, const VideoMeta& meta);

/// Grayscale samples of `roi` only; same values as cropping to_grayscale(frame).
GrayImage crop_grayscale(const FrameBuffer& frame, const RoiRect& roi);
GrayImage crop(const GrayImage& image, const RoiRect& roi);

/// Step-hold landmark track: lookup(i) is the last record at or before frame i.
class LandmarkTrack {
public:
    /// CSV with header `frame,chin_x,chin_y,lear_x,lear_y,rear_x,rear_y`.
    static LandmarkTrack load(const std::filesystem::path& path);
    static LandmarkTrack from_records(std::vector<LandmarkSet> records);

    const LandmarkSet& lookup(int frame_index) const;
    std::span<const LandmarkSet> records() const { return records_; }

private:
    std::vector<LandmarkSet> records_;
};

inline constexpr const char* kLandmarkCsvHeader = "frame,chin_x,chin_y,lear_x,lear_y,rear_x,rear_y";

void write_landmark_csv(const std::filesystem::path& path, std::span<const LandmarkSet> records);

}  // namespace picrr
