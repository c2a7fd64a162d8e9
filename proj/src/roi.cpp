#include "picrr/roi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "picrr/error.hpp"

namespace picrr {

namespace {

bool finite(const Point2& p)
{
    return std::isfinite(p.x) && std::isfinite(p.y);
}

int round_half_up(double v)
{
    return static_cast<int>(std::floor(v + 0.5));
}

RoiRect clamp_edges(int x0, int y0, int x1, int y1, const VideoMeta& meta)
{
    x0 = std::clamp(x0, 0, meta.width);
    x1 = std::clamp(x1, 0, meta.width);
    y0 = std::clamp(y0, 0, meta.height);
    y1 = std::clamp(y1, 0, meta.height);
    RoiRect r{x0, y0, x1 - x0, y1 - y0};
    if (r.w < kMinRoiSide || r.h < kMinRoiSide) {
        throw Error("ROI smaller than 8x8 after clamping (" + std::to_string(std::max(r.w, 0)) + "x" +
                    std::to_string(std::max(r.h, 0)) + ")");
    }
    return r;
}

}  // namespace

RoiExtent roi_extent(const LandmarkSet& lm, const RoiGeometryConfig& g)
{
    if (!finite(lm.chin) || !finite(lm.left_ear) || !finite(lm.right_ear)) {
        throw Error("degenerate landmarks: non-finite coordinate");
    }
    const double face_w = std::abs(lm.right_ear.x - lm.left_ear.x);
    if (face_w == 0.0) {
        throw Error("degenerate landmarks: ears share the same x");
    }
    const double mid_x = (lm.left_ear.x + lm.right_ear.x) / 2.0;
    const double top = lm.chin.y + g.k_top * face_w;
    return {mid_x - g.k_w * face_w, top, mid_x + g.k_w * face_w, top + g.k_h * face_w};
}

RoiRect roi_from_landmarks(const LandmarkSet& lm, const VideoMeta& meta, const RoiGeometryConfig& g)
{
    const RoiExtent e = roi_extent(lm, g);
    return clamp_edges(round_half_up(e.x0), round_half_up(e.y0), round_half_up(e.x1), round_half_up(e.y1), meta);
}

RoiRect clamp_roi(const RoiRect& roi, const VideoMeta& meta)
{
    return clamp_edges(roi.x, roi.y, roi.x + roi.w, roi.y + roi.h, meta);
}

GrayImage crop_grayscale(const FrameBuffer& frame, const RoiRect& roi)
{
    const auto& m = frame.meta;
    if (roi.x < 0 || roi.y < 0 || roi.x + roi.w > m.width || roi.y + roi.h > m.height) {
        throw Error("ROI outside frame bounds");
    }
    GrayImage out(roi.w, roi.h);
    const int ch = m.channels();
    for (int y = 0; y < roi.h; ++y) {
        const std::uint8_t* src =
            frame.data.data() + (static_cast<std::size_t>(roi.y + y) * m.width + roi.x) * static_cast<std::size_t>(ch);
        auto dst = out.row(y);
        if (ch == 1) {
            for (int x = 0; x < roi.w; ++x) dst[x] = src[x];
        } else {
            for (int x = 0; x < roi.w; ++x, src += 3) {
                dst[x] = (static_cast<double>(src[0]) + src[1] + src[2]) / 3.0;
            }
        }
    }
    return out;
}

GrayImage crop(const GrayImage& image, const RoiRect& roi)
{
    if (roi.x < 0 || roi.y < 0 || roi.x + roi.w > image.width() || roi.y + roi.h > image.height()) {
        throw Error("ROI outside image bounds");
    }
    GrayImage out(roi.w, roi.h);
    for (int y = 0; y < roi.h; ++y) {
        auto src = image.row(roi.y + y).subspan(static_cast<std::size_t>(roi.x), static_cast<std::size_t>(roi.w));
        std::copy(src.begin(), src.end(), out.row(y).begin());
    }
    return out;
}

LandmarkTrack LandmarkTrack::from_records(std::vector<LandmarkSet> records)
{
    if (records.empty()) throw Error("landmark track is empty");
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].frame_index <= records[i - 1].frame_index) {
            throw Error("landmark frames must be strictly increasing (row " + std::to_string(i + 1) + ")");
        }
    }
    LandmarkTrack t;
    t.records_ = std::move(records);
    return t;
}

LandmarkTrack LandmarkTrack::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open landmarks " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error("landmark file is empty: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kLandmarkCsvHeader) {
        throw Error("landmark CSV header must be '" + std::string(kLandmarkCsvHeader) + "'");
    }
    std::vector<LandmarkSet> records;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) {
            throw Error("malformed landmark row at line " + std::to_string(lineno));
        }
        LandmarkSet lm;
        try {
            std::size_t used = 0;
            lm.frame_index = std::stoi(cells[0], &used);
            if (used != cells[0].size()) throw std::invalid_argument(cells[0]);
            double v[6];
            for (int k = 0; k < 6; ++k) {
                v[k] = std::stod(cells[static_cast<std::size_t>(k) + 1], &used);
                if (used != cells[static_cast<std::size_t>(k) + 1].size()) throw std::invalid_argument(cells[1]);
            }
            lm.chin = {v[0], v[1]};
            lm.left_ear = {v[2], v[3]};
            lm.right_ear = {v[4], v[5]};
        } catch (const std::logic_error&) {
            throw Error("malformed landmark row at line " + std::to_string(lineno));
        }
        if (!records.empty() && lm.frame_index <= records.back().frame_index) {
            throw Error("unsorted landmark frames at line " + std::to_string(lineno));
        }
        records.push_back(lm);
    }
    if (records.empty()) throw Error("landmark file has no records: " + path.string());
    return from_records(std::move(records));
}

const LandmarkSet& LandmarkTrack::lookup(int frame_index) const
{
    auto it = std::upper_bound(records_.begin(), records_.end(), frame_index,
                               [](int f, const LandmarkSet& r) { return f < r.frame_index; });
    if (it == records_.begin()) {
        throw Error("no landmarks yet at frame " + std::to_string(frame_index));
    }
    return *std::prev(it);
}

void write_landmark_csv(const std::filesystem::path& path, std::span<const LandmarkSet> records)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << kLandmarkCsvHeader << '\n' << std::setprecision(17);
    for (const auto& r : records) {
        out << r.frame_index << ',' << r.chin.x << ',' << r.chin.y << ',' << r.left_ear.x << ',' << r.left_ear.y << ','
            << r.right_ear.x << ',' << r.right_ear.y << '\n';
    }
}

}  // namespace picrr
