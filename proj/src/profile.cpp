#include "picrr/profile.hpp"

#include <string>

#include "picrr/error.hpp"

namespace picrr {

std::string_view to_string(ProfileMode mode)
{
    return mode == ProfileMode::Edges ? "edges" : "full_roi";
}

ProfileMode parse_profile_mode(std::string_view text)
{
    if (text == "edges") return ProfileMode::Edges;
    if (text == "full_roi") return ProfileMode::FullRoi;
    throw Error("unknown profile_mode '" + std::string(text) + "' (expected full_roi or edges)");
}

std::vector<double> full_roi_profile(const GrayImage& roi)
{
    if (roi.empty()) throw Error("empty ROI");
    std::vector<double> out(static_cast<std::size_t>(roi.height()));
    for (int y = 0; y < roi.height(); ++y) {
        double sum = 0.0;
        for (double v : roi.row(y)) sum += v;
        out[static_cast<std::size_t>(y)] = sum / roi.width();
    }
    return out;
}

MaskedProfile edges_profile(const GrayImage& roi, const EdgeMask& mask)
{
    if (mask.width() != roi.width() || mask.height() != roi.height()) {
        throw Error("edge mask dimensions differ from ROI");
    }
    const auto h = static_cast<std::size_t>(roi.height());
    MaskedProfile p{std::vector<double>(h, 0.0), std::vector<std::uint8_t>(h, 0)};
    for (int y = 0; y < roi.height(); ++y) {
        double sum = 0.0;
        int n = 0;
        auto row = roi.row(y);
        for (int x = 0; x < roi.width(); ++x) {
            if (mask.at(x, y)) {
                sum += row[static_cast<std::size_t>(x)];
                ++n;
            }
        }
        if (n > 0) {
            p.values[static_cast<std::size_t>(y)] = sum / n;
            p.valid[static_cast<std::size_t>(y)] = 1;
        }
    }

    std::vector<std::size_t> valid_rows;
    for (std::size_t i = 0; i < h; ++i)
        if (p.valid[i]) valid_rows.push_back(i);
    if (valid_rows.empty()) throw Error("no edge pixels in ROI");

    for (std::size_t i = 0; i < valid_rows.front(); ++i) p.values[i] = p.values[valid_rows.front()];
    for (std::size_t i = valid_rows.back() + 1; i < h; ++i) p.values[i] = p.values[valid_rows.back()];
    for (std::size_t k = 0; k + 1 < valid_rows.size(); ++k) {
        const std::size_t a = valid_rows[k];
        const std::size_t b = valid_rows[k + 1];
        for (std::size_t i = a + 1; i < b; ++i) {
            const double f = static_cast<double>(i - a) / static_cast<double>(b - a);
            p.values[i] = p.values[a] + (p.values[b] - p.values[a]) * f;
        }
    }
    return p;
}

std::vector<double> resample_profile(std::span<const double> raw, int length)
{
    if (raw.size() < 2 || length < 2) throw Error("resampling needs at least 2 input and 2 output samples");
    const auto h = raw.size();
    std::vector<double> out(static_cast<std::size_t>(length));
    if (static_cast<std::size_t>(length) == h) {
        out.assign(raw.begin(), raw.end());
        return out;
    }
    const double scale = static_cast<double>(h - 1) / static_cast<double>(length - 1);
    for (int i = 0; i < length; ++i) {
        const double pos = i * scale;
        auto lo = static_cast<std::size_t>(pos);
        if (lo >= h - 1) lo = h - 2;
        const double frac = pos - static_cast<double>(lo);
        out[static_cast<std::size_t>(i)] = raw[lo] + (raw[lo + 1] - raw[lo]) * frac;
    }
    out.back() = raw.back();
    return out;
}

}  // namespace picrr
