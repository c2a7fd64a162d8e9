#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "picrr/edges.hpp"
#include "picrr/image.hpp"

namespace picrr {

enum class ProfileMode { FullRoi, Edges };

std::string_view to_string(ProfileMode mode);
ProfileMode parse_profile_mode(std::string_view text);

/// One frame's ROI collapsed to a fixed-length column.
struct Profile1D {
    std::vector<double> values;
    int epoch = 0;  // re-estimation epoch the ROI/mask came from
    int frame = 0;
};

/// Mean of each ROI row.
std::vector<double> full_roi_profile(const GrayImage& roi);

struct MaskedProfile {
    std::vector<double> values;
    std::vector<std::uint8_t> valid;  // 0 where the row had no masked pixel
};

/**
 * Mean over masked pixels of each row. Rows without masked pixels are
 * flagged and filled by linear interpolation between the nearest valid rows,
 * constant beyond the first/last valid row. Throws when the mask is empty.
 */
MaskedProfile edges_profile(const GrayImage& roi, const EdgeMask& mask);

/// Linear interpolation at i*(H-1)/(L-1), i = 0..L-1.
std::vector<double> resample_profile(std::span<const double> raw, int length);

}  // namespace picrr
