#pragma once

#include <cstdint>
#include <vector>

#include "picrr/image.hpp"

namespace picrr {

/// Thresholds are on the raw 3x3 Sobel magnitude scale (up to 255*4*sqrt(2)).
struct CannyConfig {
    double sigma = 1.4;
    double low = 50.0;
    double high = 100.0;
    int dilation_radius = 3;

    void validate() const;
};

/// Boolean pixel-selection mask; true pixels take part in profile averaging.
class EdgeMask {
public:
    EdgeMask() = default;
    EdgeMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }

    std::size_t count() const;
    bool none() const { return count() == 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    EdgeMask transposed() const;
    bool operator==(const EdgeMask&) const = default;

private:
    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// ceil(3*sigma); also the width of the border that never carries edges.
int blur_radius(double sigma);

/// Normalised 1-D Gaussian taps, length 2*blur_radius(sigma)+1.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with reflect-101 padding.
GrayImage gaussian_blur(const GrayImage& image, double sigma);

/// Gradient orientation bins: 0 -> 0 deg, 1 -> 45, 2 -> 90, 3 -> 135.
struct Gradient {
    GrayImage magnitude;
    std::vector<std::uint8_t> direction;
};

int quantize_direction(double gx, double gy);
Gradient sobel(const GrayImage& image);

/// Thin edges to one pixel; pixels closer than `border` to the image edge are zeroed.
GrayImage non_max_suppression(const Gradient& gradient, int border);

/// 8-connected double-threshold hysteresis over an edge-strength image.
EdgeMask hysteresis(const GrayImage& strength, double low, double high);

EdgeMask canny(const GrayImage& roi, const CannyConfig& cfg);

/// Square (2r+1)x(2r+1) dilation, clipped at the borders.
EdgeMask dilate(const EdgeMask& mask, int radius);

}  // namespace picrr
