#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace picrr {

/**
 * Real-valued single-channel image, row-major.
 *
 * Grayscale samples stay in [0,255] as doubles so that row averages never
 * see a rounding step.
 */
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    double& at(int x, int y) { return pixels_[index(x, y)]; }
    double at(int x, int y) const { return pixels_[index(x, y)]; }

    std::span<double> row(int y) { return {pixels_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
    std::span<const double> row(int y) const
    {
        return {pixels_.data() + index(0, y), static_cast<std::size_t>(width_)};
    }

    std::vector<double>& pixels() { return pixels_; }
    const std::vector<double>& pixels() const { return pixels_; }

    GrayImage transposed() const;

    bool operator==(const GrayImage&) const = default;

private:
    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

}  // namespace picrr
