#include "picrr/image.hpp"

#include "picrr/error.hpp"

namespace picrr {

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height)
{
    if (width < 0 || height < 0) {
        throw Error("image dimensions must be non-negative");
    }
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage GrayImage::transposed() const
{
    GrayImage out(height_, width_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            out.at(y, x) = at(x, y);
        }
    }
    return out;
}

}  // namespace picrr
