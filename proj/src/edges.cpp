#include "picrr/edges.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "picrr/error.hpp"

namespace picrr {

void CannyConfig::validate() const
{
    if (!(sigma > 0.0)) throw Error("canny sigma must be positive");
    if (!(low >= 0.0) || !(low < high)) throw Error("canny thresholds need 0 <= low < high");
    if (dilation_radius < 0) throw Error("dilation radius must be >= 0");
}

EdgeMask::EdgeMask(int width, int height, bool fill)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0)
{
}

std::size_t EdgeMask::count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

EdgeMask EdgeMask::transposed() const
{
    EdgeMask out(height_, width_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) out.set(y, x, at(x, y));
    return out;
}

namespace {

// Reflect-101: -1 -> 1, n -> n-2.
int reflect(int i, int n)
{
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

// Neighbour step along each quantised gradient direction.
constexpr int kStepX[4] = {1, 1, 0, -1};
constexpr int kStepY[4] = {0, 1, 1, 1};

}  // namespace

int blur_radius(double sigma)
{
    return static_cast<int>(std::ceil(3.0 * sigma));
}

std::vector<double> gaussian_kernel(double sigma)
{
    const int r = blur_radius(sigma);
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + r)] = v;
        sum += v;
    }
    for (auto& v : k) v /= sum;
    return k;
}

GrayImage gaussian_blur(const GrayImage& image, double sigma)
{
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    const int w = image.width();
    const int h = image.height();

    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        auto src = image.row(y);
        auto dst = tmp.row(y);
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[static_cast<std::size_t>(i + r)] * src[static_cast<std::size_t>(reflect(x + i, w))];
            dst[static_cast<std::size_t>(x)] = acc;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        auto dst = out.row(y);
        for (int i = -r; i <= r; ++i) {
            const double kv = k[static_cast<std::size_t>(i + r)];
            auto src = tmp.row(reflect(y + i, h));
            for (int x = 0; x < w; ++x) dst[static_cast<std::size_t>(x)] += kv * src[static_cast<std::size_t>(x)];
        }
    }
    return out;
}

int quantize_direction(double gx, double gy)
{
    double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
    if (deg < 0.0) deg += 180.0;
    if (deg >= 180.0) deg -= 180.0;
    // Boundary angles fall into the lower bin.
    if (deg <= 22.5) return 0;
    if (deg <= 67.5) return 1;
    if (deg <= 112.5) return 2;
    if (deg <= 157.5) return 3;
    return 0;
}

Gradient sobel(const GrayImage& image)
{
    const int w = image.width();
    const int h = image.height();
    Gradient g{GrayImage(w, h), std::vector<std::uint8_t>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h))};
    for (int y = 0; y < h; ++y) {
        const int ym = reflect(y - 1, h);
        const int yp = reflect(y + 1, h);
        for (int x = 0; x < w; ++x) {
            const int xm = reflect(x - 1, w);
            const int xp = reflect(x + 1, w);
            const double gx = (image.at(xp, ym) + 2.0 * image.at(xp, y) + image.at(xp, yp)) -
                              (image.at(xm, ym) + 2.0 * image.at(xm, y) + image.at(xm, yp));
            const double gy = (image.at(xm, yp) + 2.0 * image.at(x, yp) + image.at(xp, yp)) -
                              (image.at(xm, ym) + 2.0 * image.at(x, ym) + image.at(xp, ym));
            g.magnitude.at(x, y) = std::sqrt(gx * gx + gy * gy);
            g.direction[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
                static_cast<std::uint8_t>(quantize_direction(gx, gy));
        }
    }
    return g;
}

GrayImage non_max_suppression(const Gradient& gradient, int border)
{
    const auto& mag = gradient.magnitude;
    const int w = mag.width();
    const int h = mag.height();
    const int b = std::max(border, 1);
    GrayImage out(w, h);
    for (int y = b; y < h - b; ++y) {
        for (int x = b; x < w - b; ++x) {
            const double m = mag.at(x, y);
            if (m <= 0.0) continue;
            const int d = gradient.direction[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
            const double behind = mag.at(x - kStepX[d], y - kStepY[d]);
            const double ahead = mag.at(x + kStepX[d], y + kStepY[d]);
            // Two-pixel plateaus (a step between pixels) keep the pixel further
            // along the step direction; rounding-level differences count as ties.
            const double tol = 1e-9 * std::max({m, behind, ahead, 1.0});
            if (m - behind >= -tol && m - ahead > tol) out.at(x, y) = m;
        }
    }
    return out;
}

EdgeMask hysteresis(const GrayImage& strength, double low, double high)
{
    const int w = strength.width();
    const int h = strength.height();
    EdgeMask mask(w, h);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (strength.at(x, y) >= high && !mask.at(x, y)) {
                mask.set(x, y);
                stack.emplace_back(x, y);
            }
        }
    }
    while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = cx + dx;
                const int ny = cy + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h || mask.at(nx, ny)) continue;
                if (strength.at(nx, ny) >= low && strength.at(nx, ny) > 0.0) {
                    mask.set(nx, ny);
                    stack.emplace_back(nx, ny);
                }
            }
        }
    }
    return mask;
}

EdgeMask canny(const GrayImage& roi, const CannyConfig& cfg)
{
    cfg.validate();
    const int r = blur_radius(cfg.sigma);
    const int support = 2 * r + 1;
    if (roi.width() < std::max(support, 8) || roi.height() < std::max(support, 8)) {
        throw Error("ROI " + std::to_string(roi.width()) + "x" + std::to_string(roi.height()) +
                    " smaller than the Gaussian kernel support " + std::to_string(support));
    }
    const GrayImage blurred = gaussian_blur(roi, cfg.sigma);
    const Gradient grad = sobel(blurred);
    return hysteresis(non_max_suppression(grad, r), cfg.low, cfg.high);
}

EdgeMask dilate(const EdgeMask& mask, int radius)
{
    if (radius < 0) throw Error("dilation radius must be >= 0");
    if (radius == 0) return mask;
    const int w = mask.width();
    const int h = mask.height();
    // Separable: horizontal pass then vertical pass.
    EdgeMask horiz(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            for (int nx = std::max(0, x - radius); nx <= std::min(w - 1, x + radius); ++nx) horiz.set(nx, y);
        }
    }
    EdgeMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!horiz.at(x, y)) continue;
            for (int ny = std::max(0, y - radius); ny <= std::min(h - 1, y + radius); ++ny) out.set(x, ny);
        }
    }
    return out;
}

}  // namespace picrr
