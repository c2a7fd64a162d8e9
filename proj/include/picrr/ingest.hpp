#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "picrr/image.hpp"

namespace picrr {

enum class PixelFormat { RGB24, GRAY8 };

int channel_count(PixelFormat format);
std::string_view to_string(PixelFormat format);
PixelFormat parse_pixel_format(std::string_view text);

struct VideoMeta {
    int width = 0;
    int height = 0;
    double fps = 0.0;
    int frame_count = 0;
    PixelFormat pixel_format = PixelFormat::RGB24;

    int channels() const { return channel_count(pixel_format); }
    std::size_t frame_bytes() const;
    /// Throws Error unless width, height >= 16, fps > 0 and frame_count >= 0.
    void validate() const;

    bool operator==(const VideoMeta&) const = default;
};

struct FrameBuffer {
    int index = 0;
    std::vector<std::uint8_t> data;  // row-major, channel-interleaved
    VideoMeta meta;
};

/// Single-consumer stream of frames in ascending index order.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual const VideoMeta& meta() const = 0;
    /// Next frame, or nullopt once meta().frame_count frames were produced.
    virtual std::optional<FrameBuffer> next() = 0;
};

inline constexpr std::string_view kManifestName = "meta.json";

VideoMeta read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const VideoMeta& meta);

/**
 * Opens either layout understood by the reader:
 *  - a directory holding meta.json plus frame_%06d.ppm (RGB24) or
 *    frame_%06d.pgm (GRAY8) files,
 *  - a headerless .rgb24 / .gray8 file (or a directory containing exactly one)
 *    with meta.json next to it.
 */
std::unique_ptr<FrameSource> open_source(const std::filesystem::path& path);

std::string frame_file_name(int index, PixelFormat format);

/// Binary PPM (P6) or PGM (P5), maxval 255.
void write_pnm(const std::filesystem::path& path, const FrameBuffer& frame);
FrameBuffer read_pnm(const std::filesystem::path& path, const VideoMeta& meta, int index);

enum class StorageLayout { ImageSequence, Raw };

/// Writes frames in one of the two on-disk layouts and the manifest.
class VideoWriter {
public:
    /// `dir` must not exist or be empty.
    VideoWriter(std::filesystem::path dir, VideoMeta meta, StorageLayout layout);
    ~VideoWriter();
    VideoWriter(const VideoWriter&) = delete;
    VideoWriter& operator=(const VideoWriter&) = delete;

    void write(const FrameBuffer& frame);
    /// Flushes, verifies the frame count and writes meta.json.
    void finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Channel mean with equal weights; identity for GRAY8.
GrayImage to_grayscale(const FrameBuffer& frame);
GrayImage to_grayscale(const GrayImage& gray);

}  // namespace picrr
