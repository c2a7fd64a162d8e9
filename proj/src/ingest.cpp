#include "picrr/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "picrr/error.hpp"

namespace fs = std::filesystem;

namespace picrr {

int channel_count(PixelFormat format)
{
    return format == PixelFormat::RGB24 ? 3 : 1;
}

std::string_view to_string(PixelFormat format)
{
    return format == PixelFormat::RGB24 ? "RGB24" : "GRAY8";
}

PixelFormat parse_pixel_format(std::string_view text)
{
    if (text == "RGB24") return PixelFormat::RGB24;
    if (text == "GRAY8") return PixelFormat::GRAY8;
    throw Error("unknown pixel_format '" + std::string(text) + "'");
}

std::size_t VideoMeta::frame_bytes() const
{
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * static_cast<std::size_t>(channels());
}

void VideoMeta::validate() const
{
    if (width < 16 || height < 16) {
        throw Error("video must be at least 16x16, got " + std::to_string(width) + "x" + std::to_string(height));
    }
    if (!(fps > 0.0)) {
        throw Error("fps must be positive");
    }
    if (frame_count < 0) {
        throw Error("frame_count must be non-negative");
    }
}

VideoMeta read_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("missing manifest: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed manifest " + path.string() + ": " + e.what());
    }
    static const std::vector<std::string> keys{"width", "height", "fps", "frame_count", "pixel_format"};
    if (!j.is_object() || j.size() != keys.size()) {
        throw Error("manifest must hold exactly the keys width, height, fps, frame_count, pixel_format");
    }
    VideoMeta meta;
    try {
        for (const auto& k : keys) {
            if (!j.contains(k)) throw Error("manifest is missing key '" + k + "'");
        }
        if (!j["width"].is_number_integer() || !j["height"].is_number_integer() ||
            !j["frame_count"].is_number_integer() || !j["fps"].is_number()) {
            throw Error("manifest has a non-numeric dimension field");
        }
        meta.width = j["width"].get<int>();
        meta.height = j["height"].get<int>();
        meta.fps = j["fps"].get<double>();
        meta.frame_count = j["frame_count"].get<int>();
        meta.pixel_format = parse_pixel_format(j["pixel_format"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed manifest " + path.string() + ": " + e.what());
    }
    meta.validate();
    return meta;
}

void write_manifest(const fs::path& path, const VideoMeta& meta)
{
    nlohmann::ordered_json j;
    j["width"] = meta.width;
    j["height"] = meta.height;
    j["fps"] = meta.fps;
    j["frame_count"] = meta.frame_count;
    j["pixel_format"] = std::string(to_string(meta.pixel_format));
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest " + path.string());
    out << j.dump(2) << '\n';
}

std::string frame_file_name(int index, PixelFormat format)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06d.%s", index, format == PixelFormat::RGB24 ? "ppm" : "pgm");
    return buf;
}

void write_pnm(const fs::path& path, const FrameBuffer& frame)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << (frame.meta.pixel_format == PixelFormat::RGB24 ? "P6" : "P5") << '\n'
        << frame.meta.width << ' ' << frame.meta.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.data.data()), static_cast<std::streamsize>(frame.data.size()));
    if (!out) throw Error("short write to " + path.string());
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in)
{
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            if (!tok.empty()) break;
        } else {
            tok.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return tok;
}

int parse_int(const std::string& s, const fs::path& path)
{
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error("bad PNM header in " + path.string());
    }
}

}  // namespace

FrameBuffer read_pnm(const fs::path& path, const VideoMeta& meta, int index)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open frame " + path.string());
    const std::string magic = pnm_token(in);
    const std::string expected = meta.pixel_format == PixelFormat::RGB24 ? "P6" : "P5";
    if (magic != expected) {
        throw Error("size mismatch: " + path.string() + " is '" + magic + "', manifest expects " + expected);
    }
    const int w = parse_int(pnm_token(in), path);
    const int h = parse_int(pnm_token(in), path);
    const int maxval = parse_int(pnm_token(in), path);
    if (w != meta.width || h != meta.height) {
        throw Error("size mismatch: " + path.string() + " is " + std::to_string(w) + "x" + std::to_string(h));
    }
    if (maxval != 255) throw Error("only 8-bit PNM is supported: " + path.string());

    FrameBuffer frame{index, std::vector<std::uint8_t>(meta.frame_bytes()), meta};
    in.read(reinterpret_cast<char*>(frame.data.data()), static_cast<std::streamsize>(frame.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.data.size())) {
        throw Error("size mismatch: truncated frame " + path.string());
    }
    return frame;
}

namespace {

class ImageSequenceSource final : public FrameSource {
public:
    ImageSequenceSource(fs::path dir, VideoMeta meta) : dir_(std::move(dir)), meta_(meta)
    {
        const std::regex pattern(R"(frame_(\d{6})\.(ppm|pgm))");
        const std::string ext = meta_.pixel_format == PixelFormat::RGB24 ? "ppm" : "pgm";
        std::vector<int> indices;
        for (const auto& entry : fs::directory_iterator(dir_)) {
            std::smatch m;
            const std::string name = entry.path().filename().string();
            if (!std::regex_match(name, m, pattern)) continue;
            if (m[2] != ext) {
                throw Error("size mismatch: " + name + " does not match pixel_format " +
                            std::string(to_string(meta_.pixel_format)));
            }
            indices.push_back(std::stoi(m[1]));
        }
        std::sort(indices.begin(), indices.end());
        if (static_cast<int>(indices.size()) != meta_.frame_count) {
            throw Error("manifest declares " + std::to_string(meta_.frame_count) + " frames, found " +
                        std::to_string(indices.size()));
        }
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] != static_cast<int>(i)) {
                throw Error("non-contiguous frame indices: expected frame " + std::to_string(i));
            }
        }
    }

    const VideoMeta& meta() const override { return meta_; }

    std::optional<FrameBuffer> next() override
    {
        if (next_ >= meta_.frame_count) return std::nullopt;
        const int idx = next_++;
        return read_pnm(dir_ / frame_file_name(idx, meta_.pixel_format), meta_, idx);
    }

private:
    fs::path dir_;
    VideoMeta meta_;
    int next_ = 0;
};

class RawSource final : public FrameSource {
public:
    RawSource(const fs::path& file, VideoMeta meta) : meta_(meta), in_(file, std::ios::binary)
    {
        if (!in_) throw Error("cannot open " + file.string());
        const auto expected = static_cast<std::uintmax_t>(meta_.frame_bytes()) * static_cast<std::uintmax_t>(meta_.frame_count);
        const auto actual = fs::file_size(file);
        if (actual != expected) {
            throw Error("size mismatch: " + file.string() + " has " + std::to_string(actual) + " bytes, manifest implies " +
                        std::to_string(expected));
        }
    }

    const VideoMeta& meta() const override { return meta_; }

    std::optional<FrameBuffer> next() override
    {
        if (next_ >= meta_.frame_count) return std::nullopt;
        FrameBuffer frame{next_, std::vector<std::uint8_t>(meta_.frame_bytes()), meta_};
        in_.read(reinterpret_cast<char*>(frame.data.data()), static_cast<std::streamsize>(frame.data.size()));
        if (in_.gcount() != static_cast<std::streamsize>(frame.data.size())) {
            throw Error("size mismatch: raw stream ended at frame " + std::to_string(next_));
        }
        ++next_;
        return frame;
    }

private:
    VideoMeta meta_;
    std::ifstream in_;
    int next_ = 0;
};

bool is_raw_extension(const fs::path& p)
{
    const auto ext = p.extension();
    return ext == ".rgb24" || ext == ".gray8";
}

PixelFormat format_for_extension(const fs::path& p)
{
    return p.extension() == ".rgb24" ? PixelFormat::RGB24 : PixelFormat::GRAY8;
}

std::unique_ptr<FrameSource> open_raw(const fs::path& file, const fs::path& manifest)
{
    VideoMeta meta = read_manifest(manifest);
    if (format_for_extension(file) != meta.pixel_format) {
        throw Error("size mismatch: " + file.filename().string() + " does not match pixel_format " +
                    std::string(to_string(meta.pixel_format)));
    }
    return std::make_unique<RawSource>(file, meta);
}

}  // namespace

std::unique_ptr<FrameSource> open_source(const fs::path& path)
{
    if (fs::is_regular_file(path)) {
        if (!is_raw_extension(path)) {
            throw Error("unsupported source file " + path.string() + " (expected .rgb24 or .gray8)");
        }
        return open_raw(path, path.parent_path() / kManifestName);
    }
    if (!fs::is_directory(path)) {
        throw Error("no such source: " + path.string());
    }
    const fs::path manifest = path / kManifestName;
    if (!fs::exists(manifest)) {
        throw Error("missing manifest: " + manifest.string());
    }
    std::vector<fs::path> raws;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && is_raw_extension(entry.path())) raws.push_back(entry.path());
    }
    if (raws.size() > 1) throw Error("ambiguous source: several raw files in " + path.string());
    if (raws.size() == 1) return open_raw(raws.front(), manifest);
    return std::make_unique<ImageSequenceSource>(path, read_manifest(manifest));
}

struct VideoWriter::Impl {
    fs::path dir;
    VideoMeta meta;
    StorageLayout layout;
    std::ofstream raw;
    int written = 0;
    bool finished = false;
};

VideoWriter::VideoWriter(fs::path dir, VideoMeta meta, StorageLayout layout)
    : impl_(std::make_unique<Impl>())
{
    meta.validate();
    if (fs::exists(dir) && !fs::is_empty(dir)) {
        throw Error("output path exists and is not empty: " + dir.string());
    }
    fs::create_directories(dir);
    impl_->dir = std::move(dir);
    impl_->meta = meta;
    impl_->layout = layout;
    if (layout == StorageLayout::Raw) {
        const char* name = meta.pixel_format == PixelFormat::RGB24 ? "video.rgb24" : "video.gray8";
        impl_->raw.open(impl_->dir / name, std::ios::binary);
        if (!impl_->raw) throw Error("cannot create raw video in " + impl_->dir.string());
    }
}

VideoWriter::~VideoWriter() = default;

void VideoWriter::write(const FrameBuffer& frame)
{
    auto& s = *impl_;
    if (s.finished) throw Error("writer already finished");
    if (frame.index != s.written) throw Error("frames must be written in order");
    if (frame.data.size() != s.meta.frame_bytes()) throw Error("size mismatch: frame buffer length");
    if (s.layout == StorageLayout::Raw) {
        s.raw.write(reinterpret_cast<const char*>(frame.data.data()), static_cast<std::streamsize>(frame.data.size()));
        if (!s.raw) throw Error("short write to raw video");
    } else {
        FrameBuffer tagged = frame;
        tagged.meta = s.meta;
        write_pnm(s.dir / frame_file_name(frame.index, s.meta.pixel_format), tagged);
    }
    ++s.written;
}

void VideoWriter::finish()
{
    auto& s = *impl_;
    if (s.finished) return;
    if (s.written != s.meta.frame_count) {
        throw Error("wrote " + std::to_string(s.written) + " frames, manifest declares " + std::to_string(s.meta.frame_count));
    }
    if (s.raw.is_open()) s.raw.close();
    write_manifest(s.dir / kManifestName, s.meta);
    s.finished = true;
}

GrayImage to_grayscale(const FrameBuffer& frame)
{
    const auto& m = frame.meta;
    if (frame.data.size() != m.frame_bytes()) throw Error("size mismatch: frame buffer length");
    GrayImage out(m.width, m.height);
    auto& px = out.pixels();
    if (m.pixel_format == PixelFormat::GRAY8) {
        std::copy(frame.data.begin(), frame.data.end(), px.begin());
        return out;
    }
    const std::uint8_t* src = frame.data.data();
    for (std::size_t i = 0; i < px.size(); ++i, src += 3) {
        px[i] = (static_cast<double>(src[0]) + src[1] + src[2]) / 3.0;
    }
    return out;
}

GrayImage to_grayscale(const GrayImage& gray)
{
    return gray;
}

}  // namespace picrr
