#pragma once

// RGB images, binary PPM (P6) codec, fixed-size block partitioning, per-channel
// histograms and the classification overlay renderer.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qentropy/entropy.hpp"
#include "qentropy/error.hpp"
#include "qentropy/parallel.hpp"

namespace qentropy {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major RGB image with top-left origin.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(std::size_t width, std::size_t height, Rgb fill = {})
        : width_(width), height_(height), pixels_(width * height, fill) {}

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }

    Rgb& at(std::size_t x, std::size_t y) noexcept { return pixels_[y * width_ + x]; }
    const Rgb& at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }

    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    std::span<Rgb> pixels() noexcept { return pixels_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<Rgb> pixels_;
};

// ---------------------------------------------------------------------------
// PPM P6 codec

namespace detail {

class PpmHeaderReader {
public:
    explicit PpmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }

    void expect_magic() {
        if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '6')
            throw DecodeError(0, "missing P6 magic number");
        pos_ = 2;
    }

    // Skips whitespace and '#' comments; at least one whitespace byte must precede a field.
    void skip_separator() {
        bool seen = false;
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
                seen = true;
            } else if (is_space(c)) {
                ++pos_;
                seen = true;
            } else {
                break;
            }
        }
        if (pos_ >= bytes_.size()) throw DecodeError(pos_, "truncated header");
        if (!seen) throw DecodeError(pos_, "expected whitespace in header");
    }

    std::uint64_t read_uint(const char* field) {
        skip_separator();
        const std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            v = v * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
            if (v > (1ULL << 31)) throw DecodeError(start, std::string(field) + " is too large");
            ++pos_;
        }
        if (pos_ == start) throw DecodeError(start, std::string("expected decimal ") + field);
        return v;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void read_raster_separator() {
        if (pos_ >= bytes_.size()) throw DecodeError(pos_, "truncated header");
        if (!is_space(bytes_[pos_])) throw DecodeError(pos_, "expected single whitespace after maxval");
        ++pos_;
    }

private:
    static bool is_space(std::uint8_t c) noexcept {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Decodes a binary PPM (P6, maxval 255). Bytes after the raster are ignored.
inline RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
    detail::PpmHeaderReader reader(bytes);
    reader.expect_magic();
    const auto width = reader.read_uint("width");
    const auto height = reader.read_uint("height");
    const std::size_t maxval_pos = reader.pos();
    const auto maxval = reader.read_uint("maxval");
    if (width == 0 || height == 0) throw DecodeError(maxval_pos, "image dimensions must be positive");
    if (maxval != 255) throw DecodeError(maxval_pos, "unsupported maxval " + std::to_string(maxval) + " (need 255)");
    reader.read_raster_separator();

    const std::size_t start = reader.pos();
    const std::size_t need = static_cast<std::size_t>(width * height * 3);
    if (bytes.size() - start < need)
        throw DecodeError(bytes.size(), "truncated payload: expected " + std::to_string(need) + " bytes, got " +
                                            std::to_string(bytes.size() - start));

    RgbImage img(width, height);
    std::memcpy(img.pixels().data(), bytes.data() + start, need);
    return img;
}

inline RgbImage decode_ppm(std::string_view bytes) {
    return decode_ppm(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

/// Canonical P6 serialization: "P6\n<w> <h>\n255\n" followed by the raster.
inline std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
    const std::string header =
        "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const auto* raw = reinterpret_cast<const std::uint8_t*>(img.pixels().data());
    out.insert(out.end(), raw, raw + img.pixels().size() * 3);
    return out;
}

static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed for raster copies");

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

inline RgbImage load_image(const std::filesystem::path& path) { return decode_ppm(read_file_bytes(path)); }

inline void save_image(const std::filesystem::path& path, const RgbImage& img) {
    write_file_bytes(path, encode_ppm(img));
}

// ---------------------------------------------------------------------------
// Block partitioning

inline constexpr std::size_t kDefaultBlockSize = 16;

/// Pixel square [x0, x0+size) x [y0, y0+size) at grid position (row, col).
struct BlockRect {
    std::size_t row = 0, col = 0;
    std::size_t x0 = 0, y0 = 0;
    std::size_t size = 0;
};

/// Read-only view of one block; must not outlive the image.
struct BlockView {
    const RgbImage* image = nullptr;
    BlockRect rect;

    std::size_t size() const noexcept { return rect.size; }
    const Rgb& pixel(std::size_t dx, std::size_t dy) const noexcept {
        return image->at(rect.x0 + dx, rect.y0 + dy);
    }
};

/// Floor tiling of an image from the top-left corner. Right and bottom
/// strips narrower than one block are not covered.
struct BlockGrid {
    std::size_t block_size = kDefaultBlockSize;
    std::size_t rows = 0, cols = 0;
    std::size_t width = 0, height = 0;
    std::vector<BlockRect> blocks;    // row-major
    std::vector<std::string> labels;  // empty, or one per block

    std::size_t size() const noexcept { return blocks.size(); }
    BlockView view(const RgbImage& img, std::size_t index) const { return {&img, blocks.at(index)}; }
};

inline BlockGrid partition_blocks(const RgbImage& img, std::size_t block_size = kDefaultBlockSize) {
    if (block_size == 0) throw PartitionError("block size must be positive");
    if (img.width() < block_size || img.height() < block_size)
        throw PartitionError("image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                             " is smaller than one " + std::to_string(block_size) + "px block");
    BlockGrid grid;
    grid.block_size = block_size;
    grid.cols = img.width() / block_size;
    grid.rows = img.height() / block_size;
    grid.width = img.width();
    grid.height = img.height();
    grid.blocks.reserve(grid.rows * grid.cols);
    for (std::size_t r = 0; r < grid.rows; ++r)
        for (std::size_t c = 0; c < grid.cols; ++c)
            grid.blocks.push_back({r, c, c * block_size, r * block_size, block_size});
    return grid;
}

/// Channel k in {1, 2, 3} = {red, green, blue}.
inline Histogram channel_histogram(const BlockView& block, int channel) {
    if (channel < 1 || channel > 3)
        throw DomainError("channel index must be 1 (red), 2 (green) or 3 (blue), got " + std::to_string(channel));
    Histogram h;
    const std::size_t n = block.size();
    for (std::size_t dy = 0; dy < n; ++dy) {
        for (std::size_t dx = 0; dx < n; ++dx) {
            const Rgb& px = block.pixel(dx, dy);
            h.add(channel == 1 ? px.r : channel == 2 ? px.g : px.b);
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Overlay

struct Palette {
    std::map<std::string, Rgb> colors;
    double alpha = 0.5;

    /// aquatic = yellow, urban = cyan, vegetation = magenta.
    static Palette standard(double alpha = 0.5) {
        return {{{"aquatic", {255, 255, 0}}, {"urban", {0, 255, 255}}, {"vegetation", {255, 0, 255}}}, alpha};
    }
};

/// Round-half-up blend of one 8-bit component.
inline std::uint8_t blend_component(std::uint8_t tint, std::uint8_t original, double alpha) noexcept {
    const double v = alpha * tint + (1.0 - alpha) * original;
    const double r = std::floor(v + 0.5);
    return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : r > 255.0 ? 255.0 : r);
}

/// Tints every labeled block with its palette color. Pixels outside the
/// grid are copied unchanged. Blocks are disjoint, so per-block work can be
/// spread over `threads` workers without affecting the output.
inline RgbImage render_overlay(const RgbImage& img, const BlockGrid& grid, const Palette& palette,
                               std::size_t threads = 1) {
    if (!(palette.alpha >= 0.0 && palette.alpha <= 1.0)) throw RenderError("overlay alpha must lie in [0, 1]");
    if (grid.width != img.width() || grid.height != img.height())
        throw RenderError("block grid was not derived from this image");
    if (grid.labels.size() != grid.blocks.size())
        throw RenderError("every block must carry a label before rendering");

    std::vector<Rgb> tints(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto it = palette.colors.find(grid.labels[i]);
        if (it == palette.colors.end()) throw RenderError("label '" + grid.labels[i] + "' has no palette color");
        tints[i] = it->second;
    }

    RgbImage out = img;
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const BlockRect& b = grid.blocks[i];
        const Rgb tint = tints[i];
        for (std::size_t y = b.y0; y < b.y0 + b.size; ++y) {
            for (std::size_t x = b.x0; x < b.x0 + b.size; ++x) {
                Rgb& px = out.at(x, y);
                px = {blend_component(tint.r, px.r, palette.alpha), blend_component(tint.g, px.g, palette.alpha),
                      blend_component(tint.b, px.b, palette.alpha)};
            }
        }
    });
    return out;
}

}  // namespace qentropy
