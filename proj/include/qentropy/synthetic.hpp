#pragma once

// Seeded synthetic land-cover textures for tests and demos.
//
//   aquatic     low-variance water: smooth shallow ripples, fine sensor
//               noise and sparse specular glints
//   urban       high-frequency: small flat-toned rectangles (roofs, roads)
//               with hard edges
//   vegetation  mid-frequency: smoothly varying canopy brightness at a
//               4-8 px scale
//
// Every tile draws its own texture parameters, so the classes overlap in
// overall disorder and differ mostly in histogram shape.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "qentropy/image.hpp"
#include "qentropy/random.hpp"

namespace qentropy::synthetic {

inline const std::vector<std::string>& class_names() {
    static const std::vector<std::string> names{"aquatic", "urban", "vegetation"};
    return names;
}

namespace detail {

inline std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

/// Bilinear value noise with lattice spacing `cell`, values in [-1, 1].
class ValueNoise {
public:
    ValueNoise(std::size_t width, std::size_t height, double cell, Rng& rng)
        : cell_(cell), nx_(static_cast<std::size_t>(width / cell) + 2), ny_(static_cast<std::size_t>(height / cell) + 2),
          lattice_(nx_ * ny_) {
        for (double& v : lattice_) v = rng.uniform(-1.0, 1.0);
    }

    double at(double x, double y) const {
        const double gx = x / cell_, gy = y / cell_;
        const auto ix = static_cast<std::size_t>(gx), iy = static_cast<std::size_t>(gy);
        const double fx = smooth(gx - ix), fy = smooth(gy - iy);
        const double a = node(ix, iy), b = node(ix + 1, iy), c = node(ix, iy + 1), d = node(ix + 1, iy + 1);
        return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
    }

private:
    static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
    double node(std::size_t x, std::size_t y) const { return lattice_[std::min(y, ny_ - 1) * nx_ + std::min(x, nx_ - 1)]; }

    double cell_;
    std::size_t nx_, ny_;
    std::vector<double> lattice_;
};

inline void aquatic(RgbImage& img, Rng& rng) {
    const double base[3] = {rng.uniform(15, 60), rng.uniform(50, 110), rng.uniform(100, 170)};
    const double sigma = rng.uniform(1.0, 4.0);
    const double ripple = rng.uniform(0.5, 5.0);
    const double freq = rng.uniform(0.2, 0.6);
    const double phase = rng.uniform(0, 2 * std::numbers::pi);
    const double glint_rate = rng.uniform(0.0, 0.04);
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            const double wave = ripple * std::sin(freq * (x + 0.7 * y) + phase);
            Rgb& px = img.at(x, y);
            if (rng.uniform() < glint_rate) {
                const double g = rng.uniform(170, 255);
                px = {clamp_byte(g), clamp_byte(g), clamp_byte(g)};
                continue;
            }
            px = {clamp_byte(base[0] + wave + sigma * rng.normal()), clamp_byte(base[1] + wave + sigma * rng.normal()),
                  clamp_byte(base[2] + wave + sigma * rng.normal())};
        }
    }
}

inline void urban(RgbImage& img, Rng& rng) {
    const double background = rng.uniform(70, 160);
    const double sigma = rng.uniform(0.5, 3.0);
    std::vector<double> tone(img.width() * img.height(), background);
    const std::size_t buildings = static_cast<std::size_t>(rng.uniform(0.02, 0.06) * tone.size());
    for (std::size_t b = 0; b < buildings; ++b) {
        const std::size_t w = 2 + rng.below(7), h = 2 + rng.below(7);
        const std::size_t x0 = rng.below(img.width()), y0 = rng.below(img.height());
        const double t = rng.uniform(30, 230);
        for (std::size_t y = y0; y < std::min(img.height(), y0 + h); ++y)
            for (std::size_t x = x0; x < std::min(img.width(), x0 + w); ++x) tone[y * img.width() + x] = t;
    }
    const double tint[3] = {rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(-8, 8)};
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            const double t = tone[y * img.width() + x];
            img.at(x, y) = {clamp_byte(t + tint[0] + sigma * rng.normal()), clamp_byte(t + tint[1] + sigma * rng.normal()),
                            clamp_byte(t + tint[2] + sigma * rng.normal())};
        }
    }
}

inline void vegetation(RgbImage& img, Rng& rng) {
    const double base[3] = {rng.uniform(30, 90), rng.uniform(80, 150), rng.uniform(20, 70)};
    const double amplitude = rng.uniform(10, 35);
    const double sigma = rng.uniform(2.0, 6.0);
    const ValueNoise coarse(img.width(), img.height(), rng.uniform(4.0, 8.0), rng);
    const ValueNoise fine(img.width(), img.height(), 2.0, rng);
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            const double v = amplitude * (0.75 * coarse.at(x, y) + 0.25 * fine.at(x, y));
            img.at(x, y) = {clamp_byte(base[0] + 0.6 * v + sigma * rng.normal()),
                            clamp_byte(base[1] + v + sigma * rng.normal()),
                            clamp_byte(base[2] + 0.5 * v + sigma * rng.normal())};
        }
    }
}

}  // namespace detail

/// One tile of the named class ("aquatic", "urban" or "vegetation").
inline RgbImage make_tile(const std::string& cls, std::size_t width, std::size_t height, Rng& rng) {
    RgbImage img(width, height);
    if (cls == "aquatic") detail::aquatic(img, rng);
    else if (cls == "urban") detail::urban(img, rng);
    else if (cls == "vegetation") detail::vegetation(img, rng);
    else throw ConfigError("unknown synthetic class '" + cls + "'");
    return img;
}

/// Writes root/<class>/tile_NNN.ppm for every class.
inline void write_dataset(const std::filesystem::path& root, std::size_t tiles_per_class, std::size_t tile_size,
                          std::uint64_t seed) {
    Rng rng(seed);
    for (const auto& cls : class_names()) {
        const auto dir = root / cls;
        std::filesystem::create_directories(dir);
        for (std::size_t t = 0; t < tiles_per_class; ++t) {
            char name[32];
            std::snprintf(name, sizeof name, "tile_%03zu.ppm", t);
            save_image(dir / name, make_tile(cls, tile_size, tile_size, rng));
        }
    }
}

struct Mosaic {
    RgbImage image;
    std::vector<std::string> truth;  // per block_size block, row-major
};

/// Image of `rows` x `cols` class regions, each `region` pixels square,
/// with classes cycling so that all three appear. `truth` labels every
/// `block_size` block by its region's class.
inline Mosaic make_mosaic(std::size_t rows, std::size_t cols, std::size_t region, std::size_t block_size,
                          std::uint64_t seed) {
    Rng rng(seed);
    Mosaic m{RgbImage(cols * region, rows * region), {}};
    std::vector<std::string> region_class(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& cls = class_names()[(r * cols + c + r) % class_names().size()];
            region_class[r * cols + c] = cls;
            const RgbImage tile = make_tile(cls, region, region, rng);
            for (std::size_t y = 0; y < region; ++y)
                for (std::size_t x = 0; x < region; ++x) m.image.at(c * region + x, r * region + y) = tile.at(x, y);
        }
    }
    const std::size_t bw = m.image.width() / block_size, bh = m.image.height() / block_size;
    for (std::size_t by = 0; by < bh; ++by)
        for (std::size_t bx = 0; bx < bw; ++bx)
            m.truth.push_back(region_class[(by * block_size / region) * cols + (bx * block_size / region)]);
    return m;
}

}  // namespace qentropy::synthetic
