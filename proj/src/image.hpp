#pragma once

#include <cstdint>
#include <vector>

namespace msrc {

// Planar 8-bit image, 1 (gray) or 3 (RGB) channels, row-major planes.
struct Image {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<std::vector<uint8_t>> planes;

    uint32_t channels() const { return static_cast<uint32_t>(planes.size()); }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

    uint8_t at(uint32_t c, uint32_t i, uint32_t j) const {
        return planes[c][static_cast<size_t>(i) * width + j];
    }

    bool operator==(const Image& o) const {
        return width == o.width && height == o.height && planes == o.planes;
    }
};

// Largest accepted plane, as width*height.  Keeps hostile headers from
// driving allocations; well above anything the tools are meant for.
inline constexpr uint64_t kMaxPixels = 1ull << 24;

enum class SynthKind {
    constant = 0,
    uniform_noise = 1,
    gradient = 2,
    checker = 3,
};

// Binary PGM (P5) / PPM (P6), maxval 255 only.
Image load_image(const uint8_t* data, size_t len);
std::vector<uint8_t> save_image(const Image& img);

Image generate_synthetic(SynthKind kind, uint32_t width, uint32_t height,
                         uint32_t channels, uint64_t seed);

} // namespace msrc
