#include "image.hpp"

#include <cstdio>

#include "errors.hpp"
#include "prng.hpp"

namespace msrc {

namespace {

struct Cursor {
    const uint8_t* data;
    size_t len;
    size_t pos = 0;

    bool eof() const { return pos >= len; }
    uint8_t peek() const { return data[pos]; }
};

bool is_space(uint8_t c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// Whitespace runs and '#' comments between header tokens.
void skip_separators(Cursor& c) {
    while (!c.eof()) {
        if (is_space(c.peek())) {
            c.pos++;
        } else if (c.peek() == '#') {
            while (!c.eof() && c.peek() != '\n') c.pos++;
        } else {
            return;
        }
    }
}

uint32_t parse_uint(Cursor& c, const char* what) {
    skip_separators(c);
    if (c.eof() || c.peek() < '0' || c.peek() > '9')
        fail(errc::malformed_header, std::string("expected integer for ") + what);
    uint64_t v = 0;
    while (!c.eof() && c.peek() >= '0' && c.peek() <= '9') {
        v = v * 10 + (c.peek() - '0');
        if (v > 0xFFFFFFFFull)
            fail(errc::malformed_header, std::string("integer overflow in ") + what);
        c.pos++;
    }
    return static_cast<uint32_t>(v);
}

} // namespace

Image load_image(const uint8_t* data, size_t len) {
    Cursor c{data, len};
    if (len < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6'))
        fail(errc::malformed_header, "not a binary PGM/PPM file");
    uint32_t channels = data[1] == '5' ? 1 : 3;
    c.pos = 2;

    uint32_t width = parse_uint(c, "width");
    uint32_t height = parse_uint(c, "height");
    uint32_t maxval = parse_uint(c, "maxval");
    if (width == 0 || height == 0)
        fail(errc::malformed_header, "zero image dimension");
    if (static_cast<uint64_t>(width) * height > kMaxPixels)
        fail(errc::image_too_large, "image dimensions exceed supported size");
    if (maxval != 255)
        fail(errc::unsupported_maxval, "maxval must be 255");
    if (c.eof() || !is_space(c.peek()))
        fail(errc::malformed_header, "missing whitespace after maxval");
    c.pos++; // exactly one byte of whitespace, then raster

    size_t n = static_cast<size_t>(width) * height;
    if (len - c.pos < n * channels)
        fail(errc::truncated_payload, "raster shorter than header promises");

    Image img;
    img.width = width;
    img.height = height;
    img.planes.assign(channels, std::vector<uint8_t>(n));
    const uint8_t* p = data + c.pos;
    if (channels == 1) {
        img.planes[0].assign(p, p + n);
    } else {
        for (size_t i = 0; i < n; i++)
            for (uint32_t ch = 0; ch < 3; ch++)
                img.planes[ch][i] = p[i * 3 + ch];
    }
    return img;
}

std::vector<uint8_t> save_image(const Image& img) {
    if (img.width == 0 || img.height == 0 ||
        (img.channels() != 1 && img.channels() != 3))
        fail(errc::invalid_argument, "image must be non-empty with 1 or 3 channels");

    char header[64];
    int hlen = std::snprintf(header, sizeof(header), "P%c\n%u %u\n255\n",
                             img.channels() == 1 ? '5' : '6', img.width, img.height);

    size_t n = img.pixel_count();
    std::vector<uint8_t> out;
    out.reserve(hlen + n * img.channels());
    out.insert(out.end(), header, header + hlen);
    if (img.channels() == 1) {
        out.insert(out.end(), img.planes[0].begin(), img.planes[0].end());
    } else {
        for (size_t i = 0; i < n; i++)
            for (uint32_t ch = 0; ch < 3; ch++)
                out.push_back(img.planes[ch][i]);
    }
    return out;
}

Image generate_synthetic(SynthKind kind, uint32_t width, uint32_t height,
                         uint32_t channels, uint64_t seed) {
    if (width == 0 || height == 0 || (channels != 1 && channels != 3))
        fail(errc::invalid_argument, "bad synthetic image shape");
    if (static_cast<uint64_t>(width) * height > kMaxPixels)
        fail(errc::image_too_large, "image dimensions exceed supported size");

    Image img;
    img.width = width;
    img.height = height;
    size_t n = static_cast<size_t>(width) * height;
    img.planes.assign(channels, std::vector<uint8_t>(n));

    SplitMix64 rng(seed);
    for (uint32_t ch = 0; ch < channels; ch++) {
        auto& plane = img.planes[ch];
        switch (kind) {
        case SynthKind::constant:
            for (size_t i = 0; i < n; i++) plane[i] = 128;
            break;
        case SynthKind::uniform_noise:
            for (size_t i = 0; i < n; i++)
                plane[i] = static_cast<uint8_t>(rng.next_u64() & 0xFF);
            break;
        case SynthKind::gradient:
            for (uint32_t i = 0; i < height; i++)
                for (uint32_t j = 0; j < width; j++)
                    plane[static_cast<size_t>(i) * width + j] =
                        width == 1 ? 0
                                   : static_cast<uint8_t>(255ull * j / (width - 1));
            break;
        case SynthKind::checker:
            for (uint32_t i = 0; i < height; i++)
                for (uint32_t j = 0; j < width; j++)
                    plane[static_cast<size_t>(i) * width + j] =
                        ((i + j) & 1) ? 255 : 0;
            break;
        default:
            fail(errc::invalid_argument, "unknown synthetic kind");
        }
    }
    return img;
}

} // namespace msrc
