#include <doctest.h>

#include <string>
#include <vector>

#include "errors.hpp"
#include "image.hpp"

using namespace msrc;

namespace {

std::vector<uint8_t> bytes(const std::string& s) {
    return {s.begin(), s.end()};
}

errc code_of(const std::vector<uint8_t>& data) {
    try {
        load_image(data.data(), data.size());
    } catch (const codec_error& e) {
        return e.code();
    }
    return errc::ok;
}

} // namespace

TEST_CASE("one pixel P5 file is exactly 12 bytes") {
    Image img;
    img.width = 1;
    img.height = 1;
    img.planes = {{200}};
    auto out = save_image(img);
    // "P5\n" + "1 1\n" + "255\n" is an 11-byte header plus one raster byte
    CHECK(out.size() == 12);
    Image back = load_image(out.data(), out.size());
    CHECK(back == img);
}

TEST_CASE("P6 interleaves on save and deinterleaves on load") {
    Image img;
    img.width = 2;
    img.height = 1;
    img.planes = {{1, 2}, {3, 4}, {5, 6}};
    auto out = save_image(img);
    // raster is r g b per pixel
    std::vector<uint8_t> raster(out.end() - 6, out.end());
    CHECK(raster == std::vector<uint8_t>{1, 3, 5, 2, 4, 6});
    CHECK(load_image(out.data(), out.size()) == img);
}

TEST_CASE("comments and whitespace runs are accepted in the header") {
    auto data = bytes("P5 # format\n# a comment line\n  3\t1 # dims\n255\n");
    data.insert(data.end(), {10, 20, 30});
    Image img = load_image(data.data(), data.size());
    CHECK(img.width == 3);
    CHECK(img.height == 1);
    CHECK(img.planes[0] == std::vector<uint8_t>{10, 20, 30});
}

TEST_CASE("header and payload failures carry typed codes") {
    CHECK(code_of(bytes("P4\n1 1\n255\n ")) == errc::malformed_header);
    CHECK(code_of(bytes("P5\n0 1\n255\n")) == errc::malformed_header);
    CHECK(code_of(bytes("P5\n1 1\n65535\n\0\0")) == errc::unsupported_maxval);
    auto short_raster = bytes("P6\n2 2\n255\n");
    short_raster.insert(short_raster.end(), {1, 2, 3});
    CHECK(code_of(short_raster) == errc::truncated_payload);
    CHECK(code_of(bytes("P5\n5000 5000\n255\n")) == errc::image_too_large);
}

TEST_CASE("gradient spans 0..255 left to right") {
    Image g = generate_synthetic(SynthKind::gradient, 3, 2, 1, 0);
    CHECK(g.planes[0] == std::vector<uint8_t>{0, 127, 255, 0, 127, 255});
    Image one = generate_synthetic(SynthKind::gradient, 1, 1, 1, 0);
    CHECK(one.planes[0][0] == 0);
}

TEST_CASE("checker alternates and constant is flat") {
    Image c = generate_synthetic(SynthKind::checker, 2, 2, 1, 0);
    CHECK(c.planes[0] == std::vector<uint8_t>{0, 255, 255, 0});
    Image k = generate_synthetic(SynthKind::constant, 2, 2, 3, 9);
    for (const auto& plane : k.planes)
        for (uint8_t v : plane) CHECK(v == 128);
}

TEST_CASE("noise is seed-deterministic and differs across seeds") {
    Image a = generate_synthetic(SynthKind::uniform_noise, 16, 16, 1, 5);
    Image b = generate_synthetic(SynthKind::uniform_noise, 16, 16, 1, 5);
    Image c = generate_synthetic(SynthKind::uniform_noise, 16, 16, 1, 6);
    CHECK(a == b);
    CHECK(!(a == c));
}

TEST_CASE("pnm round trip across kinds and channel counts") {
    for (uint32_t ch : {1u, 3u}) {
        for (int k = 0; k < 4; k++) {
            Image img = generate_synthetic(static_cast<SynthKind>(k), 7, 5, ch, 3);
            auto out = save_image(img);
            CHECK(load_image(out.data(), out.size()) == img);
        }
    }
}
