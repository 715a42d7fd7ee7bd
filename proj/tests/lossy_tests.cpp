#include <doctest.h>

#include <vector>

#include "errors.hpp"
#include "lossy.hpp"
#include "residual.hpp"

using namespace msrc;

namespace {

Image make_image(uint32_t w, uint32_t h, std::vector<uint8_t> plane) {
    Image img;
    img.width = w;
    img.height = h;
    img.planes.push_back(std::move(plane));
    return img;
}

} // namespace

TEST_CASE("quantize maps to the cell midpoint") {
    Image img = make_image(3, 1, {37, 128, 255});
    LossyResult a = lossy_encode(img, {BackendKind::quantize, 16});
    CHECK(a.recon.planes[0] == std::vector<uint8_t>{40, 136, 248});

    LossyResult b = lossy_encode(img, {BackendKind::quantize, 2});
    CHECK(b.recon.planes[0] == std::vector<uint8_t>{37, 129, 255});
}

TEST_CASE("midpoint reconstruction clamps at 255") {
    Image img = make_image(1, 1, {255});
    LossyResult r = lossy_encode(img, {BackendKind::quantize, 127});
    // 255/127 = 2, 127*2 + 63 = 317 -> clamp
    CHECK(r.recon.planes[0][0] == 255);
}

TEST_CASE("quantizing a reconstruction is the identity") {
    Image img = generate_synthetic(SynthKind::uniform_noise, 13, 9, 3, 21);
    for (uint32_t q : {2u, 16u, 37u, 128u}) {
        LossyResult once = lossy_encode(img, {BackendKind::quantize, q});
        LossyResult twice = lossy_encode(once.recon, {BackendKind::quantize, q});
        CHECK(twice.recon == once.recon);
    }
}

TEST_CASE("down2x averages full and partial blocks, then repeats") {
    Image img = make_image(3, 3, {10, 20, 30, 40, 50, 60, 70, 80, 90});
    LossyResult r = lossy_encode(img, {BackendKind::down2x, 0});
    CHECK(r.recon.planes[0] ==
          std::vector<uint8_t>{30, 30, 45, 30, 30, 45, 75, 75, 90});
}

TEST_CASE("substream decodes back to the reconstruction") {
    for (uint32_t ch : {1u, 3u}) {
        Image img = generate_synthetic(SynthKind::uniform_noise, 17, 11, ch, 5);
        for (LossyBackend be : {LossyBackend{BackendKind::quantize, 16},
                                LossyBackend{BackendKind::quantize, 2},
                                LossyBackend{BackendKind::down2x, 0}}) {
            LossyResult enc = lossy_encode(img, be);
            Image dec = lossy_decode(enc.substream, be, img.width, img.height, ch);
            CHECK(dec == enc.recon);
        }
    }
}

TEST_CASE("truncated substream reports corruption, not exhaustion") {
    Image img = generate_synthetic(SynthKind::uniform_noise, 32, 32, 1, 9);
    LossyBackend be{BackendKind::quantize, 2};
    LossyResult enc = lossy_encode(img, be);

    for (size_t keep : {size_t{0}, enc.substream.size() / 4}) {
        std::vector<uint8_t> cut(enc.substream.begin(), enc.substream.begin() + keep);
        errc code = errc::ok;
        try {
            lossy_decode(cut, be, img.width, img.height, 1);
        } catch (const codec_error& e) {
            code = e.code();
        }
        CHECK(code == errc::corrupt_substream);
    }
}

TEST_CASE("backend validation bounds the quantize step") {
    LossyBackend low{BackendKind::quantize, 1};
    LossyBackend high{BackendKind::quantize, 129};
    LossyBackend q2{BackendKind::quantize, 2};
    LossyBackend q128{BackendKind::quantize, 128};
    LossyBackend half{BackendKind::down2x, 0};
    CHECK_THROWS_AS(low.validate(), codec_error);
    CHECK_THROWS_AS(high.validate(), codec_error);
    CHECK_NOTHROW(q2.validate());
    CHECK_NOTHROW(q128.validate());
    CHECK_NOTHROW(half.validate());
}

TEST_CASE("quantize steps up to 64 keep residual spread inside one plane") {
    Image img = generate_synthetic(SynthKind::uniform_noise, 24, 24, 3, 3);
    for (uint32_t q : {2u, 16u, 64u}) {
        LossyResult enc = lossy_encode(img, {BackendKind::quantize, q});
        auto res = residual_compute(img, enc.recon);
        for (const auto& plane : res)
            CHECK(decompose(plane).flag == 0);
    }
    // q = 128 spans two coarse cells on noise
    LossyResult wide = lossy_encode(img, {BackendKind::quantize, 128});
    auto res = residual_compute(img, wide.recon);
    CHECK(decompose(res[0]).flag == 1);
}

TEST_CASE("residual shape mismatch is typed") {
    Image a = generate_synthetic(SynthKind::constant, 4, 4, 1, 0);
    Image b = generate_synthetic(SynthKind::constant, 4, 5, 1, 0);
    errc code = errc::ok;
    try {
        residual_compute(a, b);
    } catch (const codec_error& e) {
        code = e.code();
    }
    CHECK(code == errc::shape_mismatch);
}
