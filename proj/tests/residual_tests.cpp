#include <doctest.h>

#include <vector>

#include "errors.hpp"
#include "prng.hpp"
#include "residual.hpp"

using namespace msrc;

namespace {

errc decode_code(const std::vector<uint8_t>& data, size_t cells) {
    try {
        rle_decode(data.data(), data.size(), cells);
    } catch (const codec_error& e) {
        return e.code();
    }
    return errc::ok;
}

} // namespace

TEST_CASE("small spread keeps the coarse plane off") {
    DecomposedResidual d = decompose({-3, 0, 5});
    CHECK(d.r_min == -3);
    CHECK(d.flag == 0);
    CHECK(d.lsb == std::vector<uint8_t>{0, 3, 8});
    CHECK(d.msb.empty());
    CHECK(recompose(d) == std::vector<int16_t>{-3, 0, 5});
}

TEST_CASE("offset 130 splits into msb 2, lsb 2") {
    DecomposedResidual d = decompose({0, 130});
    CHECK(d.r_min == 0);
    CHECK(d.flag == 1);
    CHECK(d.lsb == std::vector<uint8_t>{0, 2});
    CHECK(d.msb == std::vector<uint8_t>{0, 2});
    CHECK(recompose(d) == std::vector<int16_t>{0, 130});
}

TEST_CASE("spread of exactly 63 stays flagless and 64 flips the flag") {
    DecomposedResidual a = decompose({-30, 33});
    CHECK(a.flag == 0);
    DecomposedResidual b = decompose({-30, 34});
    CHECK(b.flag == 1);
}

TEST_CASE("extreme residual range survives") {
    DecomposedResidual d = decompose({-255, 255});
    CHECK(d.r_min == -255);
    CHECK(d.flag == 1);
    CHECK(recompose(d) == std::vector<int16_t>{-255, 255});
}

TEST_CASE("zero symbol is the residual-zero lsb") {
    CHECK(zero_symbol_for(0) == 0);
    CHECK(zero_symbol_for(-8) == 8);
    CHECK(zero_symbol_for(-130) == 2);   // 130 & 63
    CHECK(zero_symbol_for(100) == 28);   // (-100 mod 64 + 64) mod 64
}

TEST_CASE("random residual planes recompose exactly") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 50; trial++) {
        std::vector<int16_t> r(257);
        for (auto& v : r)
            v = static_cast<int16_t>(static_cast<int>(rng.next_u64() % 511) - 255);
        DecomposedResidual d = decompose(r);
        CHECK(recompose(d) == r);
    }
}

TEST_CASE("rle oracle: mixed runs") {
    // three zeros then two fives
    auto out = rle_encode({0, 0, 0, 5, 5});
    CHECK(out == std::vector<uint8_t>{0x00, 0x03, 0x05, 0x02});
    CHECK(rle_decode(out.data(), out.size(), 5) ==
          std::vector<uint8_t>{0, 0, 0, 5, 5});
}

TEST_CASE("rle oracle: 300 zeros needs a two-byte varint") {
    std::vector<uint8_t> grid(300, 0);
    auto out = rle_encode(grid);
    CHECK(out == std::vector<uint8_t>{0x00, 0xAC, 0x02});
    CHECK(rle_decode(out.data(), out.size(), 300) == grid);
}

TEST_CASE("rle round-trips random coarse planes") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 30; trial++) {
        std::vector<uint8_t> grid(1 + rng.next_u64() % 2000);
        for (auto& v : grid) v = rng.next_u64() % 8;
        auto out = rle_encode(grid);
        CHECK(rle_decode(out.data(), out.size(), grid.size()) == grid);
    }
}

TEST_CASE("rle decode rejects malformed streams with typed errors") {
    CHECK(decode_code({0x08, 0x01}, 1) == errc::run_length_overflow); // value > 7
    CHECK(decode_code({0x00, 0x80}, 128) == errc::truncated_stream);  // varint cut
    CHECK(decode_code({0x00, 0x05}, 3) == errc::run_length_overflow); // overshoot
    CHECK(decode_code({0x00, 0x02}, 3) == errc::run_length_overflow); // undershoot
    CHECK(decode_code({0x00, 0x00}, 1) == errc::run_length_overflow); // zero run
    CHECK(decode_code({}, 0) == errc::ok);
}

TEST_CASE("empty residual input is rejected") {
    CHECK_THROWS_AS(decompose({}), codec_error);
}
