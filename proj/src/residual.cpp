#include "residual.hpp"

#include <algorithm>

#include "errors.hpp"

namespace msrc {

DecomposedResidual decompose(const std::vector<int16_t>& residual) {
    if (residual.empty())
        fail(errc::invalid_argument, "empty residual plane");
    DecomposedResidual d;
    d.r_min = *std::min_element(residual.begin(), residual.end());
    int max_off = 0;
    for (int16_t v : residual) max_off = std::max(max_off, v - d.r_min);
    d.flag = max_off > 63 ? 1 : 0;
    d.lsb.resize(residual.size());
    if (d.flag) d.msb.resize(residual.size());
    for (size_t i = 0; i < residual.size(); i++) {
        int off = residual[i] - d.r_min;   // 0..510
        d.lsb[i] = static_cast<uint8_t>(off & 63);
        if (d.flag) d.msb[i] = static_cast<uint8_t>(off >> 6);
    }
    return d;
}

std::vector<int16_t> recompose(const DecomposedResidual& d) {
    std::vector<int16_t> out(d.lsb.size());
    for (size_t i = 0; i < d.lsb.size(); i++) {
        int off = d.lsb[i];
        if (d.flag) off += 64 * d.msb[i];
        out[i] = static_cast<int16_t>(off + d.r_min);
    }
    return out;
}

uint8_t zero_symbol_for(int16_t r_min) {
    int z = ((0 - r_min) % 64 + 64) % 64;
    return static_cast<uint8_t>(z);
}

std::vector<uint8_t> rle_encode(const std::vector<uint8_t>& grid) {
    std::vector<uint8_t> out;
    size_t i = 0;
    while (i < grid.size()) {
        uint8_t v = grid[i];
        size_t run = 1;
        while (i + run < grid.size() && grid[i + run] == v) run++;
        out.push_back(v);
        uint64_t n = run;
        while (n >= 0x80) {
            out.push_back(static_cast<uint8_t>(n) | 0x80);
            n >>= 7;
        }
        out.push_back(static_cast<uint8_t>(n));
        i += run;
    }
    return out;
}

std::vector<uint8_t> rle_decode(const uint8_t* data, size_t len, size_t cells) {
    std::vector<uint8_t> out;
    out.reserve(cells);
    size_t pos = 0;
    while (pos < len) {
        uint8_t v = data[pos++];
        if (v > 7)
            fail(errc::run_length_overflow, "run value outside msb alphabet");
        uint64_t run = 0;
        int shift = 0;
        for (;;) {
            if (pos >= len)
                fail(errc::truncated_stream, "run length cut short");
            uint8_t b = data[pos++];
            if (shift >= 63)
                fail(errc::run_length_overflow, "run length varint too long");
            run |= static_cast<uint64_t>(b & 0x7F) << shift;
            shift += 7;
            if (!(b & 0x80)) break;
        }
        if (run == 0 || run > cells - out.size())
            fail(errc::run_length_overflow, "run lengths do not sum to the grid size");
        out.insert(out.end(), run, v);
    }
    if (out.size() != cells)
        fail(errc::run_length_overflow, "run lengths do not sum to the grid size");
    return out;
}

} // namespace msrc
