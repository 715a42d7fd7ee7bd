#pragma once

#include <cstdint>
#include <vector>

namespace msrc {

// Residual values live in [-255, 255].  Offsetting by the plane minimum maps
// them into [0, 510]; the low 6 bits form the symbol plane handled by the
// masked-sampling coder and the remaining high bits (0..7) go to a plain RLE
// side stream, present only when some offset value exceeds 63.
struct DecomposedResidual {
    int16_t r_min = 0;
    uint8_t flag = 0;                // 1: msb plane present
    std::vector<uint8_t> lsb;        // symbols in [0, 63]
    std::vector<uint8_t> msb;        // values in [0, 7]; empty when flag == 0
};

DecomposedResidual decompose(const std::vector<int16_t>& residual);
std::vector<int16_t> recompose(const DecomposedResidual& d);

// Row-major run-length coding of the msb plane: (value byte, LEB128 length)
// per maximal run.
std::vector<uint8_t> rle_encode(const std::vector<uint8_t>& grid);
std::vector<uint8_t> rle_decode(const uint8_t* data, size_t len, size_t cells);

// Symbol a zero residual maps to under the plane offset.
uint8_t zero_symbol_for(int16_t r_min);

} // namespace msrc
