#pragma once

#include <cstdint>
#include <vector>

#include "image.hpp"

namespace msrc {

enum class BackendKind : uint8_t {
    quantize = 0,
    down2x = 1,
};

struct LossyBackend {
    BackendKind kind = BackendKind::quantize;
    uint32_t param = 16;        // quantize step; unused for down2x

    void validate() const;
};

struct LossyResult {
    Image recon;                    // same shape as the source
    std::vector<uint8_t> substream; // everything the decoder needs
};

LossyResult lossy_encode(const Image& img, const LossyBackend& backend);
Image lossy_decode(const std::vector<uint8_t>& substream, const LossyBackend& backend,
                   uint32_t width, uint32_t height, uint32_t channels);

// Per-channel signed residual source - recon.
std::vector<std::vector<int16_t>> residual_compute(const Image& src, const Image& recon);

} // namespace msrc
