#pragma once

#include <cstdint>
#include <vector>

#include "container.hpp"
#include "image.hpp"
#include "sampler.hpp"

namespace msrc {

struct EncodeOptions {
    LossyBackend backend;
    Scheduler scheduler = Scheduler::cosine;
    uint32_t T = 12;
    double beta = 10.5;
    uint64_t seed = 42;
    EstimatorParams params = EstimatorParams::defaults();
};

struct ChannelStats {
    int16_t r_min = 0;
    uint8_t flag = 0;
    uint64_t msb_bytes = 0;
    uint64_t lsb_bytes = 0;
    std::vector<IterationTrace> trace;
};

struct EncodeStats {
    uint64_t header_bytes = 0;
    uint64_t lossy_bytes = 0;
    uint64_t total_bytes = 0;
    std::vector<ChannelStats> channels;
};

std::vector<uint8_t> encode_image(const Image& img, const EncodeOptions& opt,
                                  EncodeStats* stats = nullptr);

Image decode_image(const uint8_t* data, size_t len);

struct ContainerInfo {
    uint32_t width = 0, height = 0, channels = 0;
    BackendKind backend = BackendKind::quantize;
    uint32_t backend_param = 0;
    Scheduler scheduler = Scheduler::cosine;
    uint32_t T = 0;
    double beta = 0.0;
    uint64_t seed = 0;
    uint64_t pmf_digest = 0;
    uint64_t header_bytes = 0, lossy_bytes = 0, total_bytes = 0;
    struct Ch {
        int16_t r_min = 0;
        uint8_t flag = 0;
        uint64_t msb_bytes = 0, lsb_bytes = 0;
    } ch[3];
};

ContainerInfo inspect_container(const uint8_t* data, size_t len);

} // namespace msrc
