#pragma once

#include <cstdint>
#include <vector>

#include "estimator.hpp"
#include "lossy.hpp"
#include "schedule.hpp"

namespace msrc {

struct ChannelBlock {
    int16_t r_min = 0;
    uint8_t flag = 0;              // 1 when the coarse plane is present
    std::vector<uint8_t> msb;      // run-length bytes; empty when flag == 0
    std::vector<uint8_t> lsb;      // range-coded symbol stream
};

struct ContainerData {
    uint32_t width = 0, height = 0;
    LossyBackend backend;
    Scheduler scheduler = Scheduler::cosine;
    uint32_t T = 12;
    double beta = 10.5;
    uint64_t seed = 0;
    EstimatorParams params = EstimatorParams::defaults();
    uint64_t pmf_digest = 0;
    std::vector<uint8_t> lossy;
    std::vector<ChannelBlock> channels;
};

// fixed header bytes for a channel count, payload excluded
size_t header_size(uint32_t channels);

uint32_t crc32_ieee(const uint8_t* data, size_t len);

std::vector<uint8_t> write_container(const ContainerData& d);

// Validation order: magic, version, structure, total length, checksum, then
// field semantics.  Every failure is a typed codec_error.
ContainerData read_container(const uint8_t* data, size_t len);

} // namespace msrc
