#pragma once

#include <cstdint>
#include <vector>

#include "estimator.hpp"
#include "prng.hpp"
#include "schedule.hpp"

namespace msrc {

struct IterationTrace {
    uint64_t masked = 0;   // positions still hidden when the iteration ended
    uint64_t coded = 0;    // symbols written during the iteration
    uint64_t bytes = 0;    // stream bytes attributed to the iteration
};

// One proposal per unresolved position, drawn from its quantized row.
// Resolved positions consume no randomness and report 0.
std::vector<uint32_t> sample_values(const QPmfPlane& q, const std::vector<uint8_t>& anchor,
                                    SplitMix64& rng);

// Confidence of each proposal: log of its own probability plus beta times an
// Irwin-Hall normal.  Resolved positions score +inf so they never re-enter
// the mask.
std::vector<double> compute_scores(const QPmfPlane& q, const std::vector<uint32_t>& values,
                                   const std::vector<uint8_t>& anchor, double beta,
                                   SplitMix64& rng);

// 1 at the k lowest-scoring positions, ties broken by index, k capped at the
// number of finite scores.
std::vector<uint8_t> build_mask(const std::vector<double>& scores, uint64_t k);

struct ChannelConfig {
    uint32_t width = 0, height = 0;
    Scheduler scheduler = Scheduler::cosine;
    uint32_t T = 12;
    double beta = 10.5;
    uint64_t seed = 0;               // already mixed with the channel index
    const EstimatorParams* params = nullptr;
    const uint8_t* recon = nullptr;  // lossy reconstruction plane
    const uint8_t* prev = nullptr;   // previous channel's lsb plane, or null
    uint8_t zero_symbol = 0;
};

struct ChannelEncodeResult {
    std::vector<uint8_t> stream;
    std::vector<IterationTrace> trace;
    uint64_t digest = 0;             // over the iteration-1 tables, if requested
};

ChannelEncodeResult encode_channel(const ChannelConfig& cfg, const std::vector<uint8_t>& lsb,
                                   bool want_digest);

// expected_digest, when given, is checked against the iteration-1 tables
// before any symbol is pulled from the stream.
std::vector<uint8_t> decode_channel(const ChannelConfig& cfg, const uint8_t* stream,
                                    size_t len, const uint64_t* expected_digest);

} // namespace msrc
