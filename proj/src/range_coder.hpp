#pragma once

#include <cstdint>
#include <vector>

namespace msrc {

// All tables fed to the coder sum to exactly kFreqTotal with no zero entry.
inline constexpr uint32_t kFreqTotal = 65536;
inline constexpr uint64_t kRangeFloor = 1ull << 24;

struct FreqTable {
    std::vector<uint32_t> freq;
};

// Distribute (total - sum(f)) over the table, always touching the current
// largest bin first (ties: lowest index), and never dropping a bin below 1.
void repair_to_total(std::vector<uint32_t>& f, uint32_t total);

// Byte-oriented range coder.  64-bit low/range; a byte is emitted whenever
// range drops below kRangeFloor, so range >= 2^24 holds before every encode
// and the 16-bit frequency granularity never starves.  Carries that land on
// already-emitted bytes are propagated back through the buffer.
class RangeEncoder {
public:
    explicit RangeEncoder(std::vector<uint8_t>& out) : out_(out) {}

    void encode(uint32_t cum, uint32_t freq);
    void encode_symbol(const uint16_t* bins, uint32_t nbins, uint32_t sym);
    void encode_symbol(const std::vector<uint32_t>& bins, uint32_t sym);

    // emits the 8-byte tail; no encode may follow
    void finish();

    size_t bytes_emitted() const { return out_.size(); }

private:
    void propagate_carry();
    void renorm();

    std::vector<uint8_t>& out_;
    uint64_t low_ = 0;
    uint64_t range_ = ~0ull;
};

// Mirrors RangeEncoder renormalization exactly, so it consumes precisely the
// bytes the encoder emitted.  Reading past the end raises stream_exhausted;
// arbitrary byte content decodes to some symbol sequence without fault.
class RangeDecoder {
public:
    RangeDecoder(const uint8_t* data, size_t len);

    // scaled position of the code point within the next symbol's table
    uint32_t decode_target();
    void decode_update(uint32_t cum, uint32_t freq);

    uint32_t decode_symbol(const uint16_t* bins, uint32_t nbins);
    uint32_t decode_symbol(const std::vector<uint32_t>& bins);

    size_t consumed() const { return pos_; }

private:
    uint8_t next_byte();

    const uint8_t* data_;
    size_t len_;
    size_t pos_ = 0;
    uint64_t code_ = 0;
    uint64_t range_ = ~0ull;
    uint64_t r_ = 0;
};

// Order-0 adaptive frequency model: counts start at 1, +32 per coded symbol,
// all counts halve (floor 1) once the sum passes 60000.  table() rescales the
// live counts to a kFreqTotal table; encoder and decoder evolve in lockstep.
class AdaptiveModel {
public:
    explicit AdaptiveModel(uint32_t alphabet);

    const std::vector<uint32_t>& table();
    void update(uint32_t sym);
    uint32_t alphabet() const { return static_cast<uint32_t>(counts_.size()); }

private:
    std::vector<uint32_t> counts_;
    std::vector<uint32_t> scaled_;
    uint64_t total_;
};

// Batch helpers, one table per symbol.
std::vector<uint8_t> ac_encode(const std::vector<uint32_t>& symbols,
                               const std::vector<FreqTable>& tables);
std::vector<uint32_t> ac_decode(const uint8_t* data, size_t len,
                                const std::vector<FreqTable>& tables);

std::vector<uint8_t> ac_encode_adaptive(const std::vector<uint32_t>& symbols,
                                        uint32_t alphabet);
std::vector<uint32_t> ac_decode_adaptive(const uint8_t* data, size_t len,
                                         uint32_t alphabet, size_t count);

} // namespace msrc
