#include "range_coder.hpp"

#include <numeric>

#include "errors.hpp"

namespace msrc {

void repair_to_total(std::vector<uint32_t>& f, uint32_t total) {
    int64_t sum = std::accumulate(f.begin(), f.end(), int64_t{0});
    int64_t diff = static_cast<int64_t>(total) - sum;
    while (diff != 0) {
        size_t arg = 0;
        for (size_t i = 1; i < f.size(); i++)
            if (f[i] > f[arg]) arg = i;
        if (diff > 0) {
            f[arg] += static_cast<uint32_t>(diff);
            diff = 0;
        } else {
            int64_t take = std::min(-diff, static_cast<int64_t>(f[arg]) - 1);
            if (take <= 0)
                fail(errc::internal, "frequency table cannot reach target total");
            f[arg] -= static_cast<uint32_t>(take);
            diff += take;
        }
    }
}

// ---------------------------------------------------------------- encoder

void RangeEncoder::propagate_carry() {
    size_t i = out_.size();
    for (;;) {
        if (i == 0)
            fail(errc::internal, "range coder carry escaped the stream");
        if (++out_[--i] != 0) break;
    }
}

void RangeEncoder::renorm() {
    while (range_ < kRangeFloor) {
        out_.push_back(static_cast<uint8_t>(low_ >> 56));
        low_ <<= 8;
        range_ <<= 8;
    }
}

void RangeEncoder::encode(uint32_t cum, uint32_t freq) {
    uint64_t r = range_ >> 16;
    uint64_t add = r * cum;
    if (low_ + add < low_) propagate_carry();
    low_ += add;
    range_ = r * freq;
    renorm();
}

void RangeEncoder::encode_symbol(const uint16_t* bins, uint32_t nbins, uint32_t sym) {
    if (sym >= nbins)
        fail(errc::symbol_out_of_alphabet, "symbol outside its table");
    uint32_t cum = 0;
    for (uint32_t s = 0; s < sym; s++) cum += bins[s];
    encode(cum, bins[sym]);
}

void RangeEncoder::encode_symbol(const std::vector<uint32_t>& bins, uint32_t sym) {
    if (sym >= bins.size())
        fail(errc::symbol_out_of_alphabet, "symbol outside its table");
    uint32_t cum = 0;
    for (uint32_t s = 0; s < sym; s++) cum += bins[s];
    encode(cum, bins[sym]);
}

void RangeEncoder::finish() {
    for (int i = 0; i < 8; i++) {
        out_.push_back(static_cast<uint8_t>(low_ >> 56));
        low_ <<= 8;
    }
}

// ---------------------------------------------------------------- decoder

RangeDecoder::RangeDecoder(const uint8_t* data, size_t len)
    : data_(data), len_(len) {
    for (int i = 0; i < 8; i++) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
    if (pos_ >= len_)
        fail(errc::stream_exhausted, "range coder stream exhausted");
    return data_[pos_++];
}

uint32_t RangeDecoder::decode_target() {
    r_ = range_ >> 16;
    uint64_t t = code_ / r_;
    return t > kFreqTotal - 1 ? kFreqTotal - 1 : static_cast<uint32_t>(t);
}

void RangeDecoder::decode_update(uint32_t cum, uint32_t freq) {
    code_ -= cum * r_;
    range_ = r_ * freq;
    while (range_ < kRangeFloor) {
        code_ = (code_ << 8) | next_byte();
        range_ <<= 8;
    }
}

uint32_t RangeDecoder::decode_symbol(const uint16_t* bins, uint32_t nbins) {
    uint32_t target = decode_target();
    uint32_t cum = 0, sym = 0;
    for (;; sym++) {
        if (sym == nbins - 1) break;
        if (cum + bins[sym] > target) break;
        cum += bins[sym];
    }
    decode_update(cum, bins[sym]);
    return sym;
}

uint32_t RangeDecoder::decode_symbol(const std::vector<uint32_t>& bins) {
    uint32_t target = decode_target();
    uint32_t cum = 0, sym = 0;
    uint32_t nbins = static_cast<uint32_t>(bins.size());
    for (;; sym++) {
        if (sym == nbins - 1) break;
        if (cum + bins[sym] > target) break;
        cum += bins[sym];
    }
    decode_update(cum, bins[sym]);
    return sym;
}

// ----------------------------------------------------- adaptive order-0

AdaptiveModel::AdaptiveModel(uint32_t alphabet) {
    if (alphabet < 1 || alphabet > 256)
        fail(errc::invalid_argument, "adaptive model alphabet must be 1..256");
    counts_.assign(alphabet, 1);
    scaled_.assign(alphabet, 0);
    total_ = alphabet;
}

const std::vector<uint32_t>& AdaptiveModel::table() {
    // total_ <= 60032, so every count scales to >= 1 and the repair step
    // only ever adds.
    for (size_t i = 0; i < counts_.size(); i++)
        scaled_[i] = static_cast<uint32_t>(
            static_cast<uint64_t>(counts_[i]) * kFreqTotal / total_);
    repair_to_total(scaled_, kFreqTotal);
    return scaled_;
}

void AdaptiveModel::update(uint32_t sym) {
    counts_[sym] += 32;
    total_ += 32;
    if (total_ > 60000) {
        total_ = 0;
        for (auto& c : counts_) {
            c = c >> 1 ? c >> 1 : 1;
            total_ += c;
        }
    }
}

// ------------------------------------------------------------- helpers

std::vector<uint8_t> ac_encode(const std::vector<uint32_t>& symbols,
                               const std::vector<FreqTable>& tables) {
    if (symbols.size() != tables.size())
        fail(errc::invalid_argument, "one table per symbol required");
    std::vector<uint8_t> out;
    RangeEncoder enc(out);
    for (size_t i = 0; i < symbols.size(); i++)
        enc.encode_symbol(tables[i].freq, symbols[i]);
    enc.finish();
    return out;
}

std::vector<uint32_t> ac_decode(const uint8_t* data, size_t len,
                                const std::vector<FreqTable>& tables) {
    std::vector<uint32_t> out;
    out.reserve(tables.size());
    RangeDecoder dec(data, len);
    for (const auto& t : tables)
        out.push_back(dec.decode_symbol(t.freq));
    return out;
}

std::vector<uint8_t> ac_encode_adaptive(const std::vector<uint32_t>& symbols,
                                        uint32_t alphabet) {
    std::vector<uint8_t> out;
    RangeEncoder enc(out);
    AdaptiveModel model(alphabet);
    for (uint32_t s : symbols) {
        enc.encode_symbol(model.table(), s);
        model.update(s);
    }
    enc.finish();
    return out;
}

std::vector<uint32_t> ac_decode_adaptive(const uint8_t* data, size_t len,
                                         uint32_t alphabet, size_t count) {
    std::vector<uint32_t> out;
    out.reserve(count);
    RangeDecoder dec(data, len);
    AdaptiveModel model(alphabet);
    for (size_t i = 0; i < count; i++) {
        uint32_t s = dec.decode_symbol(model.table());
        model.update(s);
        out.push_back(s);
    }
    return out;
}

} // namespace msrc
