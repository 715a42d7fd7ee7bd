#include "sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "errors.hpp"
#include "range_coder.hpp"

namespace msrc {

namespace {

// ln(f / 65536) for every frequency a quantized row can hold (all >= 1)
const double* ln_freq_table() {
    static const auto tab = [] {
        auto t = std::make_unique<double[]>(65536);
        const double ln_total = std::log(65536.0);
        t[0] = -ln_total;
        for (uint32_t f = 1; f < 65536; f++)
            t[f] = std::log(static_cast<double>(f)) - ln_total;
        return t;
    }();
    return tab.get();
}

uint64_t digest_tables(const QPmfPlane& q) {
    uint64_t h = 14695981039346656037ull;
    for (uint16_t b : q.bins) {
        h = (h ^ (b & 0xFF)) * 1099511628211ull;
        h = (h ^ (b >> 8)) * 1099511628211ull;
    }
    return h;
}

void check_cfg(const ChannelConfig& cfg, size_t lsb_size) {
    if (cfg.width == 0 || cfg.height == 0 || !cfg.params || !cfg.recon)
        fail(errc::invalid_argument, "incomplete channel config");
    if (cfg.T < 1 || cfg.T > 64)
        fail(errc::invalid_argument, "iteration count outside 1..64");
    if (!std::isfinite(cfg.beta) || cfg.beta < 0.0)
        fail(errc::invalid_argument, "beta must be finite and non-negative");
    if (lsb_size != static_cast<size_t>(cfg.width) * cfg.height)
        fail(errc::shape_mismatch, "lsb plane does not match config dims");
    cfg.params->validate();
}

} // namespace

std::vector<uint32_t> sample_values(const QPmfPlane& q, const std::vector<uint8_t>& anchor,
                                    SplitMix64& rng) {
    size_t n = anchor.size();
    if (q.bins.size() != n * 64)
        fail(errc::shape_mismatch, "pmf plane does not match anchor plane");
    std::vector<uint32_t> v(n, 0);
    for (size_t pos = 0; pos < n; pos++) {
        if (anchor[pos]) continue;
        uint32_t u = static_cast<uint32_t>(rng.next_u64() % 65536);
        const uint16_t* row = q.bins.data() + pos * 64;
        uint32_t cum = 0;
        uint32_t s = 0;
        for (; s < 63; s++) {
            cum += row[s];
            if (cum > u) break;
        }
        v[pos] = s;
    }
    return v;
}

std::vector<double> compute_scores(const QPmfPlane& q, const std::vector<uint32_t>& values,
                                   const std::vector<uint8_t>& anchor, double beta,
                                   SplitMix64& rng) {
    size_t n = anchor.size();
    if (values.size() != n || q.bins.size() != n * 64)
        fail(errc::shape_mismatch, "values/pmf do not match anchor plane");
    const double* ln_tab = ln_freq_table();
    std::vector<double> scores(n, std::numeric_limits<double>::infinity());
    constexpr double k2_64 = 0x1.0p-64;
    for (size_t pos = 0; pos < n; pos++) {
        if (anchor[pos]) continue;
        double z = 0.0;
        for (int i = 0; i < 12; i++) z += static_cast<double>(rng.next_u64()) * k2_64;
        z -= 6.0;
        scores[pos] = ln_tab[q.bins[pos * 64 + values[pos]]] + beta * z;
    }
    return scores;
}

std::vector<uint8_t> build_mask(const std::vector<double>& scores, uint64_t k) {
    size_t n = scores.size();
    std::vector<std::pair<double, uint32_t>> finite;
    finite.reserve(n);
    for (size_t i = 0; i < n; i++)
        if (std::isfinite(scores[i]))
            finite.emplace_back(scores[i], static_cast<uint32_t>(i));
    uint64_t kk = std::min<uint64_t>(k, finite.size());
    std::vector<uint8_t> mask(n, 0);
    if (kk == 0) return mask;
    if (kk < finite.size())
        std::nth_element(finite.begin(), finite.begin() + (kk - 1), finite.end());
    for (uint64_t i = 0; i < kk; i++) mask[finite[i].second] = 1;
    return mask;
}

ChannelEncodeResult encode_channel(const ChannelConfig& cfg, const std::vector<uint8_t>& lsb,
                                   bool want_digest) {
    check_cfg(cfg, lsb.size());
    size_t n = lsb.size();
    std::vector<double> act = compute_activity(cfg.recon, cfg.width, cfg.height);
    std::vector<uint8_t> anchor(n, 0);
    SplitMix64 rng(cfg.seed);

    ChannelEncodeResult res;
    RangeEncoder enc(res.stream);
    uint64_t prev_bytes = 0;
    for (uint32_t t = 1; t <= cfg.T; t++) {
        ContextState ctx;
        ctx.width = cfg.width;
        ctx.height = cfg.height;
        ctx.lsb = lsb.data();
        ctx.anchor = anchor.data();
        ctx.recon = cfg.recon;
        ctx.prev = cfg.prev;
        ctx.activity = act.data();
        ctx.zero_symbol = cfg.zero_symbol;
        QPmfPlane q = predict_qpmf(ctx, *cfg.params);
        if (t == 1 && want_digest) res.digest = digest_tables(q);

        auto values = sample_values(q, anchor, rng);
        auto scores = compute_scores(q, values, anchor, cfg.beta, rng);
        uint64_t k = masked_count(tau(cfg.scheduler, t, cfg.T), n);
        auto mask = build_mask(scores, k);

        uint64_t coded = 0, kept = 0;
        for (size_t pos = 0; pos < n; pos++) {
            if (anchor[pos]) continue;
            if (mask[pos]) {
                kept++;
                continue;
            }
            enc.encode_symbol(q.row(pos), 64, lsb[pos]);
            anchor[pos] = 1;
            coded++;
        }
        res.trace.push_back({kept, coded, enc.bytes_emitted() - prev_bytes});
        prev_bytes = enc.bytes_emitted();
    }
    enc.finish();
    res.trace.back().bytes += enc.bytes_emitted() - prev_bytes;
    return res;
}

std::vector<uint8_t> decode_channel(const ChannelConfig& cfg, const uint8_t* stream,
                                    size_t len, const uint64_t* expected_digest) {
    size_t n = static_cast<size_t>(cfg.width) * cfg.height;
    check_cfg(cfg, n);
    std::vector<double> act = compute_activity(cfg.recon, cfg.width, cfg.height);
    std::vector<uint8_t> anchor(n, 0);
    std::vector<uint8_t> lsb(n, 0);
    SplitMix64 rng(cfg.seed);

    RangeDecoder dec(stream, len);
    for (uint32_t t = 1; t <= cfg.T; t++) {
        ContextState ctx;
        ctx.width = cfg.width;
        ctx.height = cfg.height;
        ctx.lsb = lsb.data();
        ctx.anchor = anchor.data();
        ctx.recon = cfg.recon;
        ctx.prev = cfg.prev;
        ctx.activity = act.data();
        ctx.zero_symbol = cfg.zero_symbol;
        QPmfPlane q = predict_qpmf(ctx, *cfg.params);
        if (t == 1 && expected_digest && digest_tables(q) != *expected_digest)
            fail(errc::pmf_digest_mismatch, "model tables do not match the stream header");

        auto values = sample_values(q, anchor, rng);
        auto scores = compute_scores(q, values, anchor, cfg.beta, rng);
        uint64_t k = masked_count(tau(cfg.scheduler, t, cfg.T), n);
        auto mask = build_mask(scores, k);

        for (size_t pos = 0; pos < n; pos++) {
            if (anchor[pos] || mask[pos]) continue;
            lsb[pos] = static_cast<uint8_t>(dec.decode_symbol(q.row(pos), 64));
            anchor[pos] = 1;
        }
    }
    return lsb;
}

} // namespace msrc
