#include "codec.hpp"

#include <future>

#include "errors.hpp"
#include "residual.hpp"

namespace msrc {

namespace {

ChannelConfig channel_config(uint32_t w, uint32_t h, const EncodeOptions& opt,
                             uint32_t c, const uint8_t* recon, const uint8_t* prev,
                             uint8_t zs) {
    ChannelConfig cfg;
    cfg.width = w;
    cfg.height = h;
    cfg.scheduler = opt.scheduler;
    cfg.T = opt.T;
    cfg.beta = opt.beta;
    cfg.seed = opt.seed ^ c;
    cfg.params = &opt.params;
    cfg.recon = recon;
    cfg.prev = prev;
    cfg.zero_symbol = zs;
    return cfg;
}

} // namespace

std::vector<uint8_t> encode_image(const Image& img, const EncodeOptions& opt,
                                  EncodeStats* stats) {
    if (img.channels() != 1 && img.channels() != 3)
        fail(errc::invalid_argument, "channel count must be 1 or 3");
    if (img.width == 0 || img.height == 0)
        fail(errc::invalid_argument, "empty image");
    if (img.pixel_count() > kMaxPixels)
        fail(errc::image_too_large, "pixel count above limit");

    LossyResult lossy = lossy_encode(img, opt.backend);
    auto residuals = residual_compute(img, lossy.recon);

    uint32_t nch = img.channels();
    std::vector<DecomposedResidual> dec(nch);
    for (uint32_t c = 0; c < nch; c++) dec[c] = decompose(residuals[c]);

    // Channels are independent given the source lsb planes, so they encode
    // in parallel; channel c conditions on channel c-1's true plane.
    std::vector<std::future<ChannelEncodeResult>> jobs;
    for (uint32_t c = 0; c < nch; c++) {
        ChannelConfig cfg = channel_config(img.width, img.height, opt, c,
                                           lossy.recon.planes[c].data(),
                                           c > 0 ? dec[c - 1].lsb.data() : nullptr,
                                           zero_symbol_for(dec[c].r_min));
        jobs.push_back(std::async(std::launch::async,
                                  [cfg, &dec, c] { return encode_channel(cfg, dec[c].lsb, c == 0); }));
    }

    ContainerData d;
    d.width = img.width;
    d.height = img.height;
    d.backend = opt.backend;
    d.scheduler = opt.scheduler;
    d.T = opt.T;
    d.beta = opt.beta;
    d.seed = opt.seed;
    d.params = opt.params;
    d.lossy = std::move(lossy.substream);
    d.channels.resize(nch);

    std::vector<ChannelEncodeResult> results(nch);
    for (uint32_t c = 0; c < nch; c++) results[c] = jobs[c].get();
    d.pmf_digest = results[0].digest;
    for (uint32_t c = 0; c < nch; c++) {
        ChannelBlock& ch = d.channels[c];
        ch.r_min = dec[c].r_min;
        ch.flag = dec[c].flag;
        if (dec[c].flag) ch.msb = rle_encode(dec[c].msb);
        ch.lsb = std::move(results[c].stream);
    }

    std::vector<uint8_t> out = write_container(d);
    if (stats) {
        stats->header_bytes = header_size(nch);
        stats->lossy_bytes = d.lossy.size();
        stats->total_bytes = out.size();
        stats->channels.clear();
        for (uint32_t c = 0; c < nch; c++) {
            ChannelStats cs;
            cs.r_min = d.channels[c].r_min;
            cs.flag = d.channels[c].flag;
            cs.msb_bytes = d.channels[c].msb.size();
            cs.lsb_bytes = d.channels[c].lsb.size();
            cs.trace = std::move(results[c].trace);
            stats->channels.push_back(std::move(cs));
        }
    }
    return out;
}

Image decode_image(const uint8_t* data, size_t len) {
    ContainerData d = read_container(data, len);
    uint32_t nch = static_cast<uint32_t>(d.channels.size());
    Image recon = lossy_decode(d.lossy, d.backend, d.width, d.height, nch);

    Image out;
    out.width = d.width;
    out.height = d.height;
    out.planes.resize(nch);
    size_t n = static_cast<size_t>(d.width) * d.height;

    std::vector<uint8_t> prev_lsb;
    for (uint32_t c = 0; c < nch; c++) {
        const ChannelBlock& ch = d.channels[c];
        ChannelConfig cfg;
        cfg.width = d.width;
        cfg.height = d.height;
        cfg.scheduler = d.scheduler;
        cfg.T = d.T;
        cfg.beta = d.beta;
        cfg.seed = d.seed ^ c;
        cfg.params = &d.params;
        cfg.recon = recon.planes[c].data();
        cfg.prev = c > 0 ? prev_lsb.data() : nullptr;
        cfg.zero_symbol = zero_symbol_for(ch.r_min);

        std::vector<uint8_t> lsb =
            decode_channel(cfg, ch.lsb.data(), ch.lsb.size(), c == 0 ? &d.pmf_digest : nullptr);

        DecomposedResidual dr;
        dr.r_min = ch.r_min;
        dr.flag = ch.flag;
        dr.lsb = lsb;
        if (ch.flag) dr.msb = rle_decode(ch.msb.data(), ch.msb.size(), n);
        std::vector<int16_t> r = recompose(dr);

        std::vector<uint8_t>& plane = out.planes[c];
        plane.resize(n);
        const std::vector<uint8_t>& rc = recon.planes[c];
        for (size_t i = 0; i < n; i++) {
            int v = rc[i] + r[i];
            if (v < 0 || v > 255)
                fail(errc::corrupt_substream, "reconstructed sample out of range");
            plane[i] = static_cast<uint8_t>(v);
        }
        prev_lsb = std::move(lsb);
    }
    return out;
}

ContainerInfo inspect_container(const uint8_t* data, size_t len) {
    ContainerData d = read_container(data, len);
    ContainerInfo info;
    info.width = d.width;
    info.height = d.height;
    info.channels = static_cast<uint32_t>(d.channels.size());
    info.backend = d.backend.kind;
    info.backend_param = d.backend.param;
    info.scheduler = d.scheduler;
    info.T = d.T;
    info.beta = d.beta;
    info.seed = d.seed;
    info.pmf_digest = d.pmf_digest;
    info.header_bytes = header_size(info.channels);
    info.lossy_bytes = d.lossy.size();
    info.total_bytes = len;
    for (uint32_t c = 0; c < info.channels; c++) {
        info.ch[c].r_min = d.channels[c].r_min;
        info.ch[c].flag = d.channels[c].flag;
        info.ch[c].msb_bytes = d.channels[c].msb.size();
        info.ch[c].lsb_bytes = d.channels[c].lsb.size();
    }
    return info;
}

} // namespace msrc
