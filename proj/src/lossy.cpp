#include "lossy.hpp"

#include <algorithm>

#include "errors.hpp"
#include "range_coder.hpp"

namespace msrc {

void LossyBackend::validate() const {
    switch (kind) {
    case BackendKind::quantize:
        if (param < 2 || param > 128)
            fail(errc::invalid_backend_param, "quantize step must be in [2, 128]");
        return;
    case BackendKind::down2x:
        return;
    default:
        fail(errc::invalid_backend_param, "unknown lossy backend");
    }
}

namespace {

uint8_t dequant(uint32_t q, uint32_t m) {
    uint32_t v = q * m + q / 2;
    return static_cast<uint8_t>(std::min(v, 255u));
}

std::vector<uint8_t> downsample2x(const std::vector<uint8_t>& plane,
                                  uint32_t w, uint32_t h) {
    uint32_t dw = (w + 1) / 2, dh = (h + 1) / 2;
    std::vector<uint8_t> out(static_cast<size_t>(dw) * dh);
    for (uint32_t i = 0; i < dh; i++) {
        for (uint32_t j = 0; j < dw; j++) {
            uint32_t sum = 0, cnt = 0;
            for (uint32_t di = 0; di < 2; di++) {
                for (uint32_t dj = 0; dj < 2; dj++) {
                    uint32_t si = 2 * i + di, sj = 2 * j + dj;
                    if (si < h && sj < w) {
                        sum += plane[static_cast<size_t>(si) * w + sj];
                        cnt++;
                    }
                }
            }
            out[static_cast<size_t>(i) * dw + j] = static_cast<uint8_t>(sum / cnt);
        }
    }
    return out;
}

std::vector<uint8_t> upsample_nn(const std::vector<uint8_t>& small,
                                 uint32_t w, uint32_t h) {
    uint32_t dw = (w + 1) / 2;
    std::vector<uint8_t> out(static_cast<size_t>(w) * h);
    for (uint32_t i = 0; i < h; i++)
        for (uint32_t j = 0; j < w; j++)
            out[static_cast<size_t>(i) * w + j] =
                small[static_cast<size_t>(i / 2) * dw + j / 2];
    return out;
}

} // namespace

LossyResult lossy_encode(const Image& img, const LossyBackend& backend) {
    backend.validate();
    LossyResult res;
    res.recon.width = img.width;
    res.recon.height = img.height;
    res.recon.planes.resize(img.channels());

    std::vector<uint8_t> stream;
    RangeEncoder enc(stream);

    if (backend.kind == BackendKind::quantize) {
        uint32_t q = backend.param;
        AdaptiveModel model(255 / q + 1);
        for (uint32_t c = 0; c < img.channels(); c++) {
            const auto& src = img.planes[c];
            auto& rec = res.recon.planes[c];
            rec.resize(src.size());
            for (size_t i = 0; i < src.size(); i++) {
                uint32_t m = src[i] / q;
                enc.encode_symbol(model.table(), m);
                model.update(m);
                rec[i] = dequant(q, m);
            }
        }
    } else {
        AdaptiveModel model(256);
        for (uint32_t c = 0; c < img.channels(); c++) {
            auto small = downsample2x(img.planes[c], img.width, img.height);
            for (uint8_t v : small) {
                enc.encode_symbol(model.table(), v);
                model.update(v);
            }
            res.recon.planes[c] = upsample_nn(small, img.width, img.height);
        }
    }
    enc.finish();
    res.substream = std::move(stream);
    return res;
}

Image lossy_decode(const std::vector<uint8_t>& substream, const LossyBackend& backend,
                   uint32_t width, uint32_t height, uint32_t channels) {
    backend.validate();
    Image recon;
    recon.width = width;
    recon.height = height;
    recon.planes.resize(channels);
    size_t n = static_cast<size_t>(width) * height;

    try {
        RangeDecoder dec(substream.data(), substream.size());
        if (backend.kind == BackendKind::quantize) {
            uint32_t q = backend.param;
            AdaptiveModel model(255 / q + 1);
            for (uint32_t c = 0; c < channels; c++) {
                auto& rec = recon.planes[c];
                rec.resize(n);
                for (size_t i = 0; i < n; i++) {
                    uint32_t m = dec.decode_symbol(model.table());
                    model.update(m);
                    rec[i] = dequant(q, m);
                }
            }
        } else {
            uint32_t dw = (width + 1) / 2, dh = (height + 1) / 2;
            size_t dn = static_cast<size_t>(dw) * dh;
            AdaptiveModel model(256);
            for (uint32_t c = 0; c < channels; c++) {
                std::vector<uint8_t> small(dn);
                for (size_t i = 0; i < dn; i++) {
                    uint32_t v = dec.decode_symbol(model.table());
                    model.update(v);
                    small[i] = static_cast<uint8_t>(v);
                }
                recon.planes[c] = upsample_nn(small, width, height);
            }
        }
    } catch (const codec_error& e) {
        if (e.code() == errc::stream_exhausted)
            fail(errc::corrupt_substream, "lossy substream truncated");
        throw;
    }
    return recon;
}

std::vector<std::vector<int16_t>> residual_compute(const Image& src, const Image& recon) {
    if (src.width != recon.width || src.height != recon.height ||
        src.channels() != recon.channels())
        fail(errc::shape_mismatch, "source and reconstruction shapes differ");
    std::vector<std::vector<int16_t>> out(src.channels());
    for (uint32_t c = 0; c < src.channels(); c++) {
        const auto& a = src.planes[c];
        const auto& b = recon.planes[c];
        out[c].resize(a.size());
        for (size_t i = 0; i < a.size(); i++)
            out[c][i] = static_cast<int16_t>(static_cast<int>(a[i]) - b[i]);
    }
    return out;
}

} // namespace msrc
