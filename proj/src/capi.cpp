#include "msrc/msrc.h"

#include <cstdlib>
#include <cstring>
#include <new>

#include "codec.hpp"
#include "errors.hpp"
#include "estimator.hpp"
#include "image.hpp"

struct msrc_image {
    msrc::Image img;
};

struct msrc_stats {
    msrc::EncodeStats st;
};

namespace {

template <typename F>
msrc_status guard(F&& f) noexcept {
    try {
        f();
        return MSRC_OK;
    } catch (const msrc::codec_error& e) {
        return static_cast<msrc_status>(e.code());
    } catch (const std::bad_alloc&) {
        return MSRC_ERR_INTERNAL;
    } catch (...) {
        return MSRC_ERR_INTERNAL;
    }
}

uint8_t* copy_out(const std::vector<uint8_t>& v) {
    auto* p = static_cast<uint8_t*>(std::malloc(v.size() ? v.size() : 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, v.data(), v.size());
    return p;
}

const msrc::IterationTrace* trace_at(const msrc_stats* st, uint32_t channel,
                                     uint32_t iter) {
    if (!st || channel >= st->st.channels.size()) return nullptr;
    const auto& tr = st->st.channels[channel].trace;
    if (iter < 1 || iter > tr.size()) return nullptr;
    return &tr[iter - 1];
}

msrc::EncodeOptions to_options(const msrc_encode_options& o) {
    msrc::EncodeOptions opt;
    if (o.backend > 1)
        msrc::fail(msrc::errc::invalid_argument, "unknown backend");
    opt.backend.kind = static_cast<msrc::BackendKind>(o.backend);
    opt.backend.param = o.backend_param;
    opt.backend.validate();
    if (o.backend == 1 && o.backend_param != 0)
        msrc::fail(msrc::errc::invalid_backend_param, "down2x takes no parameter");
    if (o.scheduler > 2)
        msrc::fail(msrc::errc::invalid_argument, "unknown scheduler");
    opt.scheduler = static_cast<msrc::Scheduler>(o.scheduler);
    opt.T = o.iterations;
    opt.beta = o.beta;
    opt.seed = o.seed;
    if (o.params)
        opt.params = msrc::parse_params(o.params, o.params_len);
    return opt;
}

} // namespace

extern "C" {

const char* msrc_status_name(msrc_status s) {
    if (s < MSRC_OK || s > MSRC_ERR_INTERNAL) return "unknown";
    return msrc::errc_name(static_cast<msrc::errc>(s));
}

msrc_status msrc_image_load_pnm(const uint8_t* data, size_t len, msrc_image** out) {
    if (!data || !out) return MSRC_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = new msrc_image{msrc::load_image(data, len)}; });
}

msrc_status msrc_image_save_pnm(const msrc_image* img, uint8_t** data, size_t* len) {
    if (!img || !data || !len) return MSRC_ERR_INVALID_ARGUMENT;
    return guard([&] {
        std::vector<uint8_t> bytes = msrc::save_image(img->img);
        *data = copy_out(bytes);
        *len = bytes.size();
    });
}

msrc_status msrc_image_generate(int kind, uint32_t width, uint32_t height,
                                uint32_t channels, uint64_t seed, msrc_image** out) {
    if (!out || kind < 0 || kind > 3) return MSRC_ERR_INVALID_ARGUMENT;
    return guard([&] {
        *out = new msrc_image{msrc::generate_synthetic(
            static_cast<msrc::SynthKind>(kind), width, height, channels, seed)};
    });
}

uint32_t msrc_image_width(const msrc_image* img) { return img ? img->img.width : 0; }
uint32_t msrc_image_height(const msrc_image* img) { return img ? img->img.height : 0; }
uint32_t msrc_image_channels(const msrc_image* img) {
    return img ? img->img.channels() : 0;
}

const uint8_t* msrc_image_plane(const msrc_image* img, uint32_t channel) {
    if (!img || channel >= img->img.channels()) return nullptr;
    return img->img.planes[channel].data();
}

int msrc_image_equal(const msrc_image* a, const msrc_image* b) {
    if (!a || !b) return 0;
    return a->img == b->img ? 1 : 0;
}

void msrc_image_free(msrc_image* img) { delete img; }

void msrc_encode_options_init(msrc_encode_options* opt) {
    if (!opt) return;
    opt->backend = 0;
    opt->backend_param = 16;
    opt->scheduler = 0;
    opt->iterations = 12;
    opt->beta = 10.5;
    opt->seed = 42;
    opt->params = nullptr;
    opt->params_len = 0;
}

msrc_status msrc_encode(const msrc_image* img, const msrc_encode_options* opt,
                        uint8_t** data, size_t* len, msrc_stats** stats) {
    if (!img || !opt || !data || !len) return MSRC_ERR_INVALID_ARGUMENT;
    return guard([&] {
        msrc::EncodeOptions options = to_options(*opt);
        msrc::EncodeStats st;
        std::vector<uint8_t> bytes =
            msrc::encode_image(img->img, options, stats ? &st : nullptr);
        *data = copy_out(bytes);
        *len = bytes.size();
        if (stats) *stats = new msrc_stats{std::move(st)};
    });
}

msrc_status msrc_decode(const uint8_t* data, size_t len, msrc_image** out) {
    if (!data || !out) return MSRC_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = new msrc_image{msrc::decode_image(data, len)}; });
}

msrc_status msrc_inspect(const uint8_t* data, size_t len, msrc_container_info* out) {
    if (!data || !out) return MSRC_ERR_INVALID_ARGUMENT;
    return guard([&] {
        msrc::ContainerInfo info = msrc::inspect_container(data, len);
        std::memset(out, 0, sizeof(*out));
        out->width = info.width;
        out->height = info.height;
        out->channels = info.channels;
        out->backend = static_cast<uint8_t>(info.backend);
        out->backend_param = static_cast<uint8_t>(info.backend_param);
        out->scheduler = static_cast<uint8_t>(info.scheduler);
        out->iterations = static_cast<uint8_t>(info.T);
        out->beta = info.beta;
        out->seed = info.seed;
        out->pmf_digest = info.pmf_digest;
        out->header_bytes = info.header_bytes;
        out->lossy_bytes = info.lossy_bytes;
        out->total_bytes = info.total_bytes;
        for (uint32_t c = 0; c < info.channels && c < 3; c++) {
            out->r_min[c] = info.ch[c].r_min;
            out->flag[c] = info.ch[c].flag;
            out->msb_bytes[c] = info.ch[c].msb_bytes;
            out->lsb_bytes[c] = info.ch[c].lsb_bytes;
        }
    });
}

uint32_t msrc_stats_channels(const msrc_stats* st) {
    return st ? static_cast<uint32_t>(st->st.channels.size()) : 0;
}

uint32_t msrc_stats_iterations(const msrc_stats* st) {
    if (!st || st->st.channels.empty()) return 0;
    return static_cast<uint32_t>(st->st.channels[0].trace.size());
}

uint64_t msrc_stats_header_bytes(const msrc_stats* st) {
    return st ? st->st.header_bytes : 0;
}
uint64_t msrc_stats_lossy_bytes(const msrc_stats* st) {
    return st ? st->st.lossy_bytes : 0;
}
uint64_t msrc_stats_total_bytes(const msrc_stats* st) {
    return st ? st->st.total_bytes : 0;
}

int16_t msrc_stats_r_min(const msrc_stats* st, uint32_t channel) {
    if (!st || channel >= st->st.channels.size()) return 0;
    return st->st.channels[channel].r_min;
}

int msrc_stats_flag(const msrc_stats* st, uint32_t channel) {
    if (!st || channel >= st->st.channels.size()) return 0;
    return st->st.channels[channel].flag;
}

uint64_t msrc_stats_msb_bytes(const msrc_stats* st, uint32_t channel) {
    if (!st || channel >= st->st.channels.size()) return 0;
    return st->st.channels[channel].msb_bytes;
}

uint64_t msrc_stats_lsb_bytes(const msrc_stats* st, uint32_t channel) {
    if (!st || channel >= st->st.channels.size()) return 0;
    return st->st.channels[channel].lsb_bytes;
}

uint64_t msrc_stats_masked(const msrc_stats* st, uint32_t channel, uint32_t iter) {
    const auto* t = trace_at(st, channel, iter);
    return t ? t->masked : 0;
}

uint64_t msrc_stats_coded(const msrc_stats* st, uint32_t channel, uint32_t iter) {
    const auto* t = trace_at(st, channel, iter);
    return t ? t->coded : 0;
}

uint64_t msrc_stats_bytes(const msrc_stats* st, uint32_t channel, uint32_t iter) {
    const auto* t = trace_at(st, channel, iter);
    return t ? t->bytes : 0;
}

void msrc_stats_free(msrc_stats* st) { delete st; }

msrc_status msrc_fit(const msrc_image* const* images, size_t count,
                     const msrc_encode_options* opt, uint32_t steps, uint64_t seed,
                     uint8_t** params_out, size_t* params_len,
                     double* initial_loss, double* final_loss) {
    if (!images || !opt || !params_out || !params_len) return MSRC_ERR_INVALID_ARGUMENT;
    return guard([&] {
        msrc::EncodeOptions options = to_options(*opt);
        std::vector<msrc::FitItem> corpus;
        corpus.reserve(count);
        for (size_t i = 0; i < count; i++) {
            if (!images[i])
                msrc::fail(msrc::errc::invalid_argument, "null image in corpus");
            corpus.push_back({images[i]->img, options.backend});
        }
        msrc::FitResult res =
            msrc::fit_params(corpus, options.params, steps, seed);
        std::vector<uint8_t> blob = msrc::serialize_params(res.params);
        *params_out = copy_out(blob);
        *params_len = blob.size();
        if (initial_loss) *initial_loss = res.initial_loss;
        if (final_loss) *final_loss = res.final_loss;
    });
}

void msrc_free(void* p) { std::free(p); }

} // extern "C"
