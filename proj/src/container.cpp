#include "container.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "errors.hpp"
#include "image.hpp"

namespace msrc {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'R', 'C'};
constexpr uint8_t kVersion = 1;
constexpr size_t kFixedHead = 36;      // magic .. params length prefix
constexpr size_t kChannelMeta = 11;    // r_min, flag, msb_len, lsb_len
constexpr size_t kTail = 16;           // lossy_len, pmf_digest, payload_crc

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(v & 0xFF);
    out.push_back(v >> 8);
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; i++) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; i++) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint16_t get_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t get_u32(const uint8_t* p) {
    return p[0] | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return v;
}

const uint32_t* crc_table() {
    static const auto tab = [] {
        static uint32_t t[256];
        for (uint32_t i = 0; i < 256; i++) {
            uint32_t c = i;
            for (int k = 0; k < 8; k++) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    return tab;
}

void validate_semantics(const ContainerData& d) {
    if (d.width == 0 || d.height == 0)
        fail(errc::malformed_header, "zero image dimension");
    if (static_cast<uint64_t>(d.width) * d.height > kMaxPixels)
        fail(errc::image_too_large, "pixel count above limit");
    if (d.channels.size() != 1 && d.channels.size() != 3)
        fail(errc::malformed_header, "channel count must be 1 or 3");
    d.backend.validate();
    if (d.backend.kind == BackendKind::down2x && d.backend.param != 0)
        fail(errc::invalid_backend_param, "down2x takes no parameter");
    if (d.T < 1 || d.T > 64)
        fail(errc::malformed_header, "iteration count outside 1..64");
    if (!std::isfinite(d.beta) || d.beta < 0.0)
        fail(errc::malformed_header, "beta must be finite and non-negative");
    d.params.validate();
    for (const auto& ch : d.channels) {
        if (ch.r_min < -255 || ch.r_min > 255)
            fail(errc::malformed_header, "residual minimum out of range");
        if (ch.flag > 1)
            fail(errc::malformed_header, "coarse-plane flag must be 0 or 1");
        if ((ch.flag == 0) != ch.msb.empty())
            fail(errc::malformed_header, "coarse-plane flag disagrees with its length");
    }
}

} // namespace

size_t header_size(uint32_t channels) {
    return kFixedHead + kParamsBlobSize + kChannelMeta * channels + kTail;
}

uint32_t crc32_ieee(const uint8_t* data, size_t len) {
    const uint32_t* tab = crc_table();
    uint32_t c = 0xFFFFFFFFu;
    for (size_t i = 0; i < len; i++) c = tab[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<uint8_t> write_container(const ContainerData& d) {
    validate_semantics(d);

    std::vector<uint8_t> out;
    size_t payload = d.lossy.size();
    for (const auto& ch : d.channels) payload += ch.msb.size() + ch.lsb.size();
    out.reserve(header_size(static_cast<uint32_t>(d.channels.size())) + payload);

    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    put_u32(out, d.width);
    put_u32(out, d.height);
    out.push_back(static_cast<uint8_t>(d.channels.size()));
    out.push_back(static_cast<uint8_t>(d.backend.kind));
    out.push_back(static_cast<uint8_t>(d.backend.param));
    out.push_back(static_cast<uint8_t>(d.scheduler));
    out.push_back(static_cast<uint8_t>(d.T));
    put_u64(out, std::bit_cast<uint64_t>(d.beta));
    put_u64(out, d.seed);

    std::vector<uint8_t> blob = serialize_params(d.params);
    put_u16(out, static_cast<uint16_t>(blob.size()));
    out.insert(out.end(), blob.begin(), blob.end());

    for (const auto& ch : d.channels) {
        put_u16(out, static_cast<uint16_t>(ch.r_min));
        out.push_back(ch.flag);
        put_u32(out, static_cast<uint32_t>(ch.msb.size()));
        put_u32(out, static_cast<uint32_t>(ch.lsb.size()));
    }
    put_u32(out, static_cast<uint32_t>(d.lossy.size()));
    put_u64(out, d.pmf_digest);

    size_t crc_off = out.size();
    put_u32(out, 0);
    out.insert(out.end(), d.lossy.begin(), d.lossy.end());
    for (const auto& ch : d.channels) {
        out.insert(out.end(), ch.msb.begin(), ch.msb.end());
        out.insert(out.end(), ch.lsb.begin(), ch.lsb.end());
    }

    // checksum covers every byte except its own field
    uint32_t crc = crc32_ieee(out.data(), crc_off);
    const uint32_t* tab = crc_table();
    crc ^= 0xFFFFFFFFu;
    for (size_t i = crc_off + 4; i < out.size(); i++)
        crc = tab[(crc ^ out[i]) & 0xFF] ^ (crc >> 8);
    crc ^= 0xFFFFFFFFu;
    out[crc_off] = crc & 0xFF;
    out[crc_off + 1] = (crc >> 8) & 0xFF;
    out[crc_off + 2] = (crc >> 16) & 0xFF;
    out[crc_off + 3] = (crc >> 24) & 0xFF;
    return out;
}

ContainerData read_container(const uint8_t* data, size_t len) {
    if (len < 4 || std::memcmp(data, kMagic, 4) != 0)
        fail(errc::bad_magic, "not a codec container");
    if (len < 5)
        fail(errc::length_mismatch, "truncated before version byte");
    if (data[4] != kVersion)
        fail(errc::unsupported_version, "unknown container version");
    if (len < kFixedHead)
        fail(errc::length_mismatch, "truncated fixed header");

    uint16_t params_len = get_u16(data + 34);
    if (params_len != kParamsBlobSize)
        fail(errc::malformed_params, "unexpected parameter blob size");
    uint32_t nch = data[13];
    if (nch == 0)
        fail(errc::malformed_header, "zero channels");
    size_t head = header_size(nch);
    if (len < head)
        fail(errc::length_mismatch, "truncated header");

    const uint8_t* meta = data + kFixedHead + kParamsBlobSize;
    uint64_t payload = 0;
    for (uint32_t c = 0; c < nch; c++) {
        const uint8_t* m = meta + c * kChannelMeta;
        uint8_t flag = m[2];
        if (flag) payload += get_u32(m + 3);
        payload += get_u32(m + 7);
    }
    const uint8_t* tail = meta + nch * kChannelMeta;
    payload += get_u32(tail);
    if (len != head + payload)
        fail(errc::length_mismatch, "container length disagrees with header");

    size_t crc_off = head - 4;
    uint32_t stored = get_u32(data + crc_off);
    const uint32_t* ctab = crc_table();
    uint32_t crc = 0xFFFFFFFFu;
    for (size_t i = 0; i < crc_off; i++) crc = ctab[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
    for (size_t i = crc_off + 4; i < len; i++) crc = ctab[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
    crc ^= 0xFFFFFFFFu;
    if (crc != stored)
        fail(errc::crc_mismatch, "container checksum failed");

    ContainerData d;
    d.width = get_u32(data + 5);
    d.height = get_u32(data + 9);
    d.backend.kind = static_cast<BackendKind>(data[14]);
    d.backend.param = data[15];
    if (data[16] > 2)
        fail(errc::malformed_header, "unknown scheduler");
    d.scheduler = static_cast<Scheduler>(data[16]);
    d.T = data[17];
    d.beta = std::bit_cast<double>(get_u64(data + 18));
    d.seed = get_u64(data + 26);
    if (data[14] > 1)
        fail(errc::malformed_header, "unknown lossy backend");
    d.params = parse_params(data + 36, kParamsBlobSize);

    d.channels.resize(nch);
    const uint8_t* p = data + head;
    uint32_t lossy_len = get_u32(tail);
    d.pmf_digest = get_u64(tail + 4);
    d.lossy.assign(p, p + lossy_len);
    p += lossy_len;
    for (uint32_t c = 0; c < nch; c++) {
        const uint8_t* m = meta + c * kChannelMeta;
        ChannelBlock& ch = d.channels[c];
        ch.r_min = static_cast<int16_t>(get_u16(m));
        ch.flag = m[2];
        uint32_t msb_len = get_u32(m + 3);
        uint32_t lsb_len = get_u32(m + 7);
        if (ch.flag == 1) {
            ch.msb.assign(p, p + msb_len);
            p += msb_len;
        } else if (msb_len != 0) {
            fail(errc::malformed_header, "coarse-plane length without its flag");
        }
        ch.lsb.assign(p, p + lsb_len);
        p += lsb_len;
    }
    validate_semantics(d);
    return d;
}

} // namespace msrc
