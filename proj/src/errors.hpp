#pragma once

#include <stdexcept>
#include <string>

namespace msrc {

enum class errc {
    ok = 0,
    invalid_argument,
    malformed_header,
    unsupported_maxval,
    truncated_payload,
    image_too_large,
    invalid_backend_param,
    shape_mismatch,
    corrupt_substream,
    run_length_overflow,
    truncated_stream,
    stream_exhausted,
    symbol_out_of_alphabet,
    out_of_range_iteration,
    bad_magic,
    unsupported_version,
    length_mismatch,
    crc_mismatch,
    pmf_digest_mismatch,
    malformed_params,
    empty_corpus,
    io_error,
    internal,
};

const char* errc_name(errc c);

class codec_error : public std::runtime_error {
public:
    codec_error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw codec_error(code, what);
}

} // namespace msrc
