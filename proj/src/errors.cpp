#include "errors.hpp"

namespace msrc {

const char* errc_name(errc c) {
    switch (c) {
    case errc::ok: return "ok";
    case errc::invalid_argument: return "invalid_argument";
    case errc::malformed_header: return "malformed_header";
    case errc::unsupported_maxval: return "unsupported_maxval";
    case errc::truncated_payload: return "truncated_payload";
    case errc::image_too_large: return "image_too_large";
    case errc::invalid_backend_param: return "invalid_backend_param";
    case errc::shape_mismatch: return "shape_mismatch";
    case errc::corrupt_substream: return "corrupt_substream";
    case errc::run_length_overflow: return "run_length_overflow";
    case errc::truncated_stream: return "truncated_stream";
    case errc::stream_exhausted: return "stream_exhausted";
    case errc::symbol_out_of_alphabet: return "symbol_out_of_alphabet";
    case errc::out_of_range_iteration: return "out_of_range_iteration";
    case errc::bad_magic: return "bad_magic";
    case errc::unsupported_version: return "unsupported_version";
    case errc::length_mismatch: return "length_mismatch";
    case errc::crc_mismatch: return "crc_mismatch";
    case errc::pmf_digest_mismatch: return "pmf_digest_mismatch";
    case errc::malformed_params: return "malformed_params";
    case errc::empty_corpus: return "empty_corpus";
    case errc::io_error: return "io_error";
    case errc::internal: return "internal";
    }
    return "unknown";
}

} // namespace msrc
