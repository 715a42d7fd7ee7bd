#ifndef MSRC_H
#define MSRC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum msrc_status {
    MSRC_OK = 0,
    MSRC_ERR_INVALID_ARGUMENT,
    MSRC_ERR_MALFORMED_HEADER,
    MSRC_ERR_UNSUPPORTED_MAXVAL,
    MSRC_ERR_TRUNCATED_PAYLOAD,
    MSRC_ERR_IMAGE_TOO_LARGE,
    MSRC_ERR_INVALID_BACKEND_PARAM,
    MSRC_ERR_SHAPE_MISMATCH,
    MSRC_ERR_CORRUPT_SUBSTREAM,
    MSRC_ERR_RUN_LENGTH_OVERFLOW,
    MSRC_ERR_TRUNCATED_STREAM,
    MSRC_ERR_STREAM_EXHAUSTED,
    MSRC_ERR_SYMBOL_OUT_OF_ALPHABET,
    MSRC_ERR_OUT_OF_RANGE_ITERATION,
    MSRC_ERR_BAD_MAGIC,
    MSRC_ERR_UNSUPPORTED_VERSION,
    MSRC_ERR_LENGTH_MISMATCH,
    MSRC_ERR_CRC_MISMATCH,
    MSRC_ERR_PMF_DIGEST_MISMATCH,
    MSRC_ERR_MALFORMED_PARAMS,
    MSRC_ERR_EMPTY_CORPUS,
    MSRC_ERR_IO,
    MSRC_ERR_INTERNAL
} msrc_status;

const char* msrc_status_name(msrc_status s);

/* Opaque handles.  Free images with msrc_image_free, stats with
 * msrc_stats_free, and returned byte buffers with msrc_free. */
typedef struct msrc_image msrc_image;
typedef struct msrc_stats msrc_stats;

/* ---- images ---------------------------------------------------------- */

/* Parses a binary PGM (P5) or PPM (P6) with maxval 255. */
msrc_status msrc_image_load_pnm(const uint8_t* data, size_t len, msrc_image** out);

/* Serializes back to P5/P6.  *data is allocated for the caller. */
msrc_status msrc_image_save_pnm(const msrc_image* img, uint8_t** data, size_t* len);

/* kind: 0 constant, 1 uniform noise, 2 horizontal gradient, 3 checkerboard */
msrc_status msrc_image_generate(int kind, uint32_t width, uint32_t height,
                                uint32_t channels, uint64_t seed, msrc_image** out);

uint32_t msrc_image_width(const msrc_image* img);
uint32_t msrc_image_height(const msrc_image* img);
uint32_t msrc_image_channels(const msrc_image* img);

/* Row-major samples of one channel; NULL if the index is out of range. */
const uint8_t* msrc_image_plane(const msrc_image* img, uint32_t channel);

int msrc_image_equal(const msrc_image* a, const msrc_image* b);

void msrc_image_free(msrc_image* img);

/* ---- encoding -------------------------------------------------------- */

typedef struct msrc_encode_options {
    uint8_t backend;       /* 0 quantize, 1 down2x */
    uint8_t backend_param; /* quantizer step for backend 0; must be 0 for backend 1 */
    uint8_t scheduler;     /* 0 cosine, 1 linear, 2 square */
    uint8_t iterations;    /* masked-sampling passes, 1..64 */
    double beta;           /* score noise weight */
    uint64_t seed;
    const uint8_t* params; /* serialized estimator parameters, NULL for defaults */
    size_t params_len;
} msrc_encode_options;

void msrc_encode_options_init(msrc_encode_options* opt);

/* stats may be NULL.  On success *data holds the container bytes. */
msrc_status msrc_encode(const msrc_image* img, const msrc_encode_options* opt,
                        uint8_t** data, size_t* len, msrc_stats** stats);

msrc_status msrc_decode(const uint8_t* data, size_t len, msrc_image** out);

/* ---- container inspection -------------------------------------------- */

typedef struct msrc_container_info {
    uint32_t width, height, channels;
    uint8_t backend, backend_param, scheduler, iterations;
    double beta;
    uint64_t seed;
    uint64_t pmf_digest;
    uint64_t header_bytes, lossy_bytes, total_bytes;
    int16_t r_min[3];
    uint8_t flag[3];
    uint64_t msb_bytes[3];
    uint64_t lsb_bytes[3];
} msrc_container_info;

msrc_status msrc_inspect(const uint8_t* data, size_t len, msrc_container_info* out);

/* ---- encode stats ----------------------------------------------------- */

uint32_t msrc_stats_channels(const msrc_stats* st);
uint32_t msrc_stats_iterations(const msrc_stats* st);
uint64_t msrc_stats_header_bytes(const msrc_stats* st);
uint64_t msrc_stats_lossy_bytes(const msrc_stats* st);
uint64_t msrc_stats_total_bytes(const msrc_stats* st);
int16_t msrc_stats_r_min(const msrc_stats* st, uint32_t channel);
int msrc_stats_flag(const msrc_stats* st, uint32_t channel);
uint64_t msrc_stats_msb_bytes(const msrc_stats* st, uint32_t channel);
uint64_t msrc_stats_lsb_bytes(const msrc_stats* st, uint32_t channel);

/* Per-iteration accounting; iter is 1-based. */
uint64_t msrc_stats_masked(const msrc_stats* st, uint32_t channel, uint32_t iter);
uint64_t msrc_stats_coded(const msrc_stats* st, uint32_t channel, uint32_t iter);
uint64_t msrc_stats_bytes(const msrc_stats* st, uint32_t channel, uint32_t iter);

void msrc_stats_free(msrc_stats* st);

/* ---- parameter fitting ------------------------------------------------ */

/* Tunes the estimator on a corpus.  The backend fields of opt select the
 * lossy stage used during fitting; *params_out receives a serialized
 * parameter blob for msrc_encode_options.params. */
msrc_status msrc_fit(const msrc_image* const* images, size_t count,
                     const msrc_encode_options* opt, uint32_t steps, uint64_t seed,
                     uint8_t** params_out, size_t* params_len,
                     double* initial_loss, double* final_loss);

void msrc_free(void* p);

#ifdef __cplusplus
}
#endif

#endif /* MSRC_H */
