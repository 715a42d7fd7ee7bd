#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "image.hpp"
#include "lossy.hpp"

namespace msrc {

// Offsets of the 5x5 causal context, row-major, center excluded.  Parameter
// files index w_off in exactly this order.
inline constexpr int kContextOffsets = 24;
extern const std::array<std::pair<int, int>, kContextOffsets> kOffsets;

struct EstimatorParams {
    std::array<double, kContextOffsets> w_off;
    double w_ch;
    double w_zero;
    double b0;
    double c_act;
    double c_dis;
    double floor_mass;

    static EstimatorParams defaults();
    void validate() const;
};

// 29 fitted values (w_off, w_ch, w_zero, b0, c_act, c_dis); floor_mass is a
// fixed stability constant of the format and is not serialized.
inline constexpr uint32_t kParamCount = 29;
inline constexpr size_t kParamsBlobSize = 8 + 2 + kParamCount * 8;
std::vector<uint8_t> serialize_params(const EstimatorParams& p);
EstimatorParams parse_params(const uint8_t* data, size_t len);

// View over one channel mid-flight.  lsb is consulted only at anchor=1
// positions; prev (previous channel's complete symbol plane) may be null.
// activity is an optional per-position cache of the recon activity term;
// when null it is computed on the fly, with identical results.
struct ContextState {
    uint32_t width = 0;
    uint32_t height = 0;
    const uint8_t* lsb = nullptr;
    const uint8_t* anchor = nullptr;
    const uint8_t* recon = nullptr;
    const uint8_t* prev = nullptr;
    const double* activity = nullptr;
    uint8_t zero_symbol = 0;
};

struct PmfPlane {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<double> p;          // width*height*64, row-major, bin-minor
};

struct QPmfPlane {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<uint16_t> bins;     // width*height*64; each row sums to 65536

    const uint16_t* row(size_t pos) const { return bins.data() + pos * 64; }
};

double activity_at(const uint8_t* recon, uint32_t w, uint32_t h,
                   uint32_t i, uint32_t j);
std::vector<double> compute_activity(const uint8_t* recon, uint32_t w, uint32_t h);

PmfPlane predict_pmf(const ContextState& ctx, const EstimatorParams& params);
QPmfPlane quantize_pmf(const PmfPlane& plane);

// Fused predict+quantize used by the coding drivers; bit-identical to
// quantize_pmf(predict_pmf(ctx, params)).
QPmfPlane predict_qpmf(const ContextState& ctx, const EstimatorParams& params);

// Mean -log2 p(symbol) over mask=1 positions; 0 when none are set.
double masked_cross_entropy(const PmfPlane& pmf, const std::vector<uint8_t>& symbols,
                            const std::vector<uint8_t>& mask);

struct FitItem {
    Image image;
    LossyBackend backend;
};

struct FitResult {
    EstimatorParams params;
    std::vector<double> trace;      // running best held-out loss, one per step
    double initial_loss = 0.0;      // fixed-protocol corpus loss, init params
    double final_loss = 0.0;        // same protocol, returned params
};

FitResult fit_params(const std::vector<FitItem>& corpus, const EstimatorParams& init,
                     uint32_t steps, uint64_t seed);

} // namespace msrc
