#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include <msrc/msrc.h>

namespace {

struct ImagePtr {
    msrc_image* p = nullptr;
    ~ImagePtr() { msrc_image_free(p); }
};

struct BufPtr {
    uint8_t* p = nullptr;
    size_t len = 0;
    ~BufPtr() { msrc_free(p); }
};

struct StatsPtr {
    msrc_stats* p = nullptr;
    ~StatsPtr() { msrc_stats_free(p); }
};

} // namespace

TEST_CASE("status names are stable strings") {
    CHECK(std::string(msrc_status_name(MSRC_OK)) == "ok");
    CHECK(std::string(msrc_status_name(MSRC_ERR_CRC_MISMATCH)) == "crc_mismatch");
    CHECK(std::string(msrc_status_name(MSRC_ERR_BAD_MAGIC)) == "bad_magic");
    CHECK(std::string(msrc_status_name(static_cast<msrc_status>(999))) == "unknown");
}

TEST_CASE("option defaults match the documented encoder configuration") {
    msrc_encode_options opt;
    msrc_encode_options_init(&opt);
    CHECK(opt.backend == 0);
    CHECK(opt.backend_param == 16);
    CHECK(opt.scheduler == 0);
    CHECK(opt.iterations == 12);
    CHECK(opt.beta == 10.5);
    CHECK(opt.seed == 42);
    CHECK(opt.params == nullptr);
    CHECK(opt.params_len == 0);
}

TEST_CASE("generate, encode, decode, compare through the C surface") {
    ImagePtr img;
    REQUIRE(msrc_image_generate(2, 20, 14, 3, 5, &img.p) == MSRC_OK);
    CHECK(msrc_image_width(img.p) == 20);
    CHECK(msrc_image_height(img.p) == 14);
    CHECK(msrc_image_channels(img.p) == 3);
    CHECK(msrc_image_plane(img.p, 2) != nullptr);
    CHECK(msrc_image_plane(img.p, 3) == nullptr);

    msrc_encode_options opt;
    msrc_encode_options_init(&opt);
    opt.iterations = 6;

    BufPtr buf;
    StatsPtr stats;
    REQUIRE(msrc_encode(img.p, &opt, &buf.p, &buf.len, &stats.p) == MSRC_OK);
    CHECK(buf.len > 0);

    ImagePtr back;
    REQUIRE(msrc_decode(buf.p, buf.len, &back.p) == MSRC_OK);
    CHECK(msrc_image_equal(img.p, back.p) == 1);

    ImagePtr other;
    REQUIRE(msrc_image_generate(1, 20, 14, 3, 6, &other.p) == MSRC_OK);
    CHECK(msrc_image_equal(img.p, other.p) == 0);

    CHECK(msrc_stats_channels(stats.p) == 3);
    CHECK(msrc_stats_iterations(stats.p) == 6);
    CHECK(msrc_stats_total_bytes(stats.p) == buf.len);
    uint64_t sum = msrc_stats_header_bytes(stats.p) + msrc_stats_lossy_bytes(stats.p);
    for (uint32_t c = 0; c < 3; c++) {
        sum += msrc_stats_msb_bytes(stats.p, c) + msrc_stats_lsb_bytes(stats.p, c);
        uint64_t coded = 0;
        for (uint32_t t = 1; t <= 6; t++) coded += msrc_stats_coded(stats.p, c, t);
        CHECK(coded == 20 * 14);
        CHECK(msrc_stats_masked(stats.p, c, 6) == 0);
    }
    CHECK(sum == buf.len);

    // out-of-range stat queries degrade to zero, not UB
    CHECK(msrc_stats_coded(stats.p, 5, 1) == 0);
    CHECK(msrc_stats_coded(stats.p, 0, 7) == 0);
    CHECK(msrc_stats_coded(stats.p, 0, 0) == 0);
}

TEST_CASE("pnm bytes round trip through load and save") {
    ImagePtr img;
    REQUIRE(msrc_image_generate(3, 9, 4, 1, 0, &img.p) == MSRC_OK);

    BufPtr pnm;
    REQUIRE(msrc_image_save_pnm(img.p, &pnm.p, &pnm.len) == MSRC_OK);
    CHECK(pnm.len > 0);
    CHECK(pnm.p[0] == 'P');
    CHECK(pnm.p[1] == '5');

    ImagePtr back;
    REQUIRE(msrc_image_load_pnm(pnm.p, pnm.len, &back.p) == MSRC_OK);
    CHECK(msrc_image_equal(img.p, back.p) == 1);
}

TEST_CASE("inspection mirrors the options that built the container") {
    ImagePtr img;
    REQUIRE(msrc_image_generate(1, 10, 10, 1, 3, &img.p) == MSRC_OK);

    msrc_encode_options opt;
    msrc_encode_options_init(&opt);
    opt.scheduler = 2;
    opt.iterations = 5;
    opt.beta = 4.25;
    opt.seed = 777;

    BufPtr buf;
    REQUIRE(msrc_encode(img.p, &opt, &buf.p, &buf.len, nullptr) == MSRC_OK);

    msrc_container_info info;
    REQUIRE(msrc_inspect(buf.p, buf.len, &info) == MSRC_OK);
    CHECK(info.width == 10);
    CHECK(info.height == 10);
    CHECK(info.channels == 1);
    CHECK(info.backend == 0);
    CHECK(info.backend_param == 16);
    CHECK(info.scheduler == 2);
    CHECK(info.iterations == 5);
    CHECK(info.beta == 4.25);
    CHECK(info.seed == 777);
    CHECK(info.total_bytes == buf.len);
    CHECK(info.lsb_bytes[0] > 0);
}

TEST_CASE("typed failures cross the boundary unchanged") {
    ImagePtr img;
    REQUIRE(msrc_image_generate(0, 4, 4, 1, 0, &img.p) == MSRC_OK);

    msrc_encode_options opt;
    msrc_encode_options_init(&opt);
    BufPtr buf;

    opt.backend_param = 1;
    CHECK(msrc_encode(img.p, &opt, &buf.p, &buf.len, nullptr) ==
          MSRC_ERR_INVALID_BACKEND_PARAM);

    msrc_encode_options_init(&opt);
    opt.backend = 1;
    opt.backend_param = 9;
    CHECK(msrc_encode(img.p, &opt, &buf.p, &buf.len, nullptr) ==
          MSRC_ERR_INVALID_BACKEND_PARAM);

    msrc_encode_options_init(&opt);
    opt.iterations = 0;
    CHECK(msrc_encode(img.p, &opt, &buf.p, &buf.len, nullptr) ==
          MSRC_ERR_INVALID_ARGUMENT);

    msrc_encode_options_init(&opt);
    uint8_t junk[8] = {1, 2, 3};
    opt.params = junk;
    opt.params_len = sizeof junk;
    CHECK(msrc_encode(img.p, &opt, &buf.p, &buf.len, nullptr) ==
          MSRC_ERR_MALFORMED_PARAMS);

    ImagePtr none;
    uint8_t garbage[16] = {0};
    CHECK(msrc_decode(garbage, sizeof garbage, &none.p) == MSRC_ERR_BAD_MAGIC);

    const uint8_t p4[] = "P4\n2 2\n";
    CHECK(msrc_image_load_pnm(p4, sizeof p4 - 1, &none.p) == MSRC_ERR_MALFORMED_HEADER);
}

TEST_CASE("null arguments are rejected, never dereferenced") {
    msrc_encode_options opt;
    msrc_encode_options_init(&opt);
    uint8_t* data = nullptr;
    size_t len = 0;
    msrc_image* img = nullptr;
    msrc_container_info info;

    CHECK(msrc_encode(nullptr, &opt, &data, &len, nullptr) == MSRC_ERR_INVALID_ARGUMENT);
    CHECK(msrc_decode(nullptr, 10, &img) == MSRC_ERR_INVALID_ARGUMENT);
    CHECK(msrc_inspect(nullptr, 10, &info) == MSRC_ERR_INVALID_ARGUMENT);
    CHECK(msrc_image_generate(0, 4, 4, 1, 0, nullptr) == MSRC_ERR_INVALID_ARGUMENT);
    CHECK(msrc_image_generate(9, 4, 4, 1, 0, &img) == MSRC_ERR_INVALID_ARGUMENT);
    CHECK(msrc_image_width(nullptr) == 0);
    CHECK(msrc_image_plane(nullptr, 0) == nullptr);
    CHECK(msrc_stats_total_bytes(nullptr) == 0);
    CHECK(msrc_image_equal(nullptr, nullptr) == 0);
    msrc_image_free(nullptr);
    msrc_stats_free(nullptr);
    msrc_free(nullptr);
}

TEST_CASE("fitting over the C surface returns a usable parameter blob") {
    std::vector<ImagePtr> holders(6);
    std::vector<const msrc_image*> ptrs;
    for (int k = 0; k < 6; k++) {
        REQUIRE(msrc_image_generate(k % 3, 12, 12, 1, 50 + k, &holders[k].p) == MSRC_OK);
        ptrs.push_back(holders[k].p);
    }

    msrc_encode_options opt;
    msrc_encode_options_init(&opt);

    BufPtr blob;
    double initial = 0.0, final_loss = 0.0;
    REQUIRE(msrc_fit(ptrs.data(), ptrs.size(), &opt, 12, 3, &blob.p, &blob.len,
                     &initial, &final_loss) == MSRC_OK);
    CHECK(blob.len == 242);
    CHECK(final_loss <= initial + 1e-12);

    // the fitted blob must be accepted for encoding
    msrc_encode_options tuned = opt;
    tuned.params = blob.p;
    tuned.params_len = blob.len;
    BufPtr buf;
    REQUIRE(msrc_encode(ptrs[0], &tuned, &buf.p, &buf.len, nullptr) == MSRC_OK);
    ImagePtr back;
    REQUIRE(msrc_decode(buf.p, buf.len, &back.p) == MSRC_OK);
    CHECK(msrc_image_equal(ptrs[0], back.p) == 1);

    CHECK(msrc_fit(nullptr, 2, &opt, 5, 1, &blob.p, &blob.len, &initial, &final_loss) ==
          MSRC_ERR_INVALID_ARGUMENT);
    CHECK(msrc_fit(ptrs.data(), 0, &opt, 5, 1, &blob.p, &blob.len, &initial, &final_loss) ==
          MSRC_ERR_EMPTY_CORPUS);
}
