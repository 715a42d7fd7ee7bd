// Command-line front end; everything goes through the public C API.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msrc/msrc.h"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check(msrc_status st, const std::string& what) {
    if (st != MSRC_OK)
        throw std::runtime_error(what + ": " + msrc_status_name(st));
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const uint8_t* data, size_t len) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path);
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!out) throw std::runtime_error("write failed for " + path);
}

struct ImageHandle {
    msrc_image* p = nullptr;
    ~ImageHandle() { msrc_image_free(p); }
};

struct Buffer {
    uint8_t* p = nullptr;
    size_t len = 0;
    ~Buffer() { msrc_free(p); }
};

struct StatsHandle {
    msrc_stats* p = nullptr;
    ~StatsHandle() { msrc_stats_free(p); }
};

const std::map<std::string, int> kKinds = {
    {"constant", 0}, {"noise", 1}, {"gradient", 2}, {"checker", 3}};
const std::map<std::string, int> kSchedulers = {
    {"cosine", 0}, {"linear", 1}, {"square", 2}};
const std::map<std::string, int> kBackends = {{"quantize", 0}, {"down2x", 1}};

const char* scheduler_name(int s) {
    return s == 0 ? "cosine" : s == 1 ? "linear" : "square";
}

struct EncodeFlags {
    std::string lossy = "quantize";
    uint32_t q = 16;
    std::string scheduler = "cosine";
    uint32_t T = 12;
    double beta = 10.5;
    uint64_t seed = 42;
    std::string params_path;
};

void add_encode_flags(CLI::App* cmd, EncodeFlags& f) {
    cmd->add_option("--lossy", f.lossy, "lossy backend")
        ->check(CLI::IsMember({"quantize", "down2x"}))
        ->capture_default_str();
    cmd->add_option("--q", f.q, "quantizer step for --lossy quantize")
        ->check(CLI::Range(2u, 128u))
        ->capture_default_str();
    cmd->add_option("--scheduler", f.scheduler, "mask schedule")
        ->check(CLI::IsMember({"cosine", "linear", "square"}))
        ->capture_default_str();
    cmd->add_option("--T", f.T, "masked-sampling iterations")
        ->check(CLI::Range(1u, 64u))
        ->capture_default_str();
    cmd->add_option("--beta", f.beta, "score noise weight")->capture_default_str();
    cmd->add_option("--seed", f.seed, "sampling seed")->capture_default_str();
    cmd->add_option("--params", f.params_path, "estimator parameter file");
}

msrc_encode_options make_options(const EncodeFlags& f, std::vector<uint8_t>& blob) {
    msrc_encode_options opt;
    msrc_encode_options_init(&opt);
    opt.backend = static_cast<uint8_t>(kBackends.at(f.lossy));
    opt.backend_param = opt.backend == 0 ? static_cast<uint8_t>(f.q) : 0;
    opt.scheduler = static_cast<uint8_t>(kSchedulers.at(f.scheduler));
    opt.iterations = static_cast<uint8_t>(f.T);
    opt.beta = f.beta;
    opt.seed = f.seed;
    if (!f.params_path.empty()) {
        blob = read_file(f.params_path);
        opt.params = blob.data();
        opt.params_len = blob.size();
    }
    return opt;
}

void load_pnm(const std::string& path, ImageHandle& img) {
    std::vector<uint8_t> bytes = read_file(path);
    check(msrc_image_load_pnm(bytes.data(), bytes.size(), &img.p), path);
}

void print_stats(const msrc_stats* st, uint64_t pixels) {
    uint32_t nch = msrc_stats_channels(st);
    uint32_t T = msrc_stats_iterations(st);
    std::printf("header_bytes: %llu\n",
                static_cast<unsigned long long>(msrc_stats_header_bytes(st)));
    std::printf("lossy_bytes: %llu\n",
                static_cast<unsigned long long>(msrc_stats_lossy_bytes(st)));
    std::printf("total_bytes: %llu\n",
                static_cast<unsigned long long>(msrc_stats_total_bytes(st)));
    std::printf("total_bpp: %.4f\n",
                8.0 * static_cast<double>(msrc_stats_total_bytes(st)) /
                    static_cast<double>(pixels));
    for (uint32_t c = 0; c < nch; c++) {
        std::printf("channel %u: r_min=%d flag=%d msb_bytes=%llu lsb_bytes=%llu\n", c,
                    msrc_stats_r_min(st, c), msrc_stats_flag(st, c),
                    static_cast<unsigned long long>(msrc_stats_msb_bytes(st, c)),
                    static_cast<unsigned long long>(msrc_stats_lsb_bytes(st, c)));
        for (uint32_t t = 1; t <= T; t++) {
            std::printf("  iter %2u: masked=%llu coded=%llu bytes=%llu\n", t,
                        static_cast<unsigned long long>(msrc_stats_masked(st, c, t)),
                        static_cast<unsigned long long>(msrc_stats_coded(st, c, t)),
                        static_cast<unsigned long long>(msrc_stats_bytes(st, c, t)));
        }
    }
}

int cmd_generate(const std::string& kind, uint32_t w, uint32_t h, uint32_t nch,
                 uint64_t seed, const std::string& out_path) {
    ImageHandle img;
    check(msrc_image_generate(kKinds.at(kind), w, h, nch, seed, &img.p), "generate");
    Buffer buf;
    check(msrc_image_save_pnm(img.p, &buf.p, &buf.len), "serialize");
    write_file(out_path, buf.p, buf.len);
    return 0;
}

int cmd_encode(const std::string& in_path, const std::string& out_path,
               const EncodeFlags& flags, bool show_stats) {
    ImageHandle img;
    load_pnm(in_path, img);
    std::vector<uint8_t> blob;
    msrc_encode_options opt = make_options(flags, blob);
    Buffer out;
    StatsHandle stats;
    check(msrc_encode(img.p, &opt, &out.p, &out.len, show_stats ? &stats.p : nullptr),
          "encode");
    write_file(out_path, out.p, out.len);
    if (show_stats) {
        uint64_t pixels = static_cast<uint64_t>(msrc_image_width(img.p)) *
                          msrc_image_height(img.p);
        print_stats(stats.p, pixels);
    }
    return 0;
}

int cmd_decode(const std::string& in_path, const std::string& out_path) {
    std::vector<uint8_t> bytes = read_file(in_path);
    ImageHandle img;
    check(msrc_decode(bytes.data(), bytes.size(), &img.p), "decode");
    Buffer buf;
    check(msrc_image_save_pnm(img.p, &buf.p, &buf.len), "serialize");
    write_file(out_path, buf.p, buf.len);
    return 0;
}

int cmd_inspect(const std::string& in_path) {
    std::vector<uint8_t> bytes = read_file(in_path);
    msrc_container_info info;
    check(msrc_inspect(bytes.data(), bytes.size(), &info), "inspect");
    std::printf("width: %u\nheight: %u\nchannels: %u\n", info.width, info.height,
                info.channels);
    std::printf("backend: %s\n", info.backend == 0 ? "quantize" : "down2x");
    if (info.backend == 0) std::printf("q: %u\n", info.backend_param);
    std::printf("scheduler: %s\nT: %u\nbeta: %g\nseed: %llu\n",
                scheduler_name(info.scheduler), info.iterations, info.beta,
                static_cast<unsigned long long>(info.seed));
    std::printf("pmf_digest: %016llx\n",
                static_cast<unsigned long long>(info.pmf_digest));
    std::printf("header_bytes: %llu\nlossy_bytes: %llu\ntotal_bytes: %llu\n",
                static_cast<unsigned long long>(info.header_bytes),
                static_cast<unsigned long long>(info.lossy_bytes),
                static_cast<unsigned long long>(info.total_bytes));
    for (uint32_t c = 0; c < info.channels; c++) {
        std::printf("channel %u: r_min=%d flag=%u msb_bytes=%llu lsb_bytes=%llu\n", c,
                    info.r_min[c], info.flag[c],
                    static_cast<unsigned long long>(info.msb_bytes[c]),
                    static_cast<unsigned long long>(info.lsb_bytes[c]));
    }
    return 0;
}

int cmd_fit(const std::vector<std::string>& image_paths, const std::string& out_path,
            uint32_t steps, uint64_t seed, const EncodeFlags& flags) {
    std::vector<std::unique_ptr<ImageHandle>> imgs;
    std::vector<const msrc_image*> ptrs;
    for (const auto& path : image_paths) {
        auto h = std::make_unique<ImageHandle>();
        load_pnm(path, *h);
        ptrs.push_back(h->p);
        imgs.push_back(std::move(h));
    }
    std::vector<uint8_t> blob;
    msrc_encode_options opt = make_options(flags, blob);
    Buffer params;
    double initial = 0.0, final_loss = 0.0;
    check(msrc_fit(ptrs.data(), ptrs.size(), &opt, steps, seed, &params.p,
                   &params.len, &initial, &final_loss),
          "fit");
    write_file(out_path, params.p, params.len);
    std::printf("initial_loss: %.6f\nfinal_loss: %.6f\n", initial, final_loss);
    return 0;
}

struct BenchImage {
    std::string id;
    ImageHandle img;
};

int cmd_bench(const std::vector<std::string>& image_paths,
              const std::vector<std::string>& schedulers,
              const std::vector<uint32_t>& t_values, const EncodeFlags& base,
              const std::string& out_path) {
    std::vector<std::unique_ptr<BenchImage>> images;
    if (image_paths.empty()) {
        for (const auto& [kind, code] : kKinds) {
            auto bi = std::make_unique<BenchImage>();
            bi->id = "synth:" + kind + ":64x64";
            check(msrc_image_generate(code, 64, 64, 1, 7, &bi->img.p), bi->id);
            images.push_back(std::move(bi));
        }
    } else {
        for (const auto& path : image_paths) {
            auto bi = std::make_unique<BenchImage>();
            size_t slash = path.find_last_of('/');
            bi->id = slash == std::string::npos ? path : path.substr(slash + 1);
            load_pnm(path, bi->img);
            images.push_back(std::move(bi));
        }
    }

    std::ofstream csv(out_path);
    if (!csv) throw std::runtime_error("cannot create " + out_path);
    csv << "image_id,scheduler,T,beta,backend,total_bpp,lossy_bpp,flag_msb_bpp,"
           "lsb_bpp,per_iter_scaled_bpsp,encode_ms,decode_ms\n";

    for (const auto& bi : images) {
        uint64_t pixels = static_cast<uint64_t>(msrc_image_width(bi->img.p)) *
                          msrc_image_height(bi->img.p);
        for (const auto& sched : schedulers) {
            for (uint32_t T : t_values) {
                EncodeFlags flags = base;
                flags.scheduler = sched;
                flags.T = T;
                std::string cell = bi->id + "/" + sched + "/T=" + std::to_string(T);

                std::vector<uint8_t> blob;
                msrc_encode_options opt = make_options(flags, blob);
                Buffer out;
                StatsHandle stats;
                auto t0 = Clock::now();
                check(msrc_encode(bi->img.p, &opt, &out.p, &out.len, &stats.p), cell);
                double enc_ms = ms_since(t0);

                t0 = Clock::now();
                ImageHandle round;
                check(msrc_decode(out.p, out.len, &round.p), cell);
                double dec_ms = ms_since(t0);
                if (!msrc_image_equal(bi->img.p, round.p))
                    throw std::runtime_error(cell + ": round trip mismatch");

                uint32_t nch = msrc_stats_channels(stats.p);
                uint64_t msb = 0, lsb = 0;
                for (uint32_t c = 0; c < nch; c++) {
                    msb += msrc_stats_msb_bytes(stats.p, c);
                    lsb += msrc_stats_lsb_bytes(stats.p, c);
                }
                uint64_t header = msrc_stats_header_bytes(stats.p);
                uint64_t lossy = msrc_stats_lossy_bytes(stats.p);
                uint64_t total = msrc_stats_total_bytes(stats.p);
                if (header + lossy + msb + lsb != total)
                    throw std::runtime_error(cell + ": size accounting mismatch");

                auto bpp = [&](uint64_t bytes) {
                    return 8.0 * static_cast<double>(bytes) /
                           static_cast<double>(pixels);
                };
                csv << bi->id << ',' << sched << ',' << T << ',' << flags.beta << ','
                    << flags.lossy << ',';
                char num[64];
                std::snprintf(num, sizeof num, "%.6f,%.6f,%.6f,%.6f,", bpp(total),
                              bpp(lossy), bpp(msb), bpp(lsb));
                csv << num;
                for (uint32_t t = 1; t <= T; t++) {
                    uint64_t coded = 0, bytes = 0;
                    for (uint32_t c = 0; c < nch; c++) {
                        coded += msrc_stats_coded(stats.p, c, t);
                        bytes += msrc_stats_bytes(stats.p, c, t);
                    }
                    double bpsp = coded ? 8.0 * static_cast<double>(bytes) /
                                              static_cast<double>(coded)
                                        : 0.0;
                    std::snprintf(num, sizeof num, "%s%.4f", t > 1 ? ";" : "", bpsp);
                    csv << num;
                }
                std::snprintf(num, sizeof num, ",%.2f,%.2f\n", enc_ms, dec_ms);
                csv << num;
            }
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"masked-sampling residual image codec"};
    app.require_subcommand(1);

    // generate
    std::string g_kind = "noise", g_out;
    uint32_t g_w = 64, g_h = 64, g_ch = 1;
    uint64_t g_seed = 7;
    auto* gen = app.add_subcommand("generate", "write a synthetic test image");
    gen->add_option("--kind", g_kind)->check(CLI::IsMember(
        {"constant", "noise", "gradient", "checker"}))->capture_default_str();
    gen->add_option("--width", g_w)->capture_default_str();
    gen->add_option("--height", g_h)->capture_default_str();
    gen->add_option("--channels", g_ch)->check(CLI::IsMember({1u, 3u}))
        ->capture_default_str();
    gen->add_option("--seed", g_seed)->capture_default_str();
    gen->add_option("output", g_out, "output .pgm/.ppm path")->required();

    // encode
    std::string e_in, e_out;
    EncodeFlags e_flags;
    bool e_stats = false;
    auto* enc = app.add_subcommand("encode", "compress a PGM/PPM image");
    enc->add_option("input", e_in)->required();
    enc->add_option("output", e_out)->required();
    add_encode_flags(enc, e_flags);
    enc->add_flag("--stats", e_stats, "print per-iteration accounting");

    // decode
    std::string d_in, d_out;
    auto* dec = app.add_subcommand("decode", "reconstruct an image");
    dec->add_option("input", d_in)->required();
    dec->add_option("output", d_out)->required();

    // inspect
    std::string i_in;
    auto* ins = app.add_subcommand("inspect", "print container header fields");
    ins->add_option("input", i_in)->required();

    // fit
    std::vector<std::string> f_images;
    std::string f_out = "params.bin";
    uint32_t f_steps = 200;
    uint64_t f_seed = 7;
    EncodeFlags f_flags;
    auto* fit = app.add_subcommand("fit", "tune estimator parameters on a corpus");
    fit->add_option("images", f_images)->required();
    fit->add_option("--out", f_out)->capture_default_str();
    fit->add_option("--steps", f_steps)->capture_default_str();
    fit->add_option("--seed", f_seed)->capture_default_str();
    fit->add_option("--lossy", f_flags.lossy)
        ->check(CLI::IsMember({"quantize", "down2x"}))->capture_default_str();
    fit->add_option("--q", f_flags.q)->check(CLI::Range(2u, 128u))
        ->capture_default_str();

    // bench
    std::vector<std::string> b_images, b_schedulers = {"cosine"};
    std::vector<uint32_t> b_T = {12};
    std::string b_out = "bench.csv";
    EncodeFlags b_flags;
    auto* ben = app.add_subcommand("bench", "sweep schedules and write a CSV");
    ben->add_option("images", b_images, "input images (synthetic set if omitted)");
    ben->add_option("--schedulers", b_schedulers)->delimiter(',')
        ->check(CLI::IsMember({"cosine", "linear", "square"}))
        ->capture_default_str();
    ben->add_option("--T", b_T)->delimiter(',')->check(CLI::Range(1u, 64u))
        ->capture_default_str();
    ben->add_option("--beta", b_flags.beta)->capture_default_str();
    ben->add_option("--lossy", b_flags.lossy)
        ->check(CLI::IsMember({"quantize", "down2x"}))->capture_default_str();
    ben->add_option("--q", b_flags.q)->check(CLI::Range(2u, 128u))
        ->capture_default_str();
    ben->add_option("--seed", b_flags.seed)->capture_default_str();
    ben->add_option("--out", b_out)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(g_kind, g_w, g_h, g_ch, g_seed, g_out);
        if (enc->parsed()) return cmd_encode(e_in, e_out, e_flags, e_stats);
        if (dec->parsed()) return cmd_decode(d_in, d_out);
        if (ins->parsed()) return cmd_inspect(i_in);
        if (fit->parsed()) return cmd_fit(f_images, f_out, f_steps, f_seed, f_flags);
        if (ben->parsed())
            return cmd_bench(b_images, b_schedulers, b_T, b_flags, b_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
