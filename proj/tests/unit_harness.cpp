// End-to-end harness tests: fading law, rate bookkeeping, the optical link
// wrapper, probing/loading on flat and dispersed channels, BER points, and
// the sweep driver with its file outputs.
//
// The full-link cases each push a handful of 258k-sample frames through the
// optics, so probe results are cached in function-local statics and shared
// across test cases to keep the suite quick.

#include "doctest.h"

#include "dmt/errors.hpp"
#include "dmt/harness.hpp"
#include "dmt/modem.hpp"
#include "dmt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace dmt;
namespace fsys = std::filesystem;

namespace {

constexpr double kC = 299792458.0;

// first fading null sqrt(c / (2 lambda^2 D L)); higher nulls scale by
// sqrt(3), sqrt(5), ...
double first_null_hz(const LinkConfig& link) {
    const double lambda = link.wavelength();
    return std::sqrt(kC / (2.0 * lambda * lambda * link.dispersion * link.fiber_len));
}

ExperimentConfig base_config() {
    ExperimentConfig cfg;
    cfg.rate_gbps = 56;
    cfg.osnr_points = {std::nullopt}; // noise off -> probe is noise off too
    return cfg;
}

ExperimentConfig b2b_config() {
    ExperimentConfig cfg = base_config();
    cfg.link.fiber_len = 0.0;
    return cfg;
}

// probes are the slow part; compute each flavour once
const ProbeResult& b2b_probe() {
    static const ProbeResult probe = probe_and_load(b2b_config());
    return probe;
}

const ProbeResult& dispersed_probe() {
    static const ProbeResult probe = probe_and_load(base_config());
    return probe;
}

std::vector<uint8_t> test_bits(Rng& rng, size_t count) {
    std::vector<uint8_t> out(count);
    for (auto& b : out) b = static_cast<uint8_t>(rng.bits(1));
    return out;
}

std::string slurp(const fsys::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream ss(text);
    for (std::string line; std::getline(ss, line);) lines.push_back(line);
    return lines;
}

int count_data_rows(const std::vector<std::string>& lines) {
    int n = 0;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i][0] == '#') continue;
        if (n == 0 && !std::isdigit(static_cast<unsigned char>(lines[i][0])) &&
            lines[i].rfind("off", 0) != 0)
            continue; // header
        ++n;
    }
    return n;
}

fsys::path temp_dir(const char* leaf) {
    const fsys::path dir = fsys::temp_directory_path() / "dmt_harness_tests" / leaf;
    fsys::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("analytic fading follows the dispersion cosine") {
    LinkConfig link; // 50.5 km defaults

    SUBCASE("dc and zero-length fiber see no fading") {
        CHECK(analytic_fading(0.0, link) == 1.0);
        LinkConfig b2b = link;
        b2b.fiber_len = 0.0;
        for (double f : {1e9, 5e9, 20e9, 32e9}) CHECK(analytic_fading(f, b2b) == 1.0);
    }

    SUBCASE("null positions at 50.5 km") {
        const double f1 = first_null_hz(link);
        // frozen from the closed form evaluated at the default 192.5 THz
        CHECK(f1 == doctest::Approx(8.4847e9).epsilon(1e-3));
        CHECK(analytic_fading(f1, link) < 1e-6);
        // nulls at sqrt(1), sqrt(3), sqrt(5) spacing
        const double f2 = f1 * std::sqrt(3.0);
        CHECK(f2 == doctest::Approx(14.6959e9).epsilon(1e-3));
        CHECK(analytic_fading(f2, link) < 1e-6);
        // between nulls the response recovers
        CHECK(analytic_fading(f1 * std::sqrt(2.0), link) == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("longer fiber pulls the first null down") {
        LinkConfig longer = link;
        longer.fiber_len = 82.1e3;
        const double f1 = first_null_hz(longer);
        CHECK(f1 == doctest::Approx(6.6544e9).epsilon(1e-3));
        CHECK(analytic_fading(f1, longer) < 1e-6);
        CHECK(f1 < first_null_hz(link));
    }

    SUBCASE("magnitude stays in [0, 1]") {
        for (int i = 0; i <= 320; ++i) {
            const double m = analytic_fading(i * 1e8, link);
            CHECK(m >= 0.0);
            CHECK(m <= 1.0);
        }
    }
}

TEST_CASE("rate bookkeeping: carrier frequencies, bit targets, frame placement") {
    ExperimentConfig cfg = base_config();

    // carrier spacing = dac_rate / fft_size = 31.25 MHz
    CHECK(carrier_freq_hz(1, cfg.dmt) == doctest::Approx(31.25e6).epsilon(1e-12));
    CHECK(carrier_freq_hz(852, cfg.dmt) == doctest::Approx(26.625e9).epsilon(1e-12));

    // rate * symbol_len / dac_rate: 56 Gb/s over 2080-sample symbols at 64 GS/s
    CHECK(target_bits_per_symbol(cfg) == 1820);
    cfg.rate_gbps = 112;
    CHECK(target_bits_per_symbol(cfg) == 3640);
    cfg.rate_gbps = 200;
    CHECK(target_bits_per_symbol(cfg) == 6500);

    // frame centered in the next power-of-two buffer with 4096 slack
    CHECK(link_frame_offset(257920) == 2112);
    CHECK(link_frame_offset(257920) * 2 + 257920 == 262144);
}

TEST_CASE("run_link geometry and determinism") {
    ExperimentConfig cfg = b2b_config();
    const LoadingTable flat = uniform_loading(cfg.dmt.n_modulated, 2);
    Rng bitrng(0x717);
    const auto bits =
        test_bits(bitrng, static_cast<size_t>(cfg.dmt.n_payload()) * flat.sum_bits());
    const DmtFrame frame = build_frame(bits, flat, cfg.dmt);
    REQUIRE(frame.waveform.size() == 257920);

    SUBCASE("output is a full power-of-two capture at the dac rate") {
        const ElectricalWaveform rx = run_link(frame.waveform, cfg, std::nullopt, 7);
        CHECK(rx.samples.size() == 262144);
        CHECK(rx.rate == doctest::Approx(cfg.dmt.dac_rate));
    }

    SUBCASE("same noise seed reproduces the capture bitwise") {
        const ElectricalWaveform a = run_link(frame.waveform, cfg, 30.0, 99);
        const ElectricalWaveform b = run_link(frame.waveform, cfg, 30.0, 99);
        const ElectricalWaveform c = run_link(frame.waveform, cfg, 30.0, 100);
        REQUIRE(a.samples.size() == b.samples.size());
        bool same = true, differs = false;
        for (size_t i = 0; i < a.samples.size(); ++i) {
            same = same && a.samples[i] == b.samples[i];
            differs = differs || a.samples[i] != c.samples[i];
        }
        CHECK(same);
        CHECK(differs);
    }
}

TEST_CASE("probe_and_load on a flat back-to-back channel") {
    const ProbeResult& probe = b2b_probe();
    const LoadingTable& t = probe.table;

    REQUIRE(t.bits.size() == 852);
    REQUIRE(t.power.size() == 852);
    CHECK(t.target_bits == 1820);
    CHECK(t.sum_bits() == 1820);

    // without dispersion the channel is nearly flat, so the greedy fill must
    // stay within one bit of uniform (1820/852 = 2.14 bits/carrier)
    CHECK(t.max_bits() <= 4);
    CHECK(*std::min_element(t.bits.begin(), t.bits.end()) >= 1);

    // powers renormalized over loaded carriers
    double psum = 0.0;
    for (size_t k = 0; k < t.power.size(); ++k) {
        psum += t.power[k];
        if (t.bits[k] > 0) CHECK(t.power[k] > 0.0);
    }
    CHECK(psum == doctest::Approx(static_cast<double>(t.n_loaded())).epsilon(1e-9));

    // SNR profile: one entry per modulated carrier, all positive, and no
    // fading notches -- the spread across the band stays bounded
    REQUIRE(probe.profile.snr.size() == 852);
    double lo = 1e300, hi = 0.0;
    for (double s : probe.profile.snr) {
        CHECK(s > 0.0);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(10.0 * std::log10(hi / lo) < 15.0);
}

TEST_CASE("probe_and_load over dispersed fiber shapes the allocation") {
    const ProbeResult& probe = dispersed_probe();
    const LoadingTable& t = probe.table;

    CHECK(t.sum_bits() == 1820);
    // the faded band frees energy for the strong low carriers
    CHECK(t.max_bits() == 7);

    // carriers at the first fading null (8.48 GHz = carrier ~271) go dark
    const double f1 = first_null_hz(base_config().link);
    const int k_null = static_cast<int>(std::lround(f1 / carrier_freq_hz(1, base_config().dmt)));
    CHECK(k_null == 272);
    bool any_dark = false;
    for (int k = k_null - 12; k <= k_null + 12; ++k) any_dark = any_dark || t.bits[k - 1] == 0;
    CHECK(any_dark);

    // SNR collapses at the null relative to the low band
    CHECK(probe.profile.snr[k_null - 1] * 10.0 < probe.profile.snr[99]);

    // low band carries more than the band straddling the null
    double low = 0.0, notch = 0.0;
    for (int k = 1; k <= 100; ++k) low += t.bits[k - 1];
    for (int k = k_null - 50; k < k_null + 50; ++k) notch += t.bits[k - 1];
    CHECK(low / 100.0 > notch / 100.0);
}

TEST_CASE("infeasible line rate is rejected with the achievable maximum") {
    ExperimentConfig cfg = base_config();
    cfg.rate_gbps = 200; // 6500 bits/symbol > 7 * 852
    CHECK_THROWS_AS(probe_and_load(cfg), infeasible_rate_error);
    try {
        probe_and_load(cfg);
    } catch (const infeasible_rate_error& e) {
        CHECK(e.max_achievable == 5964);
    }
}

TEST_CASE("run_point: noise off is error free and fully counted") {
    ExperimentConfig cfg = b2b_config();
    const BerPoint pt = run_point(cfg, b2b_probe().table, std::nullopt, 0);
    CHECK_FALSE(pt.osnr_db.has_value());
    CHECK(pt.bits == 2LL * 119 * 1820); // n_frames * payload symbols * bits/symbol
    CHECK(pt.errors == 0);
    CHECK(pt.ber == 0.0);
    CHECK(pt.hd_pass);
    CHECK(pt.sd_pass);
    CHECK(pt.reliable);
    CHECK_FALSE(pt.low_confidence);
}

TEST_CASE("run_point: BER does not increase with OSNR") {
    ExperimentConfig cfg = b2b_config();
    const BerPoint noisy = run_point(cfg, b2b_probe().table, 25.0, 0);
    const BerPoint clean = run_point(cfg, b2b_probe().table, 31.0, 1);
    CHECK(noisy.ber >= clean.ber);
    CHECK(noisy.errors > 0); // 25 dB back-to-back sits below the FEC cliff
}

TEST_CASE("osnr_sweep: report contents and rendered files") {
    ExperimentConfig cfg = b2b_config();
    cfg.osnr_points = {std::nullopt, 29.0};
    const fsys::path dir_a = temp_dir("sweep_a");
    cfg.output_path = dir_a.string();

    const BerReport report = osnr_sweep(cfg);
    REQUIRE(report.points.size() == 2);
    CHECK_FALSE(report.points[0].osnr_db.has_value());
    CHECK(report.points[0].ber == 0.0);
    CHECK(report.points[1].osnr_db == doctest::Approx(29.0));
    CHECK(report.loading.sum_bits() == 1820);
    CHECK(report.fingerprint.size() == 16);
    CHECK(report.fingerprint.find_first_not_of("0123456789abcdef") == std::string::npos);

    for (const char* name :
         {"sweep.csv", "loading.csv", "snr.csv", "sweep.dat", "loading.dat", "snr.dat"})
        CHECK(fsys::exists(dir_a / name));

    SUBCASE("sweep.csv: fingerprint comment, schema header, one row per point") {
        const auto lines = split_lines(slurp(dir_a / "sweep.csv"));
        REQUIRE(lines.size() >= 4);
        CHECK(lines[0] == "# config " + report.fingerprint);
        CHECK(lines[1] == "osnr_db,ber,errors,bits,hd_pass,sd_pass");
        CHECK(count_data_rows(lines) == 2);
        CHECK(lines[2].rfind("off,0.000000e+00,0,433160,1,1", 0) == 0);
        CHECK(lines[3].rfind("29,", 0) == 0); // %g renders the OSNR value bare
    }

    SUBCASE("loading.csv and snr.csv carry one row per modulated carrier") {
        const auto loading = split_lines(slurp(dir_a / "loading.csv"));
        CHECK(loading[1] == "# B=1820 gap_db=3.700486");
        CHECK(loading[2] == "carrier,bits,power");
        CHECK(count_data_rows(loading) == 852);

        const auto snr = split_lines(slurp(dir_a / "snr.csv"));
        CHECK(snr[1] == "carrier,freq_hz,snr_db");
        CHECK(count_data_rows(snr) == 852);
        // first data row: carrier 1 at 31.25 MHz
        CHECK(snr[2].rfind("1,31250000,", 0) == 0);
    }

    SUBCASE("a second run into a fresh directory is byte-identical") {
        ExperimentConfig cfg_b = cfg;
        const fsys::path dir_b = temp_dir("sweep_b");
        cfg_b.output_path = dir_b.string();
        const BerReport again = osnr_sweep(cfg_b);
        CHECK(again.fingerprint == report.fingerprint); // output path excluded
        for (const char* name : {"sweep.csv", "loading.csv", "snr.csv"})
            CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }

    SUBCASE("empty point list is a configuration error") {
        ExperimentConfig bad = cfg;
        bad.osnr_points.clear();
        CHECK_THROWS_AS(osnr_sweep(bad), config_error);
    }
}

TEST_CASE("config fingerprint tracks the physics, not the output path") {
    ExperimentConfig a = b2b_config();
    ExperimentConfig b = a;
    b.output_path = "somewhere/else";
    CHECK(config_fingerprint(a) == config_fingerprint(b));

    ExperimentConfig c = a;
    c.seed = a.seed + 1;
    CHECK(config_fingerprint(c) != config_fingerprint(a));

    ExperimentConfig d = a;
    d.link.fiber_len = 10e3;
    CHECK(config_fingerprint(d) != config_fingerprint(a));
}
