#include "dmt/harness.hpp"

#include "dmt/errors.hpp"
#include "dmt/modem.hpp"
#include "dmt/qam.hpp"
#include "dmt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace dmt {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kPi = 3.14159265358979323846;

// stream tags for derived seeds
constexpr uint64_t kTagProbe = 0x700be;
constexpr uint64_t kTagPayload = 0xda7a;
constexpr uint64_t kTagNoise = 0xa5e0;

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<uint8_t> random_bits(Rng& rng, size_t count) {
    std::vector<uint8_t> bits(count);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bits(1));
    return bits;
}

// TX payload constellation points per symbol, rebuilt from the bit stream
std::vector<cvec> payload_reference(const std::vector<uint8_t>& bits, const LoadingTable& table,
                                    const DmtConfig& cfg) {
    std::vector<cvec> rows(cfg.n_payload(), cvec(cfg.n_modulated, {0.0, 0.0}));
    size_t cursor = 0;
    for (auto& row : rows)
        for (int k = 0; k < cfg.n_modulated; ++k) {
            const int m = table.bits[k];
            if (m == 0) continue;
            row[k] = map_bits(&bits[cursor], m);
            cursor += m;
        }
    return rows;
}

std::string osnr_str(const std::optional<double>& v) {
    if (!v) return "off";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *v);
    return buf;
}

} // namespace

double analytic_fading(double f_hz, const LinkConfig& cfg) {
    const double lambda = cfg.wavelength();
    const double arg = kPi * lambda * lambda * cfg.dispersion * cfg.fiber_len * f_hz * f_hz /
                       kSpeedOfLight;
    return std::abs(std::cos(arg));
}

long long target_bits_per_symbol(const ExperimentConfig& cfg) {
    return std::llround(cfg.rate_gbps * 1e9 * cfg.dmt.symbol_len() / cfg.dmt.dac_rate);
}

double carrier_freq_hz(int k, const DmtConfig& cfg) {
    return static_cast<double>(k) * cfg.dac_rate / static_cast<double>(cfg.fft_size);
}

int link_frame_offset(size_t frame_len) {
    return static_cast<int>((next_pow2(frame_len + 4096) - frame_len) / 2);
}

ElectricalWaveform run_link(const std::vector<double>& frame_wave, const ExperimentConfig& cfg,
                            std::optional<double> osnr_db, uint64_t noise_seed) {
    // center the frame in a power-of-two buffer: the 2x oversample and the
    // dac->adc->dac hops then all land on integer sample counts
    const size_t buf_len = next_pow2(frame_wave.size() + 4096);
    const size_t prepad = static_cast<size_t>(link_frame_offset(frame_wave.size()));
    ElectricalWaveform tx;
    tx.rate = cfg.dmt.dac_rate;
    tx.samples.assign(buf_len, 0.0);
    std::copy(frame_wave.begin(), frame_wave.end(), tx.samples.begin() + prepad);

    // oversample before the square-law detector (|E|^2 doubles the bandwidth)
    ElectricalWaveform drive = resample(tx, 2.0 * cfg.dmt.dac_rate);
    double p = 0.0;
    for (double v : drive.samples) p += v * v;
    const double rms = std::sqrt(p / static_cast<double>(drive.samples.size()));
    if (rms > 0.0)
        for (auto& v : drive.samples) v /= rms;

    OpticalField field = mzm_modulate(drive, cfg.link);
    field = propagate_dispersion(field, cfg.link);
    if (osnr_db) field = load_ase(field, *osnr_db, cfg.link, noise_seed);
    ElectricalWaveform rx = photodetect(field, cfg.link);
    rx = resample(rx, cfg.dmt.adc_rate);
    rx = resample(rx, cfg.dmt.dac_rate);
    return rx;
}

ProbeResult probe_and_load(const ExperimentConfig& cfg) {
    cfg.validate();
    const long long target = target_bits_per_symbol(cfg);
    const long long hard_max = 7LL * cfg.dmt.n_modulated;
    if (target > hard_max)
        throw infeasible_rate_error("probe_and_load: " + std::to_string(target) +
                                        " bits/symbol exceeds " + std::to_string(hard_max),
                                    hard_max);

    // probe at the best condition the experiment will see: noise off when the
    // point list is empty or contains an "off" point, otherwise the highest
    // OSNR of the sweep. Probing under the operating noise keeps the loader
    // from over-trusting carriers whose noise-off floor flatters them.
    std::optional<double> probe_osnr;
    for (const auto& p : cfg.osnr_points) {
        if (!p) {
            probe_osnr.reset();
            break;
        }
        if (!probe_osnr || *p > *probe_osnr) probe_osnr = *p;
    }

    const LoadingTable probe = uniform_loading(cfg.dmt.n_modulated, 4);
    std::vector<std::vector<std::complex<double>>> eq_rows, known_rows;
    for (int i = 0; i < cfg.n_probe_frames; ++i) {
        Rng rng(derive_seed(cfg.seed, {kTagProbe, static_cast<uint64_t>(i)}));
        const auto bits =
            random_bits(rng, static_cast<size_t>(cfg.dmt.n_payload()) * probe.sum_bits());
        const DmtFrame frame = build_frame(bits, probe, cfg.dmt);
        // the probe is data-aided, so coarse timing comes from the known frame
        // placement instead of blind search -- but the fine stage and CP
        // backoff must be the very rule the payload receiver applies, or the
        // measured SNR would not describe the windows the payload sees.
        const ElectricalWaveform rx =
            run_link(frame.waveform, cfg, probe_osnr,
                     derive_seed(cfg.seed, {kTagProbe, static_cast<uint64_t>(i), 1}));
        const int fine = refine_frame_start(rx.samples, link_frame_offset(frame.waveform.size()),
                                            cfg.dmt);
        const DemodResult demod =
            demodulate_frame(rx.samples, probe, cfg.dmt, std::max(0, fine - cfg.dmt.cp_len / 2));
        const auto known = payload_reference(bits, probe, cfg.dmt);
        eq_rows.insert(eq_rows.end(), demod.equalized.begin(), demod.equalized.end());
        known_rows.insert(known_rows.end(), known.begin(), known.end());
    }

    ProbeResult out;
    out.profile = estimate_snr_profile(eq_rows, known_rows);
    out.table = bit_load(out.profile, target, gap_from_ber(kHdFecBer, 4));
    power_load(out.table, out.profile);
    return out;
}

BerPoint run_point(const ExperimentConfig& cfg, const LoadingTable& loading,
                   std::optional<double> osnr_db, int point_index) {
    BerPoint pt;
    pt.osnr_db = osnr_db;
    const long long bits_per_frame =
        static_cast<long long>(cfg.dmt.n_payload()) * loading.sum_bits();
    int sync_failures = 0;
    for (int f = 0; f < cfg.n_frames; ++f) {
        Rng rng(derive_seed(cfg.seed, {kTagPayload, static_cast<uint64_t>(point_index),
                                       static_cast<uint64_t>(f)}));
        const auto tx_bits = random_bits(rng, static_cast<size_t>(bits_per_frame));
        const DmtFrame frame = build_frame(tx_bits, loading, cfg.dmt);
        const uint64_t nseed = derive_seed(cfg.seed, {kTagNoise, static_cast<uint64_t>(point_index),
                                                      static_cast<uint64_t>(f)});
        const ElectricalWaveform rx = run_link(frame.waveform, cfg, osnr_db, nseed);
        try {
            const DemodResult demod = demodulate_frame(rx.samples, loading, cfg.dmt);
            for (size_t i = 0; i < tx_bits.size(); ++i)
                pt.errors += demod.bits[i] != tx_bits[i];
            pt.bits += bits_per_frame;
        } catch (const sync_error&) {
            ++sync_failures;
        }
    }
    pt.reliable = sync_failures * 10 <= cfg.n_frames;
    pt.low_confidence = pt.bits < 100000;
    pt.ber = pt.bits > 0 ? static_cast<double>(pt.errors) / static_cast<double>(pt.bits) : 1.0;
    pt.hd_pass = pt.ber < kHdFecBer;
    pt.sd_pass = pt.ber < kSdFecBer;
    return pt;
}

BerReport osnr_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.osnr_points.empty()) throw config_error("osnr_sweep: empty osnr_points");
    BerReport report;
    report.fingerprint = config_fingerprint(cfg);
    const ProbeResult probe = probe_and_load(cfg);
    report.loading = probe.table;
    report.profile = probe.profile;
    for (size_t i = 0; i < cfg.osnr_points.size(); ++i)
        report.points.push_back(
            run_point(cfg, probe.table, cfg.osnr_points[i], static_cast<int>(i)));
    render_report(report, cfg);
    return report;
}

namespace {

void write_rows(std::ofstream& out, bool ws, const std::string& header,
                const std::vector<std::string>& rows, const std::string& fingerprint,
                const std::string& extra_comment = {}) {
    out << "# config " << fingerprint << "\n";
    if (!extra_comment.empty()) out << "# " << extra_comment << "\n";
    std::string h = header;
    if (ws) std::replace(h.begin(), h.end(), ',', ' ');
    out << (ws ? "# " + h : h) << "\n";
    for (std::string r : rows) {
        if (ws) std::replace(r.begin(), r.end(), ',', ' ');
        out << r << "\n";
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: byte-identical across runs
    if (!out) throw config_error("cannot write " + path);
    return out;
}

} // namespace

void write_sweep_csv(const std::string& path, const BerReport& report, bool whitespace) {
    std::vector<std::string> rows;
    char buf[160];
    for (const auto& p : report.points) {
        std::snprintf(buf, sizeof buf, "%s,%.6e,%lld,%lld,%d,%d", osnr_str(p.osnr_db).c_str(),
                      p.ber, p.errors, p.bits, p.hd_pass ? 1 : 0, p.sd_pass ? 1 : 0);
        rows.emplace_back(buf);
    }
    auto out = open_out(path);
    write_rows(out, whitespace, "osnr_db,ber,errors,bits,hd_pass,sd_pass", rows,
               report.fingerprint);
}

void write_loading_csv(const std::string& path, const LoadingTable& table,
                       const std::string& fingerprint, bool whitespace) {
    std::vector<std::string> rows;
    char buf[96];
    for (size_t k = 0; k < table.bits.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%d,%.9g", k + 1, table.bits[k], table.power[k]);
        rows.emplace_back(buf);
    }
    char extra[96];
    std::snprintf(extra, sizeof extra, "B=%lld gap_db=%.6f", table.target_bits, table.gap_db);
    auto out = open_out(path);
    write_rows(out, whitespace, "carrier,bits,power", rows, fingerprint, extra);
}

void write_snr_csv(const std::string& path, const SnrProfile& profile,
                   const ExperimentConfig& cfg, const std::string& fingerprint, bool whitespace) {
    std::vector<std::string> rows;
    char buf[96];
    for (size_t k = 0; k < profile.snr.size(); ++k) {
        const double f = carrier_freq_hz(static_cast<int>(k + 1), cfg.dmt);
        const double db = profile.snr[k] > 0.0 ? linear_to_db(profile.snr[k]) : -99.0;
        std::snprintf(buf, sizeof buf, "%zu,%.10g,%.4f", k + 1, f, db);
        rows.emplace_back(buf);
    }
    auto out = open_out(path);
    write_rows(out, whitespace, "carrier,freq_hz,snr_db", rows, fingerprint);
}

void write_fading_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::string& fingerprint, bool whitespace) {
    std::vector<std::string> rows;
    char buf[96];
    for (int k = 1; k <= cfg.dmt.n_modulated; ++k) {
        const double f = carrier_freq_hz(k, cfg.dmt);
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.9g", k, f, analytic_fading(f, cfg.link));
        rows.emplace_back(buf);
    }
    auto out = open_out(path);
    write_rows(out, whitespace, "carrier,freq_hz,magnitude", rows, fingerprint);
}

void render_report(const BerReport& report, const ExperimentConfig& cfg) {
    namespace fsys = std::filesystem;
    fsys::create_directories(cfg.output_path);
    const auto dir = fsys::path(cfg.output_path);
    write_sweep_csv((dir / "sweep.csv").string(), report);
    write_loading_csv((dir / "loading.csv").string(), report.loading, report.fingerprint);
    write_snr_csv((dir / "snr.csv").string(), report.profile, cfg, report.fingerprint);
    write_sweep_csv((dir / "sweep.dat").string(), report, true);
    write_loading_csv((dir / "loading.dat").string(), report.loading, report.fingerprint, true);
    write_snr_csv((dir / "snr.dat").string(), report.profile, cfg, report.fingerprint, true);
}

} // namespace dmt
