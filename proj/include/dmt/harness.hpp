#ifndef DMT_HARNESS_HPP
#define DMT_HARNESS_HPP

#include "dmt/channel.hpp"
#include "dmt/config.hpp"
#include "dmt/loading.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dmt {

// Pre-FEC thresholds: hard-decision 7% overhead, soft-decision.
constexpr double kHdFecBer = 4e-3;
constexpr double kSdFecBer = 1.9e-2;

struct BerPoint {
    std::optional<double> osnr_db; // empty = noise off
    long long errors = 0;
    long long bits = 0;
    double ber = 0.0;
    bool hd_pass = false;
    bool sd_pass = false;
    bool reliable = true;       // <= 10% sync failures across frames
    bool low_confidence = false; // fewer than 1e5 counted bits
};

struct BerReport {
    std::vector<BerPoint> points;
    LoadingTable loading;
    SnrProfile profile;
    std::string fingerprint;
};

// DSB dispersion power-fading law |cos(pi lambda^2 D L f^2 / c)|.
double analytic_fading(double f_hz, const LinkConfig& cfg);

// gross bits per DMT symbol needed for the target line rate
long long target_bits_per_symbol(const ExperimentConfig& cfg);

// carrier center frequency (Hz) of 1-based carrier k
double carrier_freq_hz(int k, const DmtConfig& cfg);

// TX waveform -> oversampled optics (MZM, fiber, optional ASE, photodiode)
// -> capture at adc_rate -> back to dac_rate for the receiver DSP.
// The frame is centered in a power-of-two buffer so every rate hop stays an
// integer sample count.
ElectricalWaveform run_link(const std::vector<double>& frame_wave, const ExperimentConfig& cfg,
                            std::optional<double> osnr_db, uint64_t noise_seed);

// sample index at which run_link places a frame of the given length
int link_frame_offset(size_t frame_len);

struct ProbeResult {
    LoadingTable table;
    SnrProfile profile;
};

// 16-QAM probe frames at the best condition the sweep will see (noise off
// when any point is off, otherwise the maximum OSNR point), EVM-based SNR
// profile, Levin-Campello bit allocation to the target rate, margin-equalizing
// power allocation.
ProbeResult probe_and_load(const ExperimentConfig& cfg);

// Monte-Carlo BER at one OSNR point with a fixed loading table.
BerPoint run_point(const ExperimentConfig& cfg, const LoadingTable& loading,
                   std::optional<double> osnr_db, int point_index);

// probe once, then every OSNR point; writes sweep/loading/snr tables under
// cfg.output_path. Deterministic (byte-identical files) for a fixed config.
BerReport osnr_sweep(const ExperimentConfig& cfg);

// CSV emission (comma separated, schema headers, fingerprint comment) plus
// whitespace-delimited .dat twins for direct gnuplot consumption.
void render_report(const BerReport& report, const ExperimentConfig& cfg);
void write_sweep_csv(const std::string& path, const BerReport& report, bool whitespace = false);
void write_loading_csv(const std::string& path, const LoadingTable& table,
                       const std::string& fingerprint, bool whitespace = false);
void write_snr_csv(const std::string& path, const SnrProfile& profile, const ExperimentConfig& cfg,
                   const std::string& fingerprint, bool whitespace = false);
void write_fading_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::string& fingerprint, bool whitespace = false);

} // namespace dmt

#endif // DMT_HARNESS_HPP
