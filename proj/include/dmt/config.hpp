#ifndef DMT_CONFIG_HPP
#define DMT_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dmt {

// Modem framing constants.
struct DmtConfig {
    int fft_size = 2048;       // IFFT length N
    int cp_len = 32;           // cyclic prefix, N/64 at defaults
    int n_usable = 1023;       // carriers below Nyquist (N/2 - 1)
    int n_modulated = 852;     // carriers actually carrying data
    double dac_rate = 64e9;    // transmitter sample rate
    double adc_rate = 80e9;    // receiver capture rate
    double clip_ratio_db = 12.0;
    int frame_len = 124;       // DMT symbols per frame, training included
    int n_ts = 5;              // leading training symbols (1 sync + rest channel est.)
    double dd_alpha = 0.1;     // decision-directed channel update coefficient
    double sc_plateau = 0.9;   // Schmidl-Cox plateau level relative to metric peak
    double sc_threshold = 0.3; // absolute metric floor for detection

    int symbol_len() const { return fft_size + cp_len; }
    int n_payload() const { return frame_len - n_ts; }
    void validate() const;
};

// Optics and noise-loading parameters.
struct LinkConfig {
    double carrier_freq = 192.5e12; // Hz
    double fiber_len = 50.5e3;      // m
    double dispersion = 17e-6;      // s/m^2 (17 ps/nm/km)
    double loss_db_per_m = 0.2e-3;  // 0.2 dB/km
    double launch_power_dbm = 5.0;
    std::optional<double> osnr_db;  // empty = noise loading off
    double pd_bandwidth = 50e9;     // photodiode brick-wall bandwidth
    double demux_bandwidth = 100e9; // optical noise filter width (two-sided)
    double mod_index = 0.38;        // peak drive as fraction of Vpi
    uint64_t noise_seed = 1;

    double wavelength() const;
    void validate() const;
};

// One experiment = modem + link + sweep description.
// osnr_points entries may be empty (= noise off) to get reference points.
struct ExperimentConfig {
    DmtConfig dmt;
    LinkConfig link;
    double rate_gbps = 56.0;
    std::vector<std::optional<double>> osnr_points;
    int n_frames = 2;        // Monte-Carlo frames per OSNR point
    int n_probe_frames = 3;  // probe frames averaged for the SNR profile
    uint64_t seed = 1;
    std::string output_path = "out";

    void validate() const;
};

// JSON round trip. load merges fields present in the file over the given
// defaults, so partial config files work.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& cfg);

// FNV-1a hash of the canonical JSON dump, as a fixed-width hex string.
// Stamped into every CSV header for traceability.
std::string config_fingerprint(const ExperimentConfig& cfg);

} // namespace dmt

#endif // DMT_CONFIG_HPP
