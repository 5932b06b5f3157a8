#include "dmt/channel.hpp"

#include "dmt/errors.hpp"
#include "dmt/fft.hpp"
#include "dmt/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace dmt {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kOsnrRefBw = 12.5e9; // 0.1 nm reference bandwidth
constexpr double kPi = 3.14159265358979323846;

// bin index -> baseband frequency for an n-point DFT at the given rate
double bin_freq(size_t k, size_t n, double rate) {
    const double idx = (k <= n / 2) ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(n);
    return idx * rate / static_cast<double>(n);
}
} // namespace

double OpticalField::mean_power() const {
    if (samples.empty()) return 0.0;
    double p = 0.0;
    for (const auto& s : samples) p += std::norm(s);
    return p / static_cast<double>(samples.size());
}

OpticalField mzm_modulate(const ElectricalWaveform& drive, const LinkConfig& cfg) {
    cfg.validate();
    if (drive.samples.empty()) throw degenerate_signal_error("mzm_modulate: empty drive");
    double peak = 0.0;
    for (double v : drive.samples) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) throw degenerate_signal_error("mzm_modulate: all-zero drive");

    OpticalField out;
    out.rate = drive.rate;
    out.samples.resize(drive.samples.size());
    double mean_sq = 0.0;
    for (size_t i = 0; i < drive.samples.size(); ++i) {
        const double v = drive.samples[i] / peak;
        const double e = std::cos(kPi / 4.0 + (kPi / 2.0) * cfg.mod_index * v);
        out.samples[i] = {e, 0.0};
        mean_sq += e * e;
    }
    mean_sq /= static_cast<double>(out.samples.size());
    const double launch_mw = std::pow(10.0, cfg.launch_power_dbm / 10.0);
    const double e0 = std::sqrt(launch_mw / mean_sq);
    for (auto& s : out.samples) s *= e0;
    return out;
}

OpticalField propagate_dispersion(const OpticalField& field, const LinkConfig& cfg) {
    if (field.samples.empty()) throw degenerate_signal_error("propagate_dispersion: empty field");
    if (cfg.fiber_len == 0.0) return field;

    const double lambda = cfg.wavelength();
    const double beta2 = -cfg.dispersion * lambda * lambda / (2.0 * kPi * kSpeedOfLight);
    const double amp = std::pow(10.0, -cfg.loss_db_per_m * cfg.fiber_len / 20.0);

    OpticalField out;
    out.rate = field.rate;
    out.samples = fft::forward(field.samples);
    const size_t n = out.samples.size();
    for (size_t k = 0; k < n; ++k) {
        const double w = 2.0 * kPi * bin_freq(k, n, field.rate);
        const double phase = 0.5 * beta2 * w * w * cfg.fiber_len;
        out.samples[k] *= amp * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    fft::inverse_inplace(out.samples);
    return out;
}

OpticalField make_ase_noise(const OpticalField& signal, double osnr_db, const LinkConfig& cfg,
                            uint64_t seed) {
    const double p_sig = signal.mean_power();
    if (p_sig <= 0.0) throw degenerate_signal_error("make_ase_noise: zero signal power");
    const double osnr_lin = std::pow(10.0, osnr_db / 10.0);
    const double n0_total = p_sig / (osnr_lin * kOsnrRefBw);
    if (!(n0_total > 0.0) || !std::isfinite(n0_total))
        throw config_error("make_ase_noise: invalid OSNR target");

    // copolar half of the unpolarized ASE; per-sample variance = PSD * rate
    const double var = 0.5 * n0_total * signal.rate;
    const double sigma = std::sqrt(var / 2.0); // per quadrature

    OpticalField noise;
    noise.rate = signal.rate;
    noise.samples.resize(signal.samples.size());
    Rng rng(seed);
    for (auto& s : noise.samples) s = {sigma * rng.gauss(), sigma * rng.gauss()};

    // optical demux: brick wall at +-demux_bandwidth/2
    fft::forward_inplace(noise.samples);
    const size_t n = noise.samples.size();
    for (size_t k = 0; k < n; ++k)
        if (std::abs(bin_freq(k, n, noise.rate)) > cfg.demux_bandwidth / 2.0)
            noise.samples[k] = {0.0, 0.0};
    fft::inverse_inplace(noise.samples);
    return noise;
}

OpticalField load_ase(const OpticalField& signal, double osnr_db, const LinkConfig& cfg,
                      uint64_t seed) {
    const OpticalField noise = make_ase_noise(signal, osnr_db, cfg, seed);
    OpticalField out = signal;
    for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += noise.samples[i];
    return out;
}

double measure_osnr(const OpticalField& signal, const OpticalField& noise) {
    const double p_sig = signal.mean_power();
    if (noise.samples.empty() || noise.mean_power() == 0.0)
        return std::numeric_limits<double>::infinity();
    auto spec = fft::forward(noise.samples);
    const size_t n = spec.size();
    double acc = 0.0;
    size_t count = 0;
    for (size_t k = 0; k < n; ++k) {
        if (std::abs(bin_freq(k, n, noise.rate)) > kOsnrRefBw / 2.0) continue;
        acc += std::norm(spec[k]);
        ++count;
    }
    if (count == 0 || acc == 0.0) return std::numeric_limits<double>::infinity();
    const double psd_copolar = (acc / static_cast<double>(count)) / noise.rate;
    const double n0_total = 2.0 * psd_copolar; // both polarizations, OSA convention
    return 10.0 * std::log10(p_sig / (n0_total * kOsnrRefBw));
}

ElectricalWaveform photodetect(const OpticalField& field, const LinkConfig& cfg) {
    if (field.samples.empty()) throw degenerate_signal_error("photodetect: empty field");
    std::vector<std::complex<double>> i_t(field.samples.size());
    for (size_t i = 0; i < field.samples.size(); ++i) i_t[i] = {std::norm(field.samples[i]), 0.0};
    fft::forward_inplace(i_t);
    const size_t n = i_t.size();
    for (size_t k = 0; k < n; ++k)
        if (std::abs(bin_freq(k, n, field.rate)) > cfg.pd_bandwidth) i_t[k] = {0.0, 0.0};
    i_t[0] = {0.0, 0.0}; // AC coupling
    fft::inverse_inplace(i_t);
    ElectricalWaveform out;
    out.rate = field.rate;
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) out.samples[i] = i_t[i].real();
    return out;
}

ElectricalWaveform resample(const ElectricalWaveform& w, double target_rate) {
    if (w.samples.empty()) throw degenerate_signal_error("resample: empty waveform");
    if (target_rate <= 0.0) throw config_error("resample: target rate must be positive");
    if (target_rate == w.rate) return w;

    const double n_out_f = static_cast<double>(w.samples.size()) * target_rate / w.rate;
    const double rounded = std::round(n_out_f);
    if (std::abs(n_out_f - rounded) > 1e-6 || rounded < 2.0)
        throw config_error("resample: ratio " + std::to_string(target_rate) + "/" +
                           std::to_string(w.rate) + " does not give an integer sample count");
    const size_t n_in = w.samples.size();
    const size_t n_out = static_cast<size_t>(rounded);

    std::vector<std::complex<double>> spec(n_in);
    for (size_t i = 0; i < n_in; ++i) spec[i] = {w.samples[i], 0.0};
    fft::forward_inplace(spec);

    std::vector<std::complex<double>> out_spec(n_out, {0.0, 0.0});
    const size_t keep = std::min(n_in, n_out);
    for (size_t k = 0; k <= (keep - 1) / 2; ++k) out_spec[k] = spec[k];
    for (size_t k = 1; k <= (keep - 1) / 2; ++k) out_spec[n_out - k] = spec[n_in - k];
    if (keep % 2 == 0) {
        const size_t half = keep / 2;
        if (n_out < n_in) {
            // fold both old bins that land on the new Nyquist bin
            out_spec[half] = spec[half] + spec[n_in - half];
        } else {
            // split the old Nyquist bin across the two new locations
            out_spec[half] = 0.5 * spec[half];
            out_spec[n_out - half] = 0.5 * std::conj(spec[half]);
        }
    }
    const double scale = std::sqrt(static_cast<double>(n_out) / static_cast<double>(n_in));
    for (auto& v : out_spec) v *= scale;
    fft::inverse_inplace(out_spec);

    ElectricalWaveform out;
    out.rate = target_rate;
    out.samples.resize(n_out);
    for (size_t i = 0; i < n_out; ++i) out.samples[i] = out_spec[i].real();
    return out;
}

} // namespace dmt
