#ifndef DMT_CHANNEL_HPP
#define DMT_CHANNEL_HPP

#include "dmt/config.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace dmt {

// Complex baseband envelope relative to carrier_freq, in sqrt(mW) units.
struct OpticalField {
    std::vector<std::complex<double>> samples;
    double rate = 0.0;

    double mean_power() const;
};

struct ElectricalWaveform {
    std::vector<double> samples;
    double rate = 0.0;
};

// MZM at the power quadrature point: E(t) = E0 cos(pi/4 + (pi/2) mi v(t)),
// v = drive scaled so max|v| = 1 over the record, E0 chosen so the mean
// optical power equals launch_power_dbm.
OpticalField mzm_modulate(const ElectricalWaveform& drive, const LinkConfig& cfg);

// All-pass chromatic dispersion exp(+j (beta2/2) w^2 L) with
// beta2 = -D lambda^2 / (2 pi c), plus scalar fiber loss.
OpticalField propagate_dispersion(const OpticalField& field, const LinkConfig& cfg);

// ASE realization for a target OSNR (12.5 GHz reference bandwidth),
// band-limited by the demux filter. Follows the standard unpolarized-ASE
// convention: an OSA counts noise in both polarizations, but only the
// copolarized half beats with the signal, so the generated (copolar) field
// carries half the total ASE PSD implied by the OSNR.
OpticalField make_ase_noise(const OpticalField& signal, double osnr_db, const LinkConfig& cfg,
                            uint64_t seed);

// signal + make_ase_noise, the usual noise-loading entry point.
OpticalField load_ase(const OpticalField& signal, double osnr_db, const LinkConfig& cfg,
                      uint64_t seed);

// 10 log10(P_signal / (N0 * 12.5 GHz)) with N0 the total (both-polarization)
// ASE PSD, i.e. twice the measured copolar PSD. Returns +inf for zero noise
// ("off"). PSD is measured over the 12.5 GHz band around the carrier.
double measure_osnr(const OpticalField& signal, const OpticalField& noise);

// |E|^2, brick-wall low-pass at pd_bandwidth, DC removed (AC coupling).
ElectricalWaveform photodetect(const OpticalField& field, const LinkConfig& cfg);

// Spectrum-preserving rational resampling (FFT zero-pad/truncate).
// len * target/rate must land on an integer sample count.
ElectricalWaveform resample(const ElectricalWaveform& w, double target_rate);

} // namespace dmt

#endif // DMT_CHANNEL_HPP
