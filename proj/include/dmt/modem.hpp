#ifndef DMT_MODEM_HPP
#define DMT_MODEM_HPP

#include "dmt/config.hpp"
#include "dmt/loading.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace dmt {

using cvec = std::vector<std::complex<double>>;

struct DmtFrame {
    std::vector<double> waveform; // frame_len * (N + cp) real samples at dac_rate
    std::vector<uint8_t> payload_bits;
};

struct ChannelEstimate {
    cvec h; // per modulated carrier
    int snapshot_symbol = 0;
};

// Known training content at unit power (part of the frame format, fixed seed):
// index 0 is the sync symbol — QPSK on even carriers only, scaled by sqrt(2),
// odd carriers zero, so the time-domain halves repeat; indices 1..n_ts-1 are
// full QPSK symbols for channel estimation.
cvec ts_reference(int ts_index, const DmtConfig& cfg);

// Hermitian-symmetric spectrum: X[0] = X[N/2] = 0, X[k] = sqrt(g_k) * symbol,
// X[N-k] = conj(X[k]); carriers above n_modulated stay empty.
cvec assemble_spectrum(const cvec& symbols, const LoadingTable& loading, const DmtConfig& cfg);

struct SynthResult {
    std::vector<double> samples; // N + cp real samples
    double imag_residue;         // ||imag|| / ||x|| before taking the real part
};

// Unitary IFFT + cyclic prefix. Throws if the spectrum is not Hermitian
// (imaginary residue above 1e-9 of RMS).
SynthResult dmt_modulate(const cvec& spectrum, const DmtConfig& cfg);

// Hard limiter at A = rms * 10^(clip_ratio_db/20); rms taken from the input.
std::vector<double> clip(const std::vector<double>& w, double clip_ratio_db);

// TS block + payload symbols, CP-extended, clipped as one waveform.
DmtFrame build_frame(const std::vector<uint8_t>& payload_bits, const LoadingTable& loading,
                     const DmtConfig& cfg);

// Timing metric M(d) = |P(d)|^2 / R(d)^2 over the half-symbol correlation;
// returns the frame start estimate (start of the first TS cyclic prefix),
// biased early by at most cp_len. Throws sync_error below the detection
// threshold.
int schmidl_cox_locate(const std::vector<double>& rx, const DmtConfig& cfg);

// FFT of every symbol in the frame; rows = frame_len, cols = n_modulated.
// frame_start is schmidl_cox_locate output (window begins frame_start + cp).
std::vector<cvec> parse_symbols(const std::vector<double>& rx, int frame_start,
                                const DmtConfig& cfg);

// H_k = mean over training symbols of rx/known.
ChannelEstimate estimate_channel(const std::vector<cvec>& rx_ts,
                                 const std::vector<cvec>& known_ts);

// One-tap equalization Y/(sqrt(g) H) + hard decisions, with decision-directed
// tracking H <- (1-alpha) H + alpha * Y/(sqrt(g) Xhat) on loaded carriers.
void equalize_payload(const std::vector<cvec>& payload_symbols, const LoadingTable& loading,
                      const DmtConfig& cfg, ChannelEstimate& est,
                      std::vector<uint8_t>& bits_out, std::vector<cvec>& equalized_out);

// Matched-filter fine timing: correlate the known first TS against rx around
// a coarse estimate; returns the frame start to sample accuracy.
int refine_frame_start(const std::vector<double>& rx, int coarse, const DmtConfig& cfg);

struct DemodResult {
    std::vector<uint8_t> bits;
    std::vector<cvec> equalized; // payload rows, all modulated carriers
    ChannelEstimate est;
    int frame_start = 0;
};

// Full receiver: locate (unless given), parse, estimate from TS, equalize.
DemodResult demodulate_frame(const std::vector<double>& rx, const LoadingTable& loading,
                             const DmtConfig& cfg, std::optional<int> frame_start = {});

} // namespace dmt

#endif // DMT_MODEM_HPP
