#include "dmt/modem.hpp"

#include "dmt/errors.hpp"
#include "dmt/fft.hpp"
#include "dmt/qam.hpp"
#include "dmt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dmt {

namespace {
// training content is a fixed part of the frame format, shared TX/RX
constexpr uint64_t kTsSeed = 0x7453u;
} // namespace

cvec ts_reference(int ts_index, const DmtConfig& cfg) {
    if (ts_index < 0 || ts_index >= cfg.n_ts)
        throw framing_error("ts_reference: index out of range");
    const auto& qpsk = build_constellation(2);
    Rng rng(derive_seed(kTsSeed, {static_cast<uint64_t>(ts_index)}));
    cvec out(cfg.n_modulated, {0.0, 0.0});
    const double sync_scale = std::sqrt(2.0);
    for (int k = 1; k <= cfg.n_modulated; ++k) {
        const auto p = qpsk.points[rng.bits(2)];
        if (ts_index == 0) {
            if (k % 2 == 0) out[k - 1] = sync_scale * p; // even carriers only
        } else {
            out[k - 1] = p;
        }
    }
    return out;
}

cvec assemble_spectrum(const cvec& symbols, const LoadingTable& loading, const DmtConfig& cfg) {
    if (static_cast<int>(symbols.size()) != cfg.n_modulated)
        throw framing_error("assemble_spectrum: expected " + std::to_string(cfg.n_modulated) +
                            " symbols, got " + std::to_string(symbols.size()));
    if (loading.power.size() != symbols.size())
        throw framing_error("assemble_spectrum: loading table size mismatch");
    const int n = cfg.fft_size;
    cvec spec(n, {0.0, 0.0});
    for (int k = 1; k <= cfg.n_modulated; ++k) {
        const auto v = std::sqrt(loading.power[k - 1]) * symbols[k - 1];
        spec[k] = v;
        spec[n - k] = std::conj(v);
    }
    return spec;
}

SynthResult dmt_modulate(const cvec& spectrum, const DmtConfig& cfg) {
    const int n = cfg.fft_size;
    if (static_cast<int>(spectrum.size()) != n)
        throw framing_error("dmt_modulate: spectrum length != fft_size");
    cvec x = fft::inverse(spectrum);
    double p_re = 0.0, p_im = 0.0;
    for (const auto& v : x) {
        p_re += v.real() * v.real();
        p_im += v.imag() * v.imag();
    }
    const double total = p_re + p_im;
    const double residue = total > 0.0 ? std::sqrt(p_im / total) : 0.0;
    if (residue > 1e-9)
        throw framing_error("dmt_modulate: spectrum is not Hermitian-symmetric");
    SynthResult out;
    out.imag_residue = residue;
    out.samples.resize(n + cfg.cp_len);
    for (int i = 0; i < cfg.cp_len; ++i) out.samples[i] = x[n - cfg.cp_len + i].real();
    for (int i = 0; i < n; ++i) out.samples[cfg.cp_len + i] = x[i].real();
    return out;
}

std::vector<double> clip(const std::vector<double>& w, double clip_ratio_db) {
    if (w.empty()) throw degenerate_signal_error("clip: empty waveform");
    double p = 0.0;
    for (double v : w) p += v * v;
    const double rms = std::sqrt(p / static_cast<double>(w.size()));
    if (rms == 0.0) throw degenerate_signal_error("clip: zero-power waveform");
    const double a = rms * std::pow(10.0, clip_ratio_db / 20.0);
    std::vector<double> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) out[i] = std::clamp(w[i], -a, a);
    return out;
}

DmtFrame build_frame(const std::vector<uint8_t>& payload_bits, const LoadingTable& loading,
                     const DmtConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(loading.bits.size()) != cfg.n_modulated)
        throw framing_error("build_frame: loading table size != n_modulated");
    const long long bits_per_symbol = loading.sum_bits();
    const long long expect = static_cast<long long>(cfg.n_payload()) * bits_per_symbol;
    if (static_cast<long long>(payload_bits.size()) != expect)
        throw framing_error("build_frame: payload is " + std::to_string(payload_bits.size()) +
                            " bits, frame needs " + std::to_string(expect));

    const LoadingTable unit = uniform_loading(cfg.n_modulated, 2); // TS carry unit power
    DmtFrame frame;
    frame.payload_bits = payload_bits;
    frame.waveform.reserve(static_cast<size_t>(cfg.frame_len) * cfg.symbol_len());

    auto append = [&](const cvec& symbols, const LoadingTable& table) {
        const auto spec = assemble_spectrum(symbols, table, cfg);
        const auto synth = dmt_modulate(spec, cfg);
        frame.waveform.insert(frame.waveform.end(), synth.samples.begin(), synth.samples.end());
    };

    for (int t = 0; t < cfg.n_ts; ++t) append(ts_reference(t, cfg), unit);

    size_t cursor = 0;
    cvec symbols(cfg.n_modulated);
    for (int t = 0; t < cfg.n_payload(); ++t) {
        for (int k = 0; k < cfg.n_modulated; ++k) {
            const int m = loading.bits[k];
            symbols[k] = m > 0 ? map_bits(&payload_bits[cursor], m) : std::complex<double>{};
            cursor += m;
        }
        append(symbols, loading);
    }

    frame.waveform = clip(frame.waveform, cfg.clip_ratio_db);
    return frame;
}

int schmidl_cox_locate(const std::vector<double>& rx, const DmtConfig& cfg) {
    const int n = cfg.fft_size;
    const int half = n / 2;
    const int len = static_cast<int>(rx.size());
    if (len < n + 1) throw sync_error("schmidl_cox_locate: waveform shorter than one symbol");
    const int d_max = len - n; // last d with a full window

    std::vector<double> metric(d_max, 0.0), energy(d_max, 0.0);
    double p = 0.0, r = 0.0;
    for (int i = 0; i < half; ++i) {
        p += rx[i] * rx[i + half];
        r += rx[i + half] * rx[i + half];
    }
    for (int d = 0; d < d_max; ++d) {
        metric[d] = r > 0.0 ? (p * p) / (r * r) : 0.0;
        energy[d] = r;
        // slide window by one; re-accumulate periodically to stop fp drift
        if ((d & 0x0fff) == 0x0fff) {
            p = r = 0.0;
            for (int i = 0; i < half; ++i) {
                p += rx[d + 1 + i] * rx[d + 1 + i + half];
                r += rx[d + 1 + i + half] * rx[d + 1 + i + half];
            }
        } else {
            p += rx[d + half] * rx[d + n] - rx[d] * rx[d + half];
            r += rx[d + n] * rx[d + n] - rx[d + half] * rx[d + half];
        }
    }

    // silence gate: the half-symbol correlation is ~1 over any quiet region
    // (padding, numerical residue), so only windows carrying real energy count
    const double r_max = *std::max_element(energy.begin(), energy.end());
    for (int d = 0; d < d_max; ++d)
        if (energy[d] < 0.05 * r_max) metric[d] = 0.0;

    const auto it = std::max_element(metric.begin(), metric.end());
    const double peak = *it;
    if (peak < cfg.sc_threshold)
        throw sync_error("schmidl_cox_locate: no frame found (peak metric " +
                         std::to_string(peak) + ")");
    const int d_peak = static_cast<int>(it - metric.begin());
    const double level = cfg.sc_plateau * peak;
    int lo = d_peak, hi = d_peak;
    while (lo > 0 && metric[lo - 1] >= level) --lo;
    while (hi + 1 < d_max && metric[hi + 1] >= level) ++hi;
    const int center = (lo + hi) / 2;
    // The metric is flat over [start, start + cp] but its trailing skirt is
    // systematically wider than the leading one: the correlation decays only
    // once the window slides out through the repeated half AND its prefix.
    // Backing the plateau center off by 1.5 prefixes lands mid-ambiguity;
    // measured error stays within [-cp, 0] down to 15 dB electrical SNR.
    return std::max(0, center - 3 * cfg.cp_len / 2);
}

int refine_frame_start(const std::vector<double>& rx, int coarse, const DmtConfig& cfg) {
    // the plateau metric is ambiguous across the whole CP by construction, so
    // pin the start to sample accuracy with a matched filter: slide the known
    // first training symbol (receiver-reconstructible) around the coarse
    // estimate and take the correlation peak. Polarity is irrelevant (the
    // detector slope may invert the waveform), hence the absolute value.
    const auto spec =
        assemble_spectrum(ts_reference(0, cfg), uniform_loading(cfg.n_modulated, 2), cfg);
    const auto s = dmt_modulate(spec, cfg).samples;
    const int len = static_cast<int>(rx.size());
    const int span = cfg.cp_len + 16;
    const int d_hi = std::min(len - static_cast<int>(s.size()), coarse + span);
    int best_d = coarse;
    double best = -1.0;
    for (int d = std::max(0, coarse - span); d <= d_hi; ++d) {
        double c = 0.0;
        for (size_t i = 0; i < s.size(); ++i) c += rx[d + i] * s[i];
        if (std::abs(c) > best) {
            best = std::abs(c);
            best_d = d;
        }
    }
    return best_d;
}

std::vector<cvec> parse_symbols(const std::vector<double>& rx, int frame_start,
                                const DmtConfig& cfg) {
    const int n = cfg.fft_size;
    const int step = cfg.symbol_len();
    if (frame_start < 0 ||
        frame_start + static_cast<long long>(cfg.frame_len) * step > static_cast<long long>(rx.size()))
        throw framing_error("parse_symbols: frame exceeds waveform bounds");
    std::vector<cvec> rows(cfg.frame_len);
    cvec buf(n);
    for (int t = 0; t < cfg.frame_len; ++t) {
        const int s0 = frame_start + cfg.cp_len + t * step;
        for (int i = 0; i < n; ++i) buf[i] = {rx[s0 + i], 0.0};
        fft::forward_inplace(buf);
        rows[t].assign(buf.begin() + 1, buf.begin() + 1 + cfg.n_modulated);
    }
    return rows;
}

ChannelEstimate estimate_channel(const std::vector<cvec>& rx_ts,
                                 const std::vector<cvec>& known_ts) {
    if (rx_ts.empty() || rx_ts.size() != known_ts.size())
        throw framing_error("estimate_channel: need matching rx/known TS sets");
    const size_t n = rx_ts.front().size();
    ChannelEstimate est;
    est.h.assign(n, {0.0, 0.0});
    for (size_t t = 0; t < rx_ts.size(); ++t) {
        if (rx_ts[t].size() != n || known_ts[t].size() != n)
            throw framing_error("estimate_channel: TS size mismatch");
        for (size_t k = 0; k < n; ++k) {
            if (std::norm(known_ts[t][k]) == 0.0)
                throw framing_error("estimate_channel: zero training reference on carrier " +
                                    std::to_string(k + 1));
            est.h[k] += rx_ts[t][k] / known_ts[t][k];
        }
    }
    const double inv = 1.0 / static_cast<double>(rx_ts.size());
    for (auto& h : est.h) h *= inv;
    est.snapshot_symbol = static_cast<int>(rx_ts.size());
    return est;
}

void equalize_payload(const std::vector<cvec>& payload_symbols, const LoadingTable& loading,
                      const DmtConfig& cfg, ChannelEstimate& est,
                      std::vector<uint8_t>& bits_out, std::vector<cvec>& equalized_out) {
    if (static_cast<int>(est.h.size()) != cfg.n_modulated)
        throw framing_error("equalize_payload: channel estimate size mismatch");
    const double alpha = cfg.dd_alpha;
    equalized_out.assign(payload_symbols.size(), cvec(cfg.n_modulated, {0.0, 0.0}));
    for (size_t t = 0; t < payload_symbols.size(); ++t) {
        const cvec& y = payload_symbols[t];
        for (int k = 0; k < cfg.n_modulated; ++k) {
            const int m = loading.bits[k];
            if (m == 0) continue;
            const double sg = std::sqrt(loading.power[k]);
            const auto denom = sg * est.h[k];
            const auto eq = std::norm(denom) > 0.0 ? y[k] / denom : std::complex<double>{};
            equalized_out[t][k] = eq;
            const uint32_t label = demap_label(eq, m);
            for (int i = 0; i < m; ++i)
                bits_out.push_back(static_cast<uint8_t>((label >> (m - 1 - i)) & 1u));
            const auto xhat = build_constellation(m).points[label];
            est.h[k] = (1.0 - alpha) * est.h[k] + alpha * (y[k] / (sg * xhat));
        }
        est.snapshot_symbol = static_cast<int>(t) + 1;
    }
}

DemodResult demodulate_frame(const std::vector<double>& rx, const LoadingTable& loading,
                             const DmtConfig& cfg, std::optional<int> frame_start) {
    if (static_cast<int>(loading.bits.size()) != cfg.n_modulated)
        throw framing_error("demodulate_frame: loading table size != n_modulated");
    DemodResult res;
    if (frame_start) {
        res.frame_start = *frame_start;
    } else {
        // coarse plateau search, matched-filter refinement, then back off to
        // the middle of the CP so symbol windows keep slack on both sides
        const int fine = refine_frame_start(rx, schmidl_cox_locate(rx, cfg), cfg);
        res.frame_start = std::max(0, fine - cfg.cp_len / 2);
    }
    const auto rows = parse_symbols(rx, res.frame_start, cfg);

    std::vector<cvec> rx_ts(rows.begin() + 1, rows.begin() + cfg.n_ts);
    std::vector<cvec> known_ts;
    for (int t = 1; t < cfg.n_ts; ++t) known_ts.push_back(ts_reference(t, cfg));
    res.est = estimate_channel(rx_ts, known_ts);

    const std::vector<cvec> payload(rows.begin() + cfg.n_ts, rows.end());
    res.bits.reserve(static_cast<size_t>(cfg.n_payload()) * loading.sum_bits());
    equalize_payload(payload, loading, cfg, res.est, res.bits, res.equalized);
    return res;
}

} // namespace dmt
