#include <doctest.h>

#include "dmt/channel.hpp"
#include "dmt/errors.hpp"
#include "dmt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

using namespace dmt;
using cplx = std::complex<double>;

namespace {

constexpr double kC = 299792458.0;
constexpr double kPi = 3.14159265358979323846;

// amplitude of the fs-exact cosine component at bin k
double bin_amp(const std::vector<double>& w, int k) {
    const int n = static_cast<int>(w.size());
    cplx acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) acc += w[i] * std::polar(1.0, -2.0 * kPi * k * i / n);
    return 2.0 * std::abs(acc) / n;
}

ElectricalWaveform tone(double f, double rate, int n) {
    ElectricalWaveform w;
    w.rate = rate;
    w.samples.resize(n);
    for (int i = 0; i < n; ++i) w.samples[i] = std::sin(2.0 * kPi * f * i / rate);
    return w;
}

OpticalField cw_field(double power_mw, double rate, int n) {
    OpticalField f;
    f.rate = rate;
    f.samples.assign(n, cplx{std::sqrt(power_mw), 0.0});
    return f;
}

} // namespace

TEST_CASE("mzm sits at the power quadrature point") {
    LinkConfig cfg;

    SUBCASE("mean optical power equals the launch power for any drive") {
        Rng rng(0x301);
        ElectricalWaveform drive;
        drive.rate = 64e9;
        drive.samples.resize(8192);
        for (auto& v : drive.samples) v = rng.gauss();
        const OpticalField f = mzm_modulate(drive, cfg);
        CHECK(f.mean_power() ==
              doctest::Approx(std::pow(10.0, cfg.launch_power_dbm / 10.0)).epsilon(1e-12));
        CHECK(f.rate == drive.rate);
    }
    SUBCASE("full drive at index 0.5 swings from zero to full field, no sign flip") {
        cfg.mod_index = 0.5;
        ElectricalWaveform drive;
        drive.rate = 64e9;
        for (int i = 0; i < 64; ++i) drive.samples.push_back(i % 2 ? 1.0 : -1.0);
        const OpticalField f = mzm_modulate(drive, cfg);
        const double launch_mw = std::pow(10.0, cfg.launch_power_dbm / 10.0);
        const double e0 = std::sqrt(2.0 * launch_mw); // half the samples sit at zero field
        double lo = 1e9, hi = -1e9;
        for (const auto& s : f.samples) {
            lo = std::min(lo, s.real());
            hi = std::max(hi, s.real());
            CHECK(s.imag() == 0.0);
        }
        CHECK(lo == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(lo >= -1e-12);
        CHECK(hi == doctest::Approx(e0).epsilon(1e-12));
    }
    SUBCASE("small-signal intensity is linear in the modulation index") {
        const double rate = 64e9;
        const int n = 4096, k0 = 64; // 1 GHz, bin-exact
        const ElectricalWaveform drive = tone(k0 * rate / n, rate, n);
        const double launch_mw = std::pow(10.0, cfg.launch_power_dbm / 10.0);
        for (double mi : {0.05, 0.1, 0.2}) {
            CAPTURE(mi);
            LinkConfig c = cfg;
            c.mod_index = mi;
            const OpticalField f = mzm_modulate(drive, c);
            std::vector<double> intensity(n);
            for (int i = 0; i < n; ++i) intensity[i] = std::norm(f.samples[i]);
            const double amp = bin_amp(intensity, k0);
            // fundamental of the quadrature transfer ~ launch * pi * mi
            CHECK(amp / (launch_mw * kPi * mi) == doctest::Approx(1.0).epsilon(0.05));
        }
    }
    SUBCASE("degenerate drives are rejected") {
        CHECK_THROWS_AS(mzm_modulate(ElectricalWaveform{}, cfg), degenerate_signal_error);
        ElectricalWaveform zero;
        zero.rate = 64e9;
        zero.samples.assign(256, 0.0);
        CHECK_THROWS_AS(mzm_modulate(zero, cfg), degenerate_signal_error);
    }
}

TEST_CASE("dispersion is an all-pass filter with additive phase") {
    Rng rng(0xd15b);
    OpticalField f;
    f.rate = 64e9;
    f.samples.resize(4096);
    for (auto& s : f.samples) s = {rng.gauss(), rng.gauss()};

    SUBCASE("zero length is the identity") {
        LinkConfig cfg;
        cfg.fiber_len = 0.0;
        const OpticalField out = propagate_dispersion(f, cfg);
        CHECK(out.samples == f.samples);
    }
    SUBCASE("energy is preserved apart from the scalar loss") {
        LinkConfig cfg;
        cfg.fiber_len = 50.5e3;
        SUBCASE("lossless") {
            cfg.loss_db_per_m = 0.0;
            const OpticalField out = propagate_dispersion(f, cfg);
            CHECK(out.mean_power() == doctest::Approx(f.mean_power()).epsilon(1e-9));
        }
        SUBCASE("0.2 dB/km over 50.5 km") {
            const OpticalField out = propagate_dispersion(f, cfg);
            const double loss_lin = std::pow(10.0, -0.2e-3 * 50.5e3 / 10.0);
            CHECK(out.mean_power() == doctest::Approx(f.mean_power() * loss_lin).epsilon(1e-9));
        }
    }
    SUBCASE("two half spans compose into the full span") {
        LinkConfig half;
        half.fiber_len = 25e3;
        LinkConfig full;
        full.fiber_len = 50e3;
        const OpticalField twice = propagate_dispersion(propagate_dispersion(f, half), half);
        const OpticalField once = propagate_dispersion(f, full);
        double worst = 0.0, scale = 0.0;
        for (size_t i = 0; i < f.samples.size(); ++i) {
            worst = std::max(worst, std::abs(twice.samples[i] - once.samples[i]));
            scale = std::max(scale, std::abs(once.samples[i]));
        }
        CHECK(worst < 1e-9 * scale);
    }
}

TEST_CASE("noise loading hits the requested osnr") {
    LinkConfig cfg;
    const OpticalField sig = cw_field(std::pow(10.0, 0.5), 64e9, 1 << 18);

    SUBCASE("31 dB target measures back at 31") {
        const OpticalField noise = make_ase_noise(sig, 31.0, cfg, 7);
        CHECK(measure_osnr(sig, noise) == doctest::Approx(31.0).epsilon(0.0033)); // +-0.1 dB
    }
    SUBCASE("calibration holds across the 15..45 dB range") {
        for (double target : {15.0, 25.0, 35.0, 45.0}) {
            CAPTURE(target);
            const OpticalField noise = make_ase_noise(sig, target, cfg, 11);
            const double meas = measure_osnr(sig, noise);
            CHECK(std::fabs(meas - target) < 0.1);
        }
    }
    SUBCASE("twenty independent seeds all land within a tenth of a dB") {
        for (uint64_t seed = 100; seed < 120; ++seed) {
            CAPTURE(seed);
            const OpticalField noise = make_ase_noise(sig, 30.0, cfg, seed);
            CHECK(std::fabs(measure_osnr(sig, noise) - 30.0) < 0.1);
        }
    }
    SUBCASE("doubling the signal power adds 3.01 dB") {
        const OpticalField noise = make_ase_noise(sig, 30.0, cfg, 3);
        OpticalField sig2 = sig;
        for (auto& s : sig2.samples) s *= std::sqrt(2.0);
        CHECK(measure_osnr(sig2, noise) - measure_osnr(sig, noise) ==
              doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-9));
    }
    SUBCASE("no noise reads as off") {
        OpticalField silent;
        silent.rate = 64e9;
        CHECK(std::isinf(measure_osnr(sig, silent)));
        silent.samples.assign(1024, cplx{0.0, 0.0});
        CHECK(std::isinf(measure_osnr(sig, silent)));
    }
    SUBCASE("noise is reproducible per seed and distinct across seeds") {
        const OpticalField a = make_ase_noise(sig, 30.0, cfg, 42);
        const OpticalField b = make_ase_noise(sig, 30.0, cfg, 42);
        const OpticalField c = make_ase_noise(sig, 30.0, cfg, 43);
        CHECK(a.samples == b.samples);
        CHECK(a.samples != c.samples);
    }
    SUBCASE("loading adds the same realization onto the signal") {
        const OpticalField noise = make_ase_noise(sig, 28.0, cfg, 5);
        const OpticalField loaded = load_ase(sig, 28.0, cfg, 5);
        for (size_t i = 0; i < 64; ++i)
            CHECK(loaded.samples[i] == sig.samples[i] + noise.samples[i]);
    }
    SUBCASE("the demux clips noise outside its passband") {
        // the +-50 GHz filter edge only exists on a grid wider than 100 GHz
        const OpticalField wide = cw_field(2.0, 256e9, 1 << 16);
        const OpticalField noise = make_ase_noise(wide, 20.0, cfg, 9);
        const int n = static_cast<int>(noise.samples.size());
        auto spectral_mag = [&](int k) {
            cplx acc{0.0, 0.0};
            for (int i = 0; i < n; ++i)
                acc += noise.samples[i] * std::polar(1.0, -2.0 * kPi * k * i / double(n));
            return std::abs(acc) / n;
        };
        CHECK(spectral_mag(15360) < 1e-12); // 60 GHz: outside
        CHECK(spectral_mag(7680) > 1e-12);  // 30 GHz: inside
    }
}

TEST_CASE("photodetection is square-law, band-limited, ac-coupled") {
    LinkConfig cfg;

    SUBCASE("a constant field detects to silence") {
        const OpticalField f = cw_field(3.0, 64e9, 4096);
        const ElectricalWaveform out = photodetect(f, cfg);
        for (double v : out.samples) CHECK(std::fabs(v) < 1e-12);
    }
    SUBCASE("carrier plus optical tone beats down to the tone frequency") {
        const double rate = 64e9;
        const int n = 4096, k0 = 320; // 5 GHz
        OpticalField f;
        f.rate = rate;
        f.samples.resize(n);
        for (int i = 0; i < n; ++i)
            f.samples[i] = 1.0 + 0.1 * std::polar(1.0, 2.0 * kPi * k0 * i / n);
        const ElectricalWaveform out = photodetect(f, cfg);
        CHECK(bin_amp(out.samples, k0) == doctest::Approx(0.2).epsilon(1e-9));
    }
    SUBCASE("beats beyond the diode bandwidth are removed") {
        const double rate = 128e9;
        const int n = 8192;
        const int k_keep = 2880, k_cut = 3840; // 45 GHz inside, 60 GHz outside
        OpticalField f;
        f.rate = rate;
        f.samples.resize(n);
        for (int i = 0; i < n; ++i)
            f.samples[i] = 1.0 + 0.1 * std::polar(1.0, 2.0 * kPi * k_keep * i / n)
                               + 0.1 * std::polar(1.0, 2.0 * kPi * k_cut * i / n);
        const ElectricalWaveform out = photodetect(f, cfg);
        CHECK(bin_amp(out.samples, k_keep) > 0.19);
        CHECK(bin_amp(out.samples, k_cut) < 1e-12);
    }
    SUBCASE("small-signal tones fade with the dispersion cosine") {
        LinkConfig link;
        link.fiber_len = 50.5e3;
        link.loss_db_per_m = 0.0;
        link.mod_index = 0.05;
        const double rate = 64e9;
        const int n = 1 << 14;
        const double lambda = kC / link.carrier_freq;
        const double k_fade = kPi * lambda * lambda * link.dispersion * link.fiber_len / kC;

        auto tone_gain = [&](int k) {
            const ElectricalWaveform drive = tone(k * rate / n, rate, n);
            const OpticalField tx = mzm_modulate(drive, link);
            const OpticalField rxf = propagate_dispersion(tx, link);
            const ElectricalWaveform det = photodetect(rxf, link);
            return bin_amp(det.samples, k);
        };

        const int k_ref = 512; // 2 GHz: mild fading reference
        const double g_ref = tone_gain(k_ref);
        const double f_ref = k_ref * rate / n;
        for (int k : {1280, 1792}) { // 5 and 7 GHz
            CAPTURE(k);
            const double f = k * rate / n;
            const double expect =
                std::fabs(std::cos(k_fade * f * f)) / std::fabs(std::cos(k_fade * f_ref * f_ref));
            CHECK(tone_gain(k) / g_ref == doctest::Approx(expect).epsilon(0.01));
        }
    }
}

TEST_CASE("resampling preserves in-band content") {
    SUBCASE("matching rates pass through untouched") {
        ElectricalWaveform w = tone(1e9, 64e9, 1280);
        const ElectricalWaveform out = resample(w, 64e9);
        CHECK(out.samples == w.samples);
    }
    SUBCASE("capture-rate roundtrip is exact for band-limited input") {
        Rng rng(0x7e5a);
        const int n = 1280;
        ElectricalWaveform w;
        w.rate = 64e9;
        w.samples.assign(n, 0.0);
        for (int j = 0; j < 40; ++j) { // tones below 30 GHz
            const int k = 1 + static_cast<int>(rng.uniform() * 599);
            const double a = rng.uniform(), ph = 2.0 * kPi * rng.uniform();
            for (int i = 0; i < n; ++i) w.samples[i] += a * std::cos(2.0 * kPi * k * i / n + ph);
        }
        const ElectricalWaveform up = resample(w, 80e9);
        CHECK(up.samples.size() == 1600u);
        CHECK(up.rate == 80e9);
        const ElectricalWaveform back = resample(up, 64e9);
        REQUIRE(back.samples.size() == w.samples.size());
        double worst = 0.0;
        for (size_t i = 0; i < w.samples.size(); ++i)
            worst = std::max(worst, std::fabs(back.samples[i] - w.samples[i]));
        CHECK(worst < 1e-9);
    }
    SUBCASE("a 10 GHz tone keeps its amplitude across the rate change") {
        const int n = 1280, k = 200; // 10 GHz at 64 GS/s
        const ElectricalWaveform w = tone(k * 64e9 / n, 64e9, n);
        const ElectricalWaveform up = resample(w, 80e9);
        const int k_up = 200; // 10 GHz lands on bin f*n/rate = 200 again
        CHECK(bin_amp(up.samples, k_up) == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("ratios that break the sample grid are rejected") {
        ElectricalWaveform w = tone(1e9, 64e9, 1001);
        CHECK_THROWS_AS(resample(w, 80e9), config_error);
    }
}
