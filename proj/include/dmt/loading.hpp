#ifndef DMT_LOADING_HPP
#define DMT_LOADING_HPP

#include <complex>
#include <cstdint>
#include <vector>

namespace dmt {

// Linear per-carrier SNR, index 0 = first modulated carrier.
struct SnrProfile {
    std::vector<double> snr;
};

// Bit/power allocation shared out-of-band between TX and RX.
// power[k] = 0 exactly where bits[k] = 0; over loaded carriers the powers
// sum to the number of loaded carriers.
struct LoadingTable {
    std::vector<int> bits;
    std::vector<double> power;
    long long target_bits = 0;
    double gap_db = 0.0;

    long long sum_bits() const;
    int n_loaded() const;
    int max_bits() const;
};

// uniform table helper (used by the probe and loopback tests)
LoadingTable uniform_loading(int n_carriers, int bits_per_carrier);

// Data-aided EVM estimate: SNR_k = E|X_k|^2 / E|Y_k - X_k|^2 per carrier.
// rows = symbols, cols = carriers; entries with X = 0 are skipped.
// Requires >= 32 rows; zero error power clamps at the 60 dB ceiling.
SnrProfile estimate_snr_profile(const std::vector<std::vector<std::complex<double>>>& equalized,
                                const std::vector<std::vector<std::complex<double>>>& known);

// Energy to go from b-1 to b bits on a carrier with the given linear SNR,
// under the QAM-gap model E(b) = gap * (2^b - 1) / snr.
double incremental_energy(int b, double snr, double gap_linear);

// Greedy Levin-Campello allocation: grant bits in order of least
// incremental energy until exactly target_bits are placed; ties go to the
// lowest carrier index. Throws infeasible_rate_error listing the maximum
// achievable rate when target_bits cannot be met.
LoadingTable bit_load(const SnrProfile& profile, long long target_bits, double gap_db,
                      int b_max = 7);

// Margin-equalizing power allocation over the fixed bit map, renormalized
// so the loaded powers sum to the number of loaded carriers.
void power_load(LoadingTable& table, const SnrProfile& profile);

// SNR gap for square QAM at a target pre-FEC BER, via the standard
// gap = Qinv(SER/4)^2 / 3 with SER = BER * m_reference (Gray assumption).
// Returned in dB.
double gap_from_ber(double target_ber, int m_reference = 4);

double db_to_linear(double db);
double linear_to_db(double lin);

// Levin-Campello efficiency condition: cheapest next bit costs at least as
// much as the most expensive already-granted bit releases. Used by tests.
bool is_efficient(const LoadingTable& table, const SnrProfile& profile, int b_max = 7);

} // namespace dmt

#endif // DMT_LOADING_HPP
