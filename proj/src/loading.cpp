#include "dmt/loading.hpp"

#include "dmt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace dmt {

namespace {
constexpr double kSnrClamp = 1e6; // 60 dB ceiling for noiseless runs
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

long long LoadingTable::sum_bits() const {
    return std::accumulate(bits.begin(), bits.end(), 0LL);
}

int LoadingTable::n_loaded() const {
    return static_cast<int>(std::count_if(bits.begin(), bits.end(), [](int b) { return b > 0; }));
}

int LoadingTable::max_bits() const {
    return bits.empty() ? 0 : *std::max_element(bits.begin(), bits.end());
}

LoadingTable uniform_loading(int n_carriers, int bits_per_carrier) {
    LoadingTable t;
    t.bits.assign(n_carriers, bits_per_carrier);
    t.power.assign(n_carriers, 1.0);
    t.target_bits = static_cast<long long>(n_carriers) * bits_per_carrier;
    return t;
}

SnrProfile estimate_snr_profile(const std::vector<std::vector<std::complex<double>>>& equalized,
                                const std::vector<std::vector<std::complex<double>>>& known) {
    if (equalized.size() != known.size() || equalized.empty())
        throw framing_error("estimate_snr_profile: row count mismatch");
    if (equalized.size() < 32)
        throw config_error("estimate_snr_profile: need >= 32 probe symbols per carrier");
    const size_t n = equalized.front().size();
    std::vector<double> num(n, 0.0), den(n, 0.0);
    for (size_t t = 0; t < equalized.size(); ++t) {
        if (equalized[t].size() != n || known[t].size() != n)
            throw framing_error("estimate_snr_profile: column count mismatch");
        for (size_t k = 0; k < n; ++k) {
            const auto x = known[t][k];
            if (std::norm(x) == 0.0) continue;
            num[k] += std::norm(x);
            den[k] += std::norm(equalized[t][k] - x);
        }
    }
    SnrProfile p;
    p.snr.resize(n);
    for (size_t k = 0; k < n; ++k) {
        if (num[k] == 0.0) { p.snr[k] = 0.0; continue; }
        p.snr[k] = den[k] > 0.0 ? std::min(num[k] / den[k], kSnrClamp) : kSnrClamp;
    }
    return p;
}

double incremental_energy(int b, double snr, double gap_linear) {
    if (b < 1) throw config_error("incremental_energy: b must be >= 1");
    if (snr <= 0.0) return std::numeric_limits<double>::infinity();
    return gap_linear * std::ldexp(1.0, b - 1) / snr;
}

LoadingTable bit_load(const SnrProfile& profile, long long target_bits, double gap_db, int b_max) {
    const int n = static_cast<int>(profile.snr.size());
    if (n == 0) throw config_error("bit_load: empty SNR profile");
    if (b_max < 1 || b_max > 7) throw config_error("bit_load: b_max must be in 1..7");
    const double gap = db_to_linear(gap_db);

    long long max_achievable = 0;
    for (double s : profile.snr)
        if (s > 0.0) max_achievable += b_max;
    if (target_bits > max_achievable)
        throw infeasible_rate_error("bit_load: target " + std::to_string(target_bits) +
                                        " bits/symbol infeasible, max achievable " +
                                        std::to_string(max_achievable),
                                    max_achievable);

    struct Cand {
        double cost;
        int idx;
    };
    // min-heap ordered by (cost, carrier index) -> deterministic ties
    auto cmp = [](const Cand& a, const Cand& b) {
        if (a.cost != b.cost) return a.cost > b.cost;
        return a.idx > b.idx;
    };
    std::priority_queue<Cand, std::vector<Cand>, decltype(cmp)> heap(cmp);

    LoadingTable t;
    t.bits.assign(n, 0);
    t.power.assign(n, 0.0);
    t.target_bits = target_bits;
    t.gap_db = gap_db;

    for (int k = 0; k < n; ++k) {
        const double c = incremental_energy(1, profile.snr[k], gap);
        if (std::isfinite(c)) heap.push({c, k});
    }
    for (long long granted = 0; granted < target_bits; ++granted) {
        const Cand c = heap.top();
        heap.pop();
        const int b = ++t.bits[c.idx];
        if (b < b_max) heap.push({incremental_energy(b + 1, profile.snr[c.idx], gap), c.idx});
    }
    return t;
}

void power_load(LoadingTable& table, const SnrProfile& profile) {
    if (table.bits.size() != profile.snr.size())
        throw config_error("power_load: table/profile size mismatch");
    const double gap = db_to_linear(table.gap_db);
    const int n = static_cast<int>(table.bits.size());
    double total = 0.0;
    int loaded = 0;
    for (int k = 0; k < n; ++k) {
        if (table.bits[k] == 0) { table.power[k] = 0.0; continue; }
        // equal post-equalization margin: each carrier gets the energy its
        // order requires at its measured SNR
        table.power[k] = gap * (std::ldexp(1.0, table.bits[k]) - 1.0) / profile.snr[k];
        total += table.power[k];
        ++loaded;
    }
    if (loaded == 0 || total <= 0.0) return;
    const double scale = static_cast<double>(loaded) / total;
    for (int k = 0; k < n; ++k) table.power[k] *= scale;
}

double gap_from_ber(double target_ber, int m_reference) {
    if (!(target_ber > 0.0 && target_ber < 0.5))
        throw config_error("gap_from_ber: target_ber must be in (0, 0.5)");
    if (m_reference < 1) throw config_error("gap_from_ber: m_reference must be >= 1");
    const double ser = std::min(target_ber * m_reference, 0.5);
    const double arg = ser / 4.0;
    // Qinv via bisection on Q(x) = erfc(x/sqrt(2))/2 — monotone, exact enough
    double lo = 0.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double q = 0.5 * std::erfc(mid / std::sqrt(2.0));
        (q > arg ? lo : hi) = mid;
    }
    const double qinv = 0.5 * (lo + hi);
    return linear_to_db(qinv * qinv / 3.0);
}

bool is_efficient(const LoadingTable& table, const SnrProfile& profile, int b_max) {
    const double gap = db_to_linear(table.gap_db);
    double max_release = 0.0;
    double min_add = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < table.bits.size(); ++k) {
        const int b = table.bits[k];
        if (b > 0) max_release = std::max(max_release, incremental_energy(b, profile.snr[k], gap));
        if (b < b_max) min_add = std::min(min_add, incremental_energy(b + 1, profile.snr[k], gap));
    }
    return max_release <= min_add + 1e-12 * std::max(1.0, max_release);
}

} // namespace dmt
