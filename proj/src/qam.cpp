#include "dmt/qam.hpp"

#include "dmt/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace dmt {

namespace {

uint32_t gray_decode(uint32_t g) {
    uint32_t b = g;
    while (g >>= 1) b ^= g;
    return b;
}

// axis value for the m_axis-bit field: top bit = sign, low bits Gray-index
// the odd levels 1,3,5,...
double axis_value(uint32_t field, int m_axis) {
    const uint32_t sign = field >> (m_axis - 1);
    const uint32_t mag = field & ((1u << (m_axis - 1)) - 1u);
    const uint32_t idx = gray_decode(mag);
    const double level = 2.0 * idx + 1.0;
    return sign ? -level : level;
}

// first-quadrant points of the cross shape, ordered along a serpentine
// path (row by row in imag, alternating real direction) so consecutive
// path entries are spatial neighbors.
std::vector<std::complex<double>> cross_quadrant_path(int m) {
    // grid of odd levels with the far corner block removed
    int side = 0, corner = 0; // levels per axis, corner cut per axis
    if (m == 3) { side = 2; corner = 0; }      // 4x2 rectangle, nothing cut
    else if (m == 5) { side = 3; corner = 1; } // 6x6 minus 2x2 total corners
    else { side = 6; corner = 2; }             // 12x12 minus 4x4 total corners
    std::vector<std::vector<double>> rows; // row = fixed imag, list of real levels
    std::vector<double> imag_levels;
    int n_rows = (m == 3) ? 1 : side;
    for (int r = 0; r < n_rows; ++r) {
        const double im = 2.0 * r + 1.0;
        const bool cut = corner > 0 && r >= side - corner;
        const int ncols = cut ? side - corner : side;
        std::vector<double> cols;
        for (int c = 0; c < ncols; ++c) cols.push_back(2.0 * c + 1.0);
        rows.push_back(std::move(cols));
        imag_levels.push_back(im);
    }
    std::vector<std::complex<double>> path;
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto& cols = rows[r];
        if (r % 2 == 0)
            for (size_t c = 0; c < cols.size(); ++c) path.emplace_back(cols[c], imag_levels[r]);
        else
            for (size_t c = cols.size(); c-- > 0;) path.emplace_back(cols[c], imag_levels[r]);
    }
    return path;
}

Constellation make(int m) {
    Constellation cs;
    cs.m = m;
    const uint32_t n = 1u << m;
    cs.points.resize(n);
    if (m == 1) {
        cs.points[0] = {1.0, 0.0};
        cs.points[1] = {-1.0, 0.0};
        return cs;
    }
    if (m % 2 == 0) {
        const int ma = m / 2;
        for (uint32_t label = 0; label < n; ++label) {
            const uint32_t re_f = label >> ma;
            const uint32_t im_f = label & ((1u << ma) - 1u);
            cs.points[label] = {axis_value(re_f, ma), axis_value(im_f, ma)};
        }
    } else {
        const auto path = cross_quadrant_path(m);
        for (uint32_t label = 0; label < n; ++label) {
            const bool re_neg = (label >> (m - 1)) & 1u;
            const bool im_neg = (label >> (m - 2)) & 1u;
            const uint32_t low = label & ((1u << (m - 2)) - 1u);
            std::complex<double> p = path[gray_decode(low)];
            cs.points[label] = {re_neg ? -p.real() : p.real(),
                                im_neg ? -p.imag() : p.imag()};
        }
    }
    double energy = 0.0;
    for (const auto& p : cs.points) energy += std::norm(p);
    energy /= static_cast<double>(n);
    const double s = 1.0 / std::sqrt(energy);
    for (auto& p : cs.points) p *= s;
    return cs;
}

} // namespace

const Constellation& build_constellation(int m) {
    if (m < 1 || m > 7) throw config_error("constellation order must be in 1..7, got " + std::to_string(m));
    static const std::array<Constellation, 7> tables = [] {
        std::array<Constellation, 7> t;
        for (int i = 0; i < 7; ++i) t[i] = make(i + 1);
        return t;
    }();
    return tables[m - 1];
}

std::complex<double> map_bits(const uint8_t* bits, int m) {
    const auto& cs = build_constellation(m);
    uint32_t label = 0;
    for (int i = 0; i < m; ++i) {
        if (bits[i] > 1) throw framing_error("map_bits: input is not a bit");
        label = (label << 1) | bits[i];
    }
    return cs.points[label];
}

uint32_t demap_label(std::complex<double> p, int m) {
    const auto& cs = build_constellation(m);
    uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (uint32_t label = 0; label < cs.points.size(); ++label) {
        const double d = std::norm(p - cs.points[label]);
        if (d < best_d) { // strict: ties keep the smallest label
            best_d = d;
            best = label;
        }
    }
    return best;
}

void demap_hard(std::complex<double> p, int m, uint8_t* out) {
    const uint32_t label = demap_label(p, m);
    for (int i = 0; i < m; ++i) out[i] = static_cast<uint8_t>((label >> (m - 1 - i)) & 1u);
}

} // namespace dmt
