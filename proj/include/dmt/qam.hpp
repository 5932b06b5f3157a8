#ifndef DMT_QAM_HPP
#define DMT_QAM_HPP

#include <complex>
#include <cstdint>
#include <vector>

namespace dmt {

// Unit-energy Gray-labeled constellation; points[label] is the symbol for
// that label (labels read MSB-first from the bit stream).
//
// Conventions:
//  - even m: square grid, per-axis Gray code. Each axis takes m/2 bits:
//    top bit is the sign (0 -> positive), remaining bits Gray-index the
//    odd levels 1,3,5,... Real axis bits come first in the label.
//  - m = 1: BPSK {+1, -1}.
//  - odd m >= 3: cross shape (rectangular grid, corners removed).
//    Top two bits select the quadrant (real sign, imag sign); the low
//    m-2 bits Gray-index a serpentine path through the first-quadrant
//    points, so path neighbors differ in one bit (near-Gray; a perfect
//    Gray labeling does not exist for cross shapes).
struct Constellation {
    int m = 0;
    std::vector<std::complex<double>> points;
};

// m in 1..=7; cached, safe to call repeatedly.
const Constellation& build_constellation(int m);

// bits: exactly m entries of 0/1, MSB first.
std::complex<double> map_bits(const uint8_t* bits, int m);

// Nearest point by Euclidean distance; ties go to the smallest label
// (labels are scanned in ascending order with a strict < test).
// Writes m bits MSB-first into out.
void demap_hard(std::complex<double> p, int m, uint8_t* out);
uint32_t demap_label(std::complex<double> p, int m);

} // namespace dmt

#endif // DMT_QAM_HPP
