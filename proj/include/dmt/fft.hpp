#ifndef DMT_FFT_HPP
#define DMT_FFT_HPP

#include <complex>
#include <vector>

namespace dmt::fft {

using cvec = std::vector<std::complex<double>>;

// Unitary DFT pair: both directions scale by 1/sqrt(n), so Parseval holds
// exactly and power accounting is transform-independent.
void forward_inplace(cvec& x);
void inverse_inplace(cvec& x);

cvec forward(cvec x);
cvec inverse(cvec x);

} // namespace dmt::fft

#endif // DMT_FFT_HPP
