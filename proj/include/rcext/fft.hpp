#ifndef RCEXT_FFT_HPP
#define RCEXT_FFT_HPP

#include <complex>
#include <vector>

namespace rcext::detail {

/// In-place n-dimensional complex DFT, row-major layout.
/// forward: X_j = sum_t x_t exp(-2*pi*i (t,j)/N); backward uses +i and no scaling.
/// Plan creation is serialized internally; execution is thread-safe.
void fft(const std::vector<int>& shape, std::complex<double>* data, bool forward);

}  // namespace rcext::detail

#endif
