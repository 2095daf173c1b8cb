#include "rcext/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace rcext::detail {

namespace {
std::mutex plan_mutex;
}

void fft(const std::vector<int>& shape, std::complex<double>* data, bool forward) {
    if (shape.empty()) throw std::invalid_argument("fft: empty shape");
    for (int n : shape)
        if (n < 1) throw std::invalid_argument("fft: nonpositive axis length");
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf, buf,
                             forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft: plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
}

}  // namespace rcext::detail
