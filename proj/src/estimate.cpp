#include "rcext/estimate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rcext/fft.hpp"

namespace rcext {

namespace {

long flat_index(const std::vector<int>& t, const std::vector<int>& shape) {
    long flat = 0;
    for (size_t a = 0; a < shape.size(); ++a) flat = flat * shape[a] + t[a];
    return flat;
}

// sum over t with t and t+k both inside Z^d_N of y_{t+k} * conj(y_t)
std::complex<double> lag_product_sum(const DataRecord& y, const std::vector<int>& k) {
    const int d = y.dim();
    std::vector<int> lo(d), hi(d), t(d);
    for (int a = 0; a < d; ++a) {
        lo[a] = std::max(0, -k[a]);
        hi[a] = std::min(y.shape()[a] - 1, y.shape()[a] - 1 - k[a]);
        if (lo[a] > hi[a]) return 0.0;
        t[a] = lo[a];
    }
    std::complex<double> s = 0.0;
    std::vector<int> tk(d);
    while (true) {
        for (int a = 0; a < d; ++a) tk[a] = t[a] + k[a];
        s += y.values()[flat_index(tk, y.shape())] *
             std::conj(y.values()[flat_index(t, y.shape())]);
        int a = d - 1;
        while (a >= 0 && t[a] == hi[a]) { t[a] = lo[a]; --a; }
        if (a < 0) break;
        ++t[a];
    }
    return s;
}

}  // namespace

DataRecord::DataRecord(std::vector<int> shape, Eigen::VectorXcd values)
    : shape_(std::move(shape)), v_(std::move(values)) {
    if (shape_.empty()) throw std::invalid_argument("DataRecord: empty shape");
    long count = 1;
    for (int n : shape_) {
        if (n < 1) throw std::invalid_argument("DataRecord: nonpositive axis length");
        count *= n;
    }
    if (v_.size() != count)
        throw std::invalid_argument("DataRecord: value count does not match shape");
}

DataRecord DataRecord::from_real(std::vector<int> shape, const Eigen::VectorXd& values) {
    return {std::move(shape), values.cast<std::complex<double>>()};
}

std::complex<double> DataRecord::at(const std::vector<int>& t) const {
    for (int a = 0; a < dim(); ++a)
        if (t[a] < 0 || t[a] >= shape_[a]) return 0.0;
    return v_[flat_index(t, shape_)];
}

HermitianSeq biased_cov(const DataRecord& data, const IndexSet& set) {
    if (set.dim() != data.dim())
        throw std::invalid_argument("biased_cov: dimension mismatch");
    for (int a = 0; a < set.dim(); ++a)
        if (data.shape()[a] <= set.max_abs(a))
            throw std::invalid_argument("biased_cov: record shorter than the index set span");
    Eigen::VectorXcd out(set.size());
    for (int i = 0; i < set.size(); ++i)
        out[i] = lag_product_sum(data, set.exponent(i)) / static_cast<double>(data.count());
    return {set, std::move(out)};
}

HermitianSeq unbiased_cov(const DataRecord& data, const IndexSet& set) {
    if (set.dim() != data.dim())
        throw std::invalid_argument("unbiased_cov: dimension mismatch");
    Eigen::VectorXcd out(set.size());
    for (int i = 0; i < set.size(); ++i) {
        const auto& k = set.exponent(i);
        double divisor = 1.0;
        for (int a = 0; a < set.dim(); ++a) {
            const int m = data.shape()[a] - std::abs(k[a]);
            if (m <= 0)
                throw std::invalid_argument("unbiased_cov: zero divisor (|k_j| >= N_j)");
            divisor *= m;
        }
        out[i] = lag_product_sum(data, k) / divisor;
    }
    return {set, std::move(out)};
}

GridField periodogram(const DataRecord& data, const GridSpec& grid) {
    if (grid.dim() != data.dim())
        throw std::invalid_argument("periodogram: dimension mismatch");
    const long m = grid.node_count();
    Eigen::VectorXd out(m);
    bool pad_ok = true;
    for (int a = 0; a < data.dim(); ++a)
        if (grid.shape()[a] < data.shape()[a]) pad_ok = false;

    if (pad_ok) {
        // zero-pad the record into the grid and transform
        std::vector<std::complex<double>> buf(m, 0.0);
        const int d = data.dim();
        std::vector<int> t(d, 0);
        const double s = grid.offset() ? 0.5 : 0.0;
        for (long idx = 0; idx < data.count(); ++idx) {
            double arg = 0.0;
            for (int a = 0; a < d; ++a)
                arg += 2.0 * std::numbers::pi * s * t[a] / grid.shape()[a];
            buf[flat_index(t, grid.shape())] =
                data.values()[idx] * std::complex<double>(std::cos(arg), std::sin(arg));
            int a = d - 1;
            while (a >= 0 && t[a] == data.shape()[a] - 1) { t[a] = 0; --a; }
            if (a >= 0) ++t[a];
        }
        detail::fft(grid.shape(), buf.data(), false);
        for (long j = 0; j < m; ++j) out[j] = std::norm(buf[j]) / data.count();
    } else {
        // grid coarser than the record: evaluate the transform directly
        const int d = data.dim();
        for (long j = 0; j < m; ++j) {
            const Eigen::VectorXd theta = grid.node(j);
            std::complex<double> acc = 0.0;
            std::vector<int> t(d, 0);
            for (long idx = 0; idx < data.count(); ++idx) {
                double arg = 0.0;
                for (int a = 0; a < d; ++a) arg += t[a] * theta[a];
                acc += data.values()[idx] * std::complex<double>(std::cos(arg), std::sin(arg));
                int a = d - 1;
                while (a >= 0 && t[a] == data.shape()[a] - 1) { t[a] = 0; --a; }
                if (a >= 0) ++t[a];
            }
            out[j] = std::norm(acc) / data.count();
        }
    }
    return {grid, std::move(out)};
}

}  // namespace rcext
