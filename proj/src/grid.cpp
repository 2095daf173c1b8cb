#include "rcext/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rcext/fft.hpp"

namespace rcext {

namespace {

long wrap_flat_index(const std::vector<int>& k, const std::vector<int>& shape) {
    long flat = 0;
    for (size_t a = 0; a < shape.size(); ++a) {
        int m = k[a] % shape[a];
        if (m < 0) m += shape[a];
        flat = flat * shape[a] + m;
    }
    return flat;
}

// exp(+2*pi*i * s * sum k_a / N_a) with s the half-sample shift
std::complex<double> offset_phase(const std::vector<int>& k, const GridSpec& grid) {
    if (!grid.offset()) return {1.0, 0.0};
    double arg = 0.0;
    for (int a = 0; a < grid.dim(); ++a)
        arg += std::numbers::pi * static_cast<double>(k[a]) / grid.shape()[a];
    return {std::cos(arg), std::sin(arg)};
}

}  // namespace

GridSpec::GridSpec(std::vector<int> points_per_axis, bool offset)
    : shape_(std::move(points_per_axis)), offset_(offset) {
    if (shape_.empty()) throw std::invalid_argument("GridSpec: empty shape");
    count_ = 1;
    for (int n : shape_) {
        if (n < 1) throw std::invalid_argument("GridSpec: axis needs at least one point");
        count_ *= n;
    }
}

Eigen::VectorXd GridSpec::node(long flat) const {
    Eigen::VectorXd theta(dim());
    const double s = offset_ ? 0.5 : 0.0;
    for (int a = dim() - 1; a >= 0; --a) {
        const long j = flat % shape_[a];
        flat /= shape_[a];
        theta[a] = 2.0 * std::numbers::pi * (static_cast<double>(j) + s) / shape_[a];
    }
    return theta;
}

bool GridSpec::resolves(const IndexSet& set) const {
    if (set.dim() != dim()) return false;
    for (int a = 0; a < dim(); ++a)
        if (shape_[a] < 2 * set.max_abs(a) + 1) return false;
    return true;
}

void GridSpec::require_resolves(const IndexSet& set, const char* where) const {
    if (!resolves(set))
        throw std::invalid_argument(std::string(where) +
                                    ": grid too coarse for the index set (need N >= 2*max|k|+1)");
}

GridField::GridField(GridSpec grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_.node_count())
        throw std::invalid_argument("GridField: value count does not match grid");
    if (!v_.allFinite()) throw std::invalid_argument("GridField: non-finite value");
}

GridField synthesize(const HermitianSeq& p, const GridSpec& grid) {
    grid.require_resolves(p.index_set(), "synthesize");
    const long m = grid.node_count();
    std::vector<std::complex<double>> buf(m, 0.0);
    const IndexSet& set = p.index_set();
    for (int i = 0; i < set.size(); ++i) {
        // P(theta_j) = sum_k p_k e^{-i(k,theta_j)}; placing p_k at the wrapped
        // index and running a forward DFT evaluates exactly that, with the
        // half-sample shift folded into a per-coefficient phase.
        const auto& k = set.exponent(i);
        buf[wrap_flat_index(k, grid.shape())] += p[i] * std::conj(offset_phase(k, grid));
    }
    detail::fft(grid.shape(), buf.data(), true);
    Eigen::VectorXd out(m);
    double imag_max = 0.0, scale = 0.0;
    for (long j = 0; j < m; ++j) {
        out[j] = buf[j].real();
        imag_max = std::max(imag_max, std::abs(buf[j].imag()));
        scale = std::max(scale, std::abs(buf[j].real()));
    }
    if (imag_max > 1e-9 * (scale > 0 ? scale : 1.0))
        throw std::runtime_error("synthesize: imaginary residual above tolerance");
    return {grid, std::move(out)};
}

HermitianSeq fourier_coefficients(const GridField& field, const IndexSet& set) {
    const GridSpec& grid = field.grid();
    grid.require_resolves(set, "fourier_coefficients");
    const long m = grid.node_count();
    std::vector<std::complex<double>> buf(m);
    for (long j = 0; j < m; ++j) buf[j] = field.values()[j];
    detail::fft(grid.shape(), buf.data(), false);
    Eigen::VectorXcd out(set.size());
    for (int i = 0; i < set.size(); ++i) {
        const auto& k = set.exponent(i);
        out[i] = offset_phase(k, grid) * buf[wrap_flat_index(k, grid.shape())] /
                 static_cast<double>(m);
    }
    return {set, std::move(out)};
}

HermitianSeq moments(const GridField& field, const IndexSet& set) {
    const double scale = field.values().cwiseAbs().maxCoeff();
    if (field.min() < -1e-10 * (scale > 0 ? scale : 1.0))
        throw std::invalid_argument("moments: field has negative values");
    return fourier_coefficients(field, set);
}

double entropy_like_integral(const GridField& pfield, const GridField& qfield) {
    if (pfield.grid() != qfield.grid())
        throw std::invalid_argument("entropy_like_integral: mismatched grids");
    if (qfield.min() <= 0.0)
        throw std::invalid_argument("entropy_like_integral: Q must be strictly positive");
    return (pfield.values().array() * qfield.values().array().log()).sum() /
           static_cast<double>(pfield.grid().node_count());
}

}  // namespace rcext
