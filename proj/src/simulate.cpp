#include "rcext/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rcext {

Arma2D default_system() {
    Arma2D sys;
    sys.b << 0.9, -0.2, 0.05,
             0.2,  0.3, 0.05,
            -0.05, -0.05, 0.1;
    sys.a << 1.0,  0.1,  0.1,
            -0.2,  0.2, -0.1,
             0.4, -0.1, -0.2;
    return sys;
}

namespace {

std::complex<double> eval_quarter_plane(const Eigen::Matrix3d& coeff,
                                        const Eigen::VectorXd& theta) {
    std::complex<double> s = 0.0;
    for (int k1 = 0; k1 <= 2; ++k1)
        for (int k2 = 0; k2 <= 2; ++k2) {
            const double arg = -(k1 * theta[0] + k2 * theta[1]);
            s += coeff(k1, k2) * std::complex<double>(std::cos(arg), std::sin(arg));
        }
    return s;
}

}  // namespace

GridField spectrum(const Arma2D& sys, const GridSpec& grid) {
    if (grid.dim() != 2) throw std::invalid_argument("spectrum: grid must be 2-D");
    const long m = grid.node_count();
    Eigen::VectorXd out(m);
    for (long j = 0; j < m; ++j) {
        const Eigen::VectorXd theta = grid.node(j);
        const double den = std::norm(eval_quarter_plane(sys.a, theta));
        if (den < 1e-12)
            throw std::runtime_error("spectrum: denominator nearly vanishes on the grid");
        out[j] = std::norm(eval_quarter_plane(sys.b, theta)) / den;
    }
    return {grid, std::move(out)};
}

DataRecord filter_recursion(const Arma2D& sys, const DataRecord& input) {
    if (input.dim() != 2) throw std::invalid_argument("filter_recursion: input must be 2-D");
    if (sys.a(0, 0) != 1.0)
        throw std::invalid_argument("filter_recursion: a_(0,0) must be normalized to 1");
    const int n1 = input.shape()[0], n2 = input.shape()[1];
    Eigen::VectorXd y(static_cast<long>(n1) * n2);
    auto y_or_zero = [&](int t1, int t2) -> double {
        if (t1 < 0 || t2 < 0) return 0.0;
        return y[static_cast<long>(t1) * n2 + t2];
    };
    auto u_or_zero = [&](int t1, int t2) -> double {
        if (t1 < 0 || t2 < 0) return 0.0;
        return input.values()[static_cast<long>(t1) * n2 + t2].real();
    };
    for (int t1 = 0; t1 < n1; ++t1)
        for (int t2 = 0; t2 < n2; ++t2) {
            double acc = 0.0;
            for (int k1 = 0; k1 <= 2; ++k1)
                for (int k2 = 0; k2 <= 2; ++k2) {
                    acc += sys.b(k1, k2) * u_or_zero(t1 - k1, t2 - k2);
                    if (k1 != 0 || k2 != 0) acc -= sys.a(k1, k2) * y_or_zero(t1 - k1, t2 - k2);
                }
            if (!std::isfinite(acc) || std::abs(acc) > 1e12)
                throw std::runtime_error(
                    "filter_recursion: recursion for this system is unstable (value overflow)");
            y[static_cast<long>(t1) * n2 + t2] = acc;
        }
    return DataRecord::from_real({n1, n2}, y);
}

DataRecord simulate_field(const Arma2D& sys, int steps_per_axis, std::uint64_t seed) {
    if (steps_per_axis < 1) throw std::invalid_argument("simulate_field: need at least one step");
    const int n = steps_per_axis;
    detail::GaussianStream noise(seed);
    Eigen::VectorXd u(static_cast<long>(n) * n);
    for (long i = 0; i < u.size(); ++i) u[i] = noise.next();
    return filter_recursion(sys, DataRecord::from_real({n, n}, u));
}

HermitianSeq true_covariances(const Arma2D& sys, const IndexSet& set, const GridSpec& grid) {
    return moments(spectrum(sys, grid), set);
}

DataRecord trailing_window(const DataRecord& data, int size) {
    for (int a = 0; a < data.dim(); ++a)
        if (data.shape()[a] < size)
            throw std::invalid_argument("trailing_window: record smaller than the window");
    std::vector<int> shape(data.dim(), size);
    std::vector<int> t(data.dim(), 0);
    long count = 1;
    for (int a = 0; a < data.dim(); ++a) count *= size;
    Eigen::VectorXcd v(count);
    for (long idx = 0; idx < count; ++idx) {
        std::vector<int> src(data.dim());
        for (int a = 0; a < data.dim(); ++a) src[a] = data.shape()[a] - size + t[a];
        v[idx] = data.at(src);
        int a = data.dim() - 1;
        while (a >= 0 && t[a] == size - 1) { t[a] = 0; --a; }
        if (a >= 0) ++t[a];
    }
    return {std::move(shape), std::move(v)};
}

}  // namespace rcext
