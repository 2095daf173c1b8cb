// Test-only oracles, kept independent of the library's computation paths:
// direct-sum Fourier coefficients, central finite differences, and random
// instances built from squared trigonometric polynomials.
#ifndef RCEXT_TESTS_ORACLES_HPP
#define RCEXT_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "rcext/grid.hpp"
#include "rcext/sequence.hpp"

namespace oracles {

// (1/M) sum_j f_j e^{i(k,theta_j)} summed node by node with std::polar,
// no FFT involved
inline std::complex<double> naive_fourier_coefficient(const rcext::GridField& f,
                                                      const std::vector<int>& k) {
    std::complex<double> acc = 0.0;
    const rcext::GridSpec& g = f.grid();
    for (long j = 0; j < g.node_count(); ++j) {
        const Eigen::VectorXd theta = g.node(j);
        double arg = 0.0;
        for (int a = 0; a < g.dim(); ++a) arg += k[a] * theta[a];
        acc += f.values()[j] * std::polar(1.0, arg);
    }
    return acc / static_cast<double>(g.node_count());
}

// P(theta) as an inner product against the exponential sequence at theta
inline double poly_by_inner_product(const rcext::HermitianSeq& p, const Eigen::VectorXd& theta) {
    const rcext::IndexSet& set = p.index_set();
    std::complex<double> acc = 0.0;
    for (int i = 0; i < set.size(); ++i) {
        double arg = 0.0;
        for (int a = 0; a < set.dim(); ++a) arg += set.exponent(i)[a] * theta[a];
        acc += p[i] * std::conj(std::polar(1.0, arg));
    }
    return acc.real();
}

inline Eigen::VectorXd central_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double h) {
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

inline Eigen::MatrixXd central_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double h) {
    Eigen::MatrixXd j;
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const Eigen::VectorXd col = (f(xp) - f(xm)) / (2.0 * h);
        if (j.size() == 0) j.resize(col.size(), x.size());
        j.col(i) = col;
    }
    return j;
}

// coefficients of |H|^2 for H(theta) = sum_{t in [0,r]^d} h_t e^{-i(t,theta)},
// by direct convolution; the result lives on the box index set of radius r
inline rcext::HermitianSeq squared_polynomial(const std::vector<int>& radii,
                                              std::mt19937_64& rng) {
    const int d = static_cast<int>(radii.size());
    const rcext::IndexSet set = rcext::IndexSet::box(radii);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // enumerate the causal support [0, r]^d
    std::vector<std::vector<int>> supp;
    std::vector<int> t(d, 0);
    while (true) {
        supp.push_back(t);
        int a = d - 1;
        while (a >= 0 && t[a] == radii[a]) { t[a] = 0; --a; }
        if (a < 0) break;
        ++t[a];
    }
    std::vector<std::complex<double>> h(supp.size());
    for (auto& z : h) z = {u(rng), u(rng)};

    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(set.size());
    for (size_t i = 0; i < supp.size(); ++i)
        for (size_t j = 0; j < supp.size(); ++j) {
            std::vector<int> diff(d);
            for (int a = 0; a < d; ++a) diff[a] = supp[i][a] - supp[j][a];
            out[set.find(diff)] += h[i] * std::conj(h[j]);
        }
    return {set, std::move(out)};
}

// strictly positive random polynomial: |H|^2 plus a positive floor on the mean
inline rcext::HermitianSeq random_positive_poly(const std::vector<int>& radii,
                                                std::mt19937_64& rng, double floor = 0.1) {
    rcext::HermitianSeq p = squared_polynomial(radii, rng);
    Eigen::VectorXcd v = p.values();
    v[p.index_set().zero_index()] += floor;
    return {p.index_set(), std::move(v)};
}

}  // namespace oracles

#endif
