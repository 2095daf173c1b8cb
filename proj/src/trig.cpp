#include "rcext/trig.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace rcext {

double inner_product(const HermitianSeq& a, const HermitianSeq& b) {
    require_same_set(a, b, "inner_product");
    const std::complex<double> s = (b.values().adjoint() * a.values()).value();
    const double scale = a.norm2() * b.norm2();
    if (std::abs(s.imag()) > 1e-9 * (scale > 0 ? scale : 1.0))
        throw std::runtime_error("inner_product: imaginary residual signals corrupted symmetry");
    return s.real();
}

double eval_poly(const HermitianSeq& p, const Eigen::VectorXd& theta) {
    const IndexSet& set = p.index_set();
    if (theta.size() != set.dim())
        throw std::invalid_argument("eval_poly: wrong theta dimension");
    std::complex<double> s = 0.0;
    for (int i = 0; i < set.size(); ++i) {
        double arg = 0.0;
        for (int a = 0; a < set.dim(); ++a) arg -= set.exponent(i)[a] * theta[a];
        s += p[i] * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    const double scale = std::max(std::abs(s.real()), p.norm2());
    if (std::abs(s.imag()) > 1e-9 * (scale > 0 ? scale : 1.0))
        throw std::runtime_error("eval_poly: imaginary residual signals corrupted symmetry");
    return s.real();
}

Eigen::VectorXd eval_poly_gradient(const HermitianSeq& p, const Eigen::VectorXd& theta) {
    const IndexSet& set = p.index_set();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(set.dim());
    // d/dtheta_a sum_k p_k e^{-i(k,theta)} = sum_k k_a Im(p_k e^{-i(k,theta)})
    for (int i = 0; i < set.size(); ++i) {
        double arg = 0.0;
        for (int a = 0; a < set.dim(); ++a) arg -= set.exponent(i)[a] * theta[a];
        const std::complex<double> term =
            p[i] * std::complex<double>(std::cos(arg), std::sin(arg));
        for (int a = 0; a < set.dim(); ++a)
            g[a] += set.exponent(i)[a] * term.imag();
    }
    return g;
}

Eigen::MatrixXd eval_poly_hessian(const HermitianSeq& p, const Eigen::VectorXd& theta) {
    const IndexSet& set = p.index_set();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(set.dim(), set.dim());
    for (int i = 0; i < set.size(); ++i) {
        double arg = 0.0;
        for (int a = 0; a < set.dim(); ++a) arg -= set.exponent(i)[a] * theta[a];
        const std::complex<double> term =
            p[i] * std::complex<double>(std::cos(arg), std::sin(arg));
        for (int a = 0; a < set.dim(); ++a)
            for (int b = 0; b < set.dim(); ++b)
                h(a, b) -= set.exponent(i)[a] * set.exponent(i)[b] * term.real();
    }
    return h;
}

ConeLocation cone_test_toeplitz_1d(const HermitianSeq& c) {
    const IndexSet& set = c.index_set();
    if (set.dim() != 1 || !set.is_box())
        throw std::invalid_argument("cone_test_toeplitz_1d: requires a 1-D box index set");
    const int n = set.max_abs(0);
    Eigen::MatrixXcd t(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) t(i, j) = c.at({i - j});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double scale = c.norm_inf();
    const double tol = 1e-10 * (scale > 0 ? scale : 1.0);
    if (lo > tol) return ConeLocation::interior;
    if (lo < -tol) return ConeLocation::outside;
    return ConeLocation::boundary;
}

PositivityReport grid_positivity_test(const HermitianSeq& p, const GridSpec& grid) {
    const GridField f = synthesize(p, grid);
    long jmin = 0;
    const double lo = f.values().minCoeff(&jmin);
    const double scale = f.values().cwiseAbs().maxCoeff();
    const double tol = 1e-10 * (scale > 0 ? scale : 1.0);
    PositivityReport rep;
    rep.min_value = lo;
    rep.argmin = grid.node(jmin);
    if (lo > tol)
        rep.kind = Positivity::strictly_positive;
    else if (lo < -tol)
        rep.kind = Positivity::negative_somewhere;
    else
        rep.kind = Positivity::nonnegative_with_zeros;
    return rep;
}

}  // namespace rcext
