#ifndef RCEXT_TRIG_HPP
#define RCEXT_TRIG_HPP

#include <Eigen/Core>

#include "rcext/grid.hpp"
#include "rcext/sequence.hpp"

namespace rcext {

/// <a,b> = sum_k a_k conj(b_k). Real for conjugate-symmetric sequences; the
/// imaginary residual is checked against 1e-9*||a||*||b|| and discarded.
double inner_product(const HermitianSeq& a, const HermitianSeq& b);

/// P(e^{i theta}) = sum_k p_k e^{-i(k,theta)}, real part after the same
/// residual guard.
double eval_poly(const HermitianSeq& p, const Eigen::VectorXd& theta);

/// Gradient and Hessian of theta -> P(e^{i theta}), for polishing extrema.
Eigen::VectorXd eval_poly_gradient(const HermitianSeq& p, const Eigen::VectorXd& theta);
Eigen::MatrixXd eval_poly_hessian(const HermitianSeq& p, const Eigen::VectorXd& theta);

enum class ConeLocation { interior, boundary, outside };

/// d = 1 cone membership via the minimum eigenvalue of the (n+1)x(n+1)
/// Toeplitz matrix of (c_0..c_n). Requires a 1-D box index set.
ConeLocation cone_test_toeplitz_1d(const HermitianSeq& c);

enum class Positivity { strictly_positive, nonnegative_with_zeros, negative_somewhere };

struct PositivityReport {
    Positivity kind;
    double min_value;
    Eigen::VectorXd argmin;
};

/// Classifies min over the grid of P against 1e-10 * max|P|. A grid surrogate
/// only; no certificate between nodes.
PositivityReport grid_positivity_test(const HermitianSeq& p, const GridSpec& grid);

}  // namespace rcext

#endif
