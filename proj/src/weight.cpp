#include "rcext/weight.hpp"

#include <cmath>
#include <stdexcept>

namespace rcext {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;

// Columns of the isometric embedding of the real chart into C^n.
Eigen::MatrixXcd chart_embedding(const IndexSet& set) {
    const int n = set.size();
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, n);
    v(set.zero_index(), 0) = 1.0;
    int a = 1;
    for (int i : set.pair_representatives()) {
        const int j = set.conjugate_index(i);
        v(i, a) = 1.0 / kSqrt2;
        v(j, a) = 1.0 / kSqrt2;
        v(i, a + 1) = std::complex<double>(0.0, 1.0 / kSqrt2);
        v(j, a + 1) = std::complex<double>(0.0, -1.0 / kSqrt2);
        a += 2;
    }
    return v;
}
}  // namespace

WeightMatrix::WeightMatrix(IndexSet set, Eigen::MatrixXcd w) : set_(std::move(set)), w_(std::move(w)) {
    const int n = set_.size();
    if (w_.rows() != n || w_.cols() != n)
        throw std::invalid_argument("WeightMatrix: size does not match index set");
    const double scale = w_.cwiseAbs().maxCoeff();
    const double tol = 1e-9 * (scale > 0 ? scale : 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (std::abs(w_(i, j) - std::conj(w_(j, i))) > tol)
                throw std::invalid_argument("WeightMatrix: not Hermitian");
            const int ci = set_.conjugate_index(i), cj = set_.conjugate_index(j);
            if (std::abs(w_(ci, cj) - std::conj(w_(i, j))) > tol)
                throw std::invalid_argument(
                    "WeightMatrix: does not preserve conjugate symmetry of sequences");
        }
    // enforce both symmetries exactly
    w_ = 0.5 * (w_ + w_.adjoint().eval());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int ci = set_.conjugate_index(i), cj = set_.conjugate_index(j);
            if (std::make_pair(i, j) < std::make_pair(ci, cj)) {
                const std::complex<double> m = 0.5 * (w_(i, j) + std::conj(w_(ci, cj)));
                w_(i, j) = m;
                w_(ci, cj) = std::conj(m);
            }
        }
    llt_.compute(w_);
    if (llt_.info() != Eigen::Success)
        throw std::invalid_argument("WeightMatrix: not positive definite");
    const Eigen::MatrixXcd v = chart_embedding(set_);
    real_form_ = (v.adjoint() * w_ * v).real();
    real_form_ = 0.5 * (real_form_ + real_form_.transpose().eval());
}

WeightMatrix WeightMatrix::scalar(const IndexSet& set, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("WeightMatrix::scalar: lambda must be positive");
    return {set, lambda * Eigen::MatrixXcd::Identity(set.size(), set.size())};
}

HermitianSeq WeightMatrix::apply(const HermitianSeq& x) const {
    if (x.index_set() != set_)
        throw std::invalid_argument("WeightMatrix::apply: mismatched index sets");
    return {set_, w_ * x.values()};
}

HermitianSeq WeightMatrix::solve(const HermitianSeq& x) const {
    if (x.index_set() != set_)
        throw std::invalid_argument("WeightMatrix::solve: mismatched index sets");
    return {set_, llt_.solve(x.values())};
}

double WeightMatrix::norm_w(const HermitianSeq& x) const {
    if (x.index_set() != set_)
        throw std::invalid_argument("WeightMatrix::norm_w: mismatched index sets");
    const double s = (x.values().adjoint() * w_ * x.values()).value().real();
    return std::sqrt(std::max(s, 0.0));
}

double WeightMatrix::norm_winv(const HermitianSeq& x) const {
    if (x.index_set() != set_)
        throw std::invalid_argument("WeightMatrix::norm_winv: mismatched index sets");
    const double s = (x.values().adjoint() * llt_.solve(x.values())).value().real();
    return std::sqrt(std::max(s, 0.0));
}

WeightMatrix WeightMatrix::scaled(double s) const {
    if (!(s > 0)) throw std::invalid_argument("WeightMatrix::scaled: factor must be positive");
    return {set_, s * w_};
}

}  // namespace rcext
