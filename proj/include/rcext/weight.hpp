#ifndef RCEXT_WEIGHT_HPP
#define RCEXT_WEIGHT_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rcext/sequence.hpp"

namespace rcext {

/// Hermitian positive definite weight matrix on the coefficient space,
/// defining ||x||_W and ||x||_{W^-1}.
///
/// Besides positivity, construction requires W to map conjugate-symmetric
/// sequences to conjugate-symmetric sequences (entrywise
/// W_{-k,-l} = conj(W_{k,l})); otherwise r = c + W(q - e) would leave the
/// space of bona fide moment sequences.
class WeightMatrix {
public:
    WeightMatrix(IndexSet set, Eigen::MatrixXcd w);

    /// W = lambda * I.
    static WeightMatrix scalar(const IndexSet& set, double lambda);

    int size() const { return static_cast<int>(w_.rows()); }
    const IndexSet& index_set() const { return set_; }
    const Eigen::MatrixXcd& matrix() const { return w_; }

    HermitianSeq apply(const HermitianSeq& x) const;   // W x
    HermitianSeq solve(const HermitianSeq& x) const;   // W^{-1} x

    double norm_w(const HermitianSeq& x) const;
    double norm_winv(const HermitianSeq& x) const;

    /// The chart quadratic form M with ||x||_W^2 = u' M u, u = x.to_real().
    const Eigen::MatrixXd& real_form() const { return real_form_; }

    /// Same weight scaled by s > 0.
    WeightMatrix scaled(double s) const;

private:
    IndexSet set_;
    Eigen::MatrixXcd w_;
    Eigen::LLT<Eigen::MatrixXcd> llt_;
    Eigen::MatrixXd real_form_;
};

}  // namespace rcext

#endif
