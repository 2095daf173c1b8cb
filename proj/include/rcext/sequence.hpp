#ifndef RCEXT_SEQUENCE_HPP
#define RCEXT_SEQUENCE_HPP

#include <Eigen/Core>
#include <complex>

#include "rcext/index_set.hpp"

namespace rcext {

/// Complex coefficient sequence on a symmetric index set with the conjugate
/// symmetry c_{-k} = conj(c_k) enforced at construction. Represents
/// covariance data, trigonometric polynomial coefficients and moments alike.
///
/// The set of such sequences is a real vector space of dimension |Lambda|;
/// to_real()/from_real() give an isometric chart onto R^{|Lambda|} used by
/// the solvers (pairs carry sqrt(2)-scaled real and imaginary parts, so the
/// Euclidean inner product of charts equals inner_product of sequences).
class HermitianSeq {
public:
    /// Validates conjugate symmetry within a relative tolerance, then
    /// symmetrizes exactly. Throws std::invalid_argument on gross violation.
    HermitianSeq(IndexSet set, Eigen::VectorXcd values);

    static HermitianSeq zero(const IndexSet& set);
    /// The sequence e: e_0 = 1, e_k = 0 otherwise.
    static HermitianSeq unit(const IndexSet& set);

    const IndexSet& index_set() const { return set_; }
    const Eigen::VectorXcd& values() const { return v_; }
    std::complex<double> operator[](int i) const { return v_[i]; }
    int size() const { return static_cast<int>(v_.size()); }

    /// Value at exponent k; throws when k is not in the set.
    std::complex<double> at(const std::vector<int>& k) const;

    Eigen::VectorXd to_real() const;
    static HermitianSeq from_real(const IndexSet& set, const Eigen::VectorXd& u);

    double norm2() const { return v_.norm(); }
    double norm_inf() const { return v_.cwiseAbs().maxCoeff(); }

    HermitianSeq& operator+=(const HermitianSeq& o);
    HermitianSeq& operator-=(const HermitianSeq& o);
    HermitianSeq& operator*=(double s);

    friend HermitianSeq operator+(HermitianSeq a, const HermitianSeq& b) { return a += b; }
    friend HermitianSeq operator-(HermitianSeq a, const HermitianSeq& b) { return a -= b; }
    friend HermitianSeq operator*(double s, HermitianSeq a) { return a *= s; }

private:
    struct unchecked_tag {};
    HermitianSeq(IndexSet set, Eigen::VectorXcd values, unchecked_tag)
        : set_(std::move(set)), v_(std::move(values)) {}

    IndexSet set_;
    Eigen::VectorXcd v_;
};

/// Ensures a and b live on the same index set; throws otherwise.
void require_same_set(const HermitianSeq& a, const HermitianSeq& b, const char* where);

}  // namespace rcext

#endif
