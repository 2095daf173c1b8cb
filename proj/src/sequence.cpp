#include "rcext/sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace rcext {

namespace {
constexpr double kSymmetryRelTol = 1e-9;
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

HermitianSeq::HermitianSeq(IndexSet set, Eigen::VectorXcd values)
    : set_(std::move(set)), v_(std::move(values)) {
    if (v_.size() != set_.size())
        throw std::invalid_argument("HermitianSeq: value count does not match index set");
    const double scale = v_.cwiseAbs().maxCoeff();
    const double tol = kSymmetryRelTol * (scale > 0 ? scale : 1.0);
    for (int i = 0; i < set_.size(); ++i) {
        const int j = set_.conjugate_index(i);
        if (std::abs(v_[i] - std::conj(v_[j])) > tol)
            throw std::invalid_argument("HermitianSeq: conjugate symmetry violated");
    }
    // symmetrize exactly so the invariant is bitwise from here on
    for (int i : set_.pair_representatives()) {
        const int j = set_.conjugate_index(i);
        const std::complex<double> m = 0.5 * (v_[i] + std::conj(v_[j]));
        v_[i] = m;
        v_[j] = std::conj(m);
    }
    v_[set_.zero_index()] = v_[set_.zero_index()].real();
}

HermitianSeq HermitianSeq::zero(const IndexSet& set) {
    return {set, Eigen::VectorXcd::Zero(set.size()), unchecked_tag{}};
}

HermitianSeq HermitianSeq::unit(const IndexSet& set) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(set.size());
    v[set.zero_index()] = 1.0;
    return {set, std::move(v), unchecked_tag{}};
}

std::complex<double> HermitianSeq::at(const std::vector<int>& k) const {
    const int i = set_.find(k);
    if (i < 0) throw std::invalid_argument("HermitianSeq::at: exponent not in set");
    return v_[i];
}

Eigen::VectorXd HermitianSeq::to_real() const {
    Eigen::VectorXd u(set_.size());
    u[0] = v_[set_.zero_index()].real();
    int a = 1;
    for (int i : set_.pair_representatives()) {
        u[a++] = kSqrt2 * v_[i].real();
        u[a++] = kSqrt2 * v_[i].imag();
    }
    return u;
}

HermitianSeq HermitianSeq::from_real(const IndexSet& set, const Eigen::VectorXd& u) {
    if (u.size() != set.size())
        throw std::invalid_argument("HermitianSeq::from_real: wrong chart dimension");
    Eigen::VectorXcd v(set.size());
    v[set.zero_index()] = u[0];
    int a = 1;
    for (int i : set.pair_representatives()) {
        const std::complex<double> z(u[a] / kSqrt2, u[a + 1] / kSqrt2);
        a += 2;
        v[i] = z;
        v[set.conjugate_index(i)] = std::conj(z);
    }
    return {set, std::move(v), unchecked_tag{}};
}

HermitianSeq& HermitianSeq::operator+=(const HermitianSeq& o) {
    require_same_set(*this, o, "HermitianSeq::operator+=");
    v_ += o.v_;
    return *this;
}

HermitianSeq& HermitianSeq::operator-=(const HermitianSeq& o) {
    require_same_set(*this, o, "HermitianSeq::operator-=");
    v_ -= o.v_;
    return *this;
}

HermitianSeq& HermitianSeq::operator*=(double s) {
    v_ *= s;
    return *this;
}

void require_same_set(const HermitianSeq& a, const HermitianSeq& b, const char* where) {
    if (a.index_set() != b.index_set())
        throw std::invalid_argument(std::string(where) + ": mismatched index sets");
}

}  // namespace rcext
