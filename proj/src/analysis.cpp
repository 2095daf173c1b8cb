#include "rcext/analysis.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcext {

namespace {

// ||A||_{2,1} = max_{||x||_2 = 1} ||Ax||_1 = max over signs s of ||A^T s||_2
// for real A. For complex A the sign enumeration is a lower bound, so the
// sqrt(n)*sigma_max upper bound is used instead to keep the guarantee sound.
double induced_norm_21(const Eigen::MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    const bool real = a.imag().cwiseAbs().maxCoeff() < 1e-14 * (a.cwiseAbs().maxCoeff() + 1.0);
    if (real && n <= 20) {
        const Eigen::MatrixXd ar = a.real();
        double best = 0.0;
        // s and -s give the same norm; fix the first sign
        for (long mask = 0; mask < (1L << (n - 1)); ++mask) {
            Eigen::VectorXd s(n);
            s[0] = 1.0;
            for (int i = 1; i < n; ++i) s[i] = (mask >> (i - 1)) & 1 ? 1.0 : -1.0;
            best = std::max(best, (ar.transpose() * s).norm());
        }
        return best;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    return std::sqrt(static_cast<double>(n)) * svd.singularValues()[0];
}

}  // namespace

WeightMatrix soft_weight_from_hard(const WeightMatrix& w_hard, const HermitianSeq& q) {
    const HermitianSeq e = HermitianSeq::unit(q.index_set());
    const double nw = w_hard.norm_w(q - e);
    if (nw <= 0)
        throw std::invalid_argument(
            "soft_weight_from_hard: q = e (trivial hard regime, map undefined)");
    return w_hard.scaled(1.0 / nw);
}

WeightMatrix hard_weight_from_soft(const WeightMatrix& w_soft, const HermitianSeq& q) {
    const HermitianSeq e = HermitianSeq::unit(q.index_set());
    const double nw = w_soft.norm_w(q - e);
    if (nw <= 0)
        throw std::invalid_argument(
            "hard_weight_from_soft: q = e (trivial regime, map undefined)");
    return w_soft.scaled(nw * nw);
}

SingularFreeBound singular_free_bound(const HermitianSeq& c, const HermitianSeq& p,
                                      const WeightMatrix& w) {
    require_same_set(c, p, "singular_free_bound");
    SingularFreeBound out;
    const double mismatch = w.norm_winv(c - p);
    if (mismatch == 0.0) {
        out.guaranteed_absolutely_continuous = true;
        out.margin = std::numeric_limits<double>::infinity();
        out.induced_norm_21 = 0.0;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w.matrix());
    const Eigen::MatrixXcd w_inv_sqrt =
        es.eigenvectors() *
        es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
        es.eigenvectors().adjoint();
    out.induced_norm_21 = induced_norm_21(w_inv_sqrt);
    out.margin = 1.0 / mismatch - out.induced_norm_21;
    out.guaranteed_absolutely_continuous = out.margin > 0;
    return out;
}

Oracle1dResult oracle_1d_example(double c1, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("oracle_1d_example: lambda must be positive");
    Oracle1dResult out;
    const double t = lambda + c1 - 1.0;
    out.q0 = (t + std::sqrt(6.0 * lambda + t * t)) / (3.0 * lambda);
    out.beta = c1 - lambda * out.q0 / 2.0;
    out.singular = (c1 > 0.0) && (lambda < 2.0 * c1);
    return out;
}

bool sufficient_hard_existence(const HermitianSeq& c, const WeightMatrix& w) {
    if (c.index_set() != w.index_set())
        throw std::invalid_argument("sufficient_hard_existence: mismatched index sets");
    const Eigen::MatrixXcd m = w.matrix() - c.values() * c.values().adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0;
}

}  // namespace rcext
