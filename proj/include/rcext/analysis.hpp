#ifndef RCEXT_ANALYSIS_HPP
#define RCEXT_ANALYSIS_HPP

#include "rcext/sequence.hpp"
#include "rcext/weight.hpp"

namespace rcext {

/// W_soft = W_hard / ||q - e||_{W_hard}. Undefined at q = e (the trivial
/// regime of the hard problem); throws there.
WeightMatrix soft_weight_from_hard(const WeightMatrix& w_hard, const HermitianSeq& q);

/// W_hard = W_soft * ||q - e||^2_{W_soft}; inverse of the map above.
WeightMatrix hard_weight_from_soft(const WeightMatrix& w_soft, const HermitianSeq& q);

struct SingularFreeBound {
    bool guaranteed_absolutely_continuous = false;
    /// ||c - p||_{W^-1}^{-1} - ||W^{-1/2}||_{2,1}; +inf when c = p.
    double margin = 0;
    double induced_norm_21 = 0;  // the bound used for ||W^{-1/2}||_{2,1}
};

/// Sufficient condition for the soft solution to have no singular part:
/// ||W^{-1/2}||_{2,1} < ||c - p||_{W^-1}^{-1}. The induced norm is computed
/// exactly by sign enumeration up to |Lambda| = 20 and bounded above by
/// sqrt(n) * ||W^{-1/2}||_2 beyond that, which only makes the guarantee more
/// conservative.
SingularFreeBound singular_free_bound(const HermitianSeq& c, const HermitianSeq& p,
                                      const WeightMatrix& w);

struct Oracle1dResult {
    bool singular = false;
    double q0 = 0;    // Q = q0 * (1 - cos theta) in the singular regime
    double beta = 0;  // atom mass at theta = 0; <= 0 outside the regime
};

/// Closed forms for the 1-D example with covariance (1, c1), prior
/// P = 1 - cos theta and W = lambda*I: the soft solution has a singular part
/// iff c1 > 0 and lambda < 2*c1, with
/// q0 = (lambda + c1 - 1 + sqrt(6*lambda + (lambda + c1 - 1)^2)) / (3*lambda)
/// and mass beta = c1 - lambda*q0/2.
Oracle1dResult oracle_1d_example(double c1, double lambda);

/// True iff W - cc* is positive definite, a sufficient condition for the
/// hard problem to have a solution (it puts 0 in the interior of the
/// feasibility ball, so the ball meets the moment cone).
bool sufficient_hard_existence(const HermitianSeq& c, const WeightMatrix& w);

}  // namespace rcext

#endif
