#ifndef RCEXT_WIENER_HPP
#define RCEXT_WIENER_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "rcext/estimate.hpp"
#include "rcext/grid.hpp"
#include "rcext/sequence.hpp"
#include "rcext/solve.hpp"
#include "rcext/weight.hpp"

namespace rcext {

/// Standard normal CDF.
double normal_cdf(double x);
/// Inverse standard normal CDF: Acklam's rational approximation (relative
/// error below 1.2e-9) refined by one Halley step against the erfc-based CDF.
double normal_quantile(double p);

/// Integrand of the covariance transport relation:
/// exp(-tau^2/(1+s)) / (2 pi sqrt(1-s^2)).
double price_integrand(double s, double tau);

/// c^y = int_0^{c^x} price_integrand(s, tau) ds, by adaptive quadrature after
/// the arcsine substitution (absolute error <= 1e-10). Strictly increasing
/// and odd-signed in c^x.
double price_forward(double c_x, double tau);

/// Inverse of the map above by bisection, |forward(c_x) - c_y| <= 1e-10.
/// Throws when c_y is outside the forward range for this tau.
double price_inverse(double c_y, double tau);

/// Estimated threshold from a binary field: Phi^-1(1 - mean).
double estimate_threshold(const DataRecord& binary_field);

struct FilterCoefficients {
    std::vector<int> shape;    // factorization grid, one entry per axis
    Eigen::VectorXd coeffs;    // real coefficients, row-major wrapped indices
    double reconstruction_error = 0;  // max relative |factor|^2 vs input samples
};

/// Approximate spectral factor by the cepstral method: the filter is the
/// inverse transform of exp(causal part of log(Phi)/2), with a half-plane
/// causality cone for d >= 2. Exact minimum phase in d = 1; for d >= 2 the
/// grid samples of |factor|^2 still reproduce Phi, but no minimum-phase
/// property is claimed. Requires strictly positive samples on an aligned
/// (non-offset) grid.
FilterCoefficients factorize_spectrum(const GridField& spectrum_samples);

struct WienerModel {
    double tau = 0;
    HermitianSeq p, q;         // rational spectrum P/Q
    FilterCoefficients filter;
    int clamped_lags = 0;      // transported covariances clipped into [-1,1]

    WienerModel(double tau, HermitianSeq p, HermitianSeq q, FilterCoefficients f)
        : tau(tau), p(std::move(p)), q(std::move(q)), filter(std::move(f)) {}
};

/// Full identification pipeline: threshold estimate, binary covariances,
/// covariance transport, soft-constrained spectral estimation with the given
/// weight, and the factorization heuristic.
WienerModel identify(const DataRecord& binary_field, const IndexSet& set, const WeightMatrix& w,
                     const SolverConfig& config);

/// Default soft weight for texture work, lambda = 0.01.
WeightMatrix default_texture_weight(const IndexSet& set);

/// White noise -> periodic filter convolution -> standardize -> threshold.
/// Returns a binary (0/1 valued) record; deterministic per seed.
DataRecord synthesize_texture(const WienerModel& model, const std::vector<int>& shape,
                              std::uint64_t seed);

/// Binary covariance the synthesis pipeline realizes at a lag: the filter's
/// normalized linear autocorrelation transported through the forward Price
/// relation.
double predicted_binary_covariance(const WienerModel& model, const std::vector<int>& lag);

}  // namespace rcext

#endif
