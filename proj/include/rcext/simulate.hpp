#ifndef RCEXT_SIMULATE_HPP
#define RCEXT_SIMULATE_HPP

#include <Eigen/Core>
#include <cstdint>

#include "rcext/estimate.hpp"
#include "rcext/grid.hpp"
#include "rcext/random.hpp"
#include "rcext/sequence.hpp"

namespace rcext {

/// Two-dimensional recursive filter y = (b/a) u with quarter-plane support
/// {0..2}^2 and a_(0,0) = 1. Coefficient matrices are indexed B(k1, k2).
struct Arma2D {
    Eigen::Matrix3d b;
    Eigen::Matrix3d a;
};

/// The reference system used throughout the spectral-estimation study.
Arma2D default_system();

/// Transfer-function magnitude |b/a|^2 sampled on the grid. Throws when the
/// denominator nearly vanishes on a node.
GridField spectrum(const Arma2D& sys, const GridSpec& grid);

/// The recursion a*y = b*u evaluated in raster order with zero initial
/// conditions outside the index range. Throws on value overflow (unstable
/// system).
DataRecord filter_recursion(const Arma2D& sys, const DataRecord& input);

/// Output of the recursion driven by unit-variance white Gaussian noise.
/// Deterministic for a fixed seed.
DataRecord simulate_field(const Arma2D& sys, int steps_per_axis, std::uint64_t seed);

/// Quadrature moments of |b/a|^2 over the index set.
HermitianSeq true_covariances(const Arma2D& sys, const IndexSet& set, const GridSpec& grid);

/// Trailing window of a record (the last size x size samples), as used when
/// estimating covariances from the settled part of a simulation.
DataRecord trailing_window(const DataRecord& data, int size);

}  // namespace rcext

#endif
