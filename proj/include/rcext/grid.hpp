#ifndef RCEXT_GRID_HPP
#define RCEXT_GRID_HPP

#include <Eigen/Core>
#include <vector>

#include "rcext/sequence.hpp"

namespace rcext {

/// Uniform discretization of the torus T^d. Nodes are
/// theta_j = 2*pi*(j + s)/N per axis with s = 1/2 when offset() is set.
///
/// The half-sample offset keeps quadrature nodes away from lattice points
/// where optimal Q may vanish; the solvers use it by default.
class GridSpec {
public:
    GridSpec(std::vector<int> points_per_axis, bool offset);
    static GridSpec uniform(int dim, int n, bool offset) {
        return GridSpec(std::vector<int>(dim, n), offset);
    }

    int dim() const { return static_cast<int>(shape_.size()); }
    const std::vector<int>& shape() const { return shape_; }
    bool offset() const { return offset_; }
    long node_count() const { return count_; }

    Eigen::VectorXd node(long flat) const;

    /// N_a >= 2*max|k_a| + 1 on every axis.
    bool resolves(const IndexSet& set) const;
    void require_resolves(const IndexSet& set, const char* where) const;

    bool operator==(const GridSpec& o) const {
        return shape_ == o.shape_ && offset_ == o.offset_;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

private:
    std::vector<int> shape_;
    bool offset_;
    long count_;
};

/// Real samples on a grid (density values, spectral samples, ...).
class GridField {
public:
    GridField(GridSpec grid, Eigen::VectorXd values);

    const GridSpec& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return v_; }
    Eigen::VectorXd& values() { return v_; }
    double min() const { return v_.minCoeff(); }
    double max() const { return v_.maxCoeff(); }
    double mean() const { return v_.mean(); }

private:
    GridSpec grid_;
    Eigen::VectorXd v_;
};

/// Samples of P(e^{i theta}) = sum_k p_k e^{-i(k,theta)} on all grid nodes,
/// via a zero-padded fast transform. Grid must resolve the index set.
GridField synthesize(const HermitianSeq& p, const GridSpec& grid);

/// Riemann-sum Fourier coefficients (1/M) sum_j f_j e^{i(k,theta_j)} over the
/// index set. No sign requirement on the field.
HermitianSeq fourier_coefficients(const GridField& field, const IndexSet& set);

/// Moments of a nonnegative density sampled on the grid; rejects fields with
/// negative values beyond a small relative tolerance.
HermitianSeq moments(const GridField& field, const IndexSet& set);

/// (1/M) sum_j P_j log Q_j; every Q node must be strictly positive.
double entropy_like_integral(const GridField& pfield, const GridField& qfield);

}  // namespace rcext

#endif
