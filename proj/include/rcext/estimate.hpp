#ifndef RCEXT_ESTIMATE_HPP
#define RCEXT_ESTIMATE_HPP

#include <Eigen/Core>
#include <vector>

#include "rcext/grid.hpp"
#include "rcext/sequence.hpp"

namespace rcext {

/// Finite data record on Z^d_N = {0..N_1-1} x ... x {0..N_d-1}, row-major.
/// Complex-valued; real data embeds with zero imaginary part.
class DataRecord {
public:
    DataRecord(std::vector<int> shape, Eigen::VectorXcd values);
    static DataRecord from_real(std::vector<int> shape, const Eigen::VectorXd& values);

    int dim() const { return static_cast<int>(shape_.size()); }
    const std::vector<int>& shape() const { return shape_; }
    long count() const { return static_cast<long>(v_.size()); }
    const Eigen::VectorXcd& values() const { return v_; }

    std::complex<double> at(const std::vector<int>& t) const;

private:
    std::vector<int> shape_;
    Eigen::VectorXcd v_;
};

/// Biased estimate c_k = (1/prod N_j) sum_t y_{t+k} conj(y_t), with the
/// record extended by zero outside Z^d_N. Always a bona fide covariance
/// sequence (Fourier coefficients of the periodogram).
HermitianSeq biased_cov(const DataRecord& data, const IndexSet& set);

/// Unbiased estimate with divisor prod_j (N_j - |k_j|). Requires
/// N_j > |k_j| on every axis; not positive definite in general.
HermitianSeq unbiased_cov(const DataRecord& data, const IndexSet& set);

/// (1/prod N_j) |sum_t y_t e^{i(t,theta)}|^2 sampled on the grid.
GridField periodogram(const DataRecord& data, const GridSpec& grid);

}  // namespace rcext

#endif
