#ifndef RCEXT_RANDOM_HPP
#define RCEXT_RANDOM_HPP

#include <cstdint>
#include <random>

namespace rcext::detail {

/// Seeded standard-normal stream: Box-Muller over mt19937_64. The algorithm
/// is fixed here (not delegated to std::normal_distribution) so records are
/// reproducible across standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
    double next();

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

}  // namespace rcext::detail

#endif
