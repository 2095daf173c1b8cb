#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rcext/estimate.hpp"
#include "rcext/random.hpp"
#include "rcext/trig.hpp"

using namespace rcext;

namespace {
DataRecord record1d(std::vector<double> v) {
    Eigen::VectorXd x(v.size());
    for (size_t i = 0; i < v.size(); ++i) x[i] = v[i];
    return DataRecord::from_real({static_cast<int>(v.size())}, x);
}
}  // namespace

TEST_CASE("biased estimate: two-sample records and the zero record") {
    const IndexSet set = IndexSet::box({1});
    const HermitianSeq c = biased_cov(record1d({1, 1}), set);
    CHECK(c.at({0}).real() == doctest::Approx(1.0));
    CHECK(c.at({1}).real() == doctest::Approx(0.5));

    const HermitianSeq c2 = biased_cov(record1d({1, -1}), set);
    CHECK(c2.at({0}).real() == doctest::Approx(1.0));
    CHECK(c2.at({1}).real() == doctest::Approx(-0.5));

    const HermitianSeq c3 = biased_cov(record1d({0, 0, 0}), set);
    CHECK(c3.norm2() == doctest::Approx(0.0));

    CHECK_THROWS_AS(biased_cov(record1d({1}), set), std::invalid_argument);
}

TEST_CASE("unbiased estimate: divisor per lag, boundary example") {
    const IndexSet set = IndexSet::box({1});
    const HermitianSeq c = unbiased_cov(record1d({1, 1}), set);
    CHECK(c.at({0}).real() == doctest::Approx(1.0));
    CHECK(c.at({1}).real() == doctest::Approx(1.0));

    const HermitianSeq c2 = unbiased_cov(record1d({1, -1}), set);
    CHECK(c2.at({1}).real() == doctest::Approx(-1.0));
    CHECK(cone_test_toeplitz_1d(c2) == ConeLocation::boundary);

    CHECK(unbiased_cov(record1d({0, 0, 0}), set).norm2() == doctest::Approx(0.0));
    CHECK_THROWS_AS(unbiased_cov(record1d({1, 1}), IndexSet::box({2})),
                    std::invalid_argument);
}

TEST_CASE("periodogram values and nonnegativity") {
    const GridSpec g(std::vector<int>{8}, false);
    const GridField f = periodogram(record1d({1, 1}), g);
    CHECK(f.values()[0] == doctest::Approx(2.0));  // theta = 0
    CHECK(f.min() >= -1e-12);

    const GridField f2 = periodogram(record1d({1, -1}), g);
    CHECK(f2.values()[0] == doctest::Approx(0.0).epsilon(1e-14));

    const GridField f3 = periodogram(record1d({-1.5}), g);
    for (long j = 0; j < 8; ++j) CHECK(f3.values()[j] == doctest::Approx(2.25));
}

TEST_CASE("periodogram: Fourier coefficients are the biased estimates") {
    std::mt19937_64 rng(31);
    detail::GaussianStream gs(11);
    for (int rep = 0; rep < 5; ++rep) {
        const int n1 = 4 + static_cast<int>(rng() % 3), n2 = 3 + static_cast<int>(rng() % 3);
        Eigen::VectorXd y(static_cast<long>(n1) * n2);
        for (long i = 0; i < y.size(); ++i) y[i] = gs.next();
        const DataRecord rec = DataRecord::from_real({n1, n2}, y);
        const IndexSet set = IndexSet::box({n1 - 1, n2 - 1});
        // grid resolving Z_N - Z_N on both axes, both alignments
        for (bool offset : {false, true}) {
            const GridSpec g(std::vector<int>{2 * n1 + 1, 2 * n2 + 1}, offset);
            const HermitianSeq via_grid = moments(periodogram(rec, g), set);
            const HermitianSeq direct = biased_cov(rec, set);
            CHECK((via_grid - direct).norm2() < 1e-10);
        }
    }
}

TEST_CASE("periodogram: direct path on a coarse grid agrees with padding path") {
    detail::GaussianStream gs(3);
    Eigen::VectorXd y(25);
    for (long i = 0; i < y.size(); ++i) y[i] = gs.next();
    const DataRecord rec = DataRecord::from_real({25}, y);
    // 9 < 25 forces the direct evaluation branch
    const GridSpec coarse(std::vector<int>{9}, true);
    const GridSpec fine(std::vector<int>{225}, true);
    const GridField direct = periodogram(rec, coarse);
    const GridField padded = periodogram(rec, fine);
    // offset node j of N=9 is offset node 25*j + 12 of N=225
    for (long j = 0; j < coarse.node_count(); ++j)
        CHECK(direct.values()[j] ==
              doctest::Approx(padded.values()[25 * j + 12]).epsilon(1e-10));
}

TEST_CASE("biased estimates pair positively with random positive polynomials") {
    std::mt19937_64 rng(41);
    detail::GaussianStream gs(17);
    Eigen::VectorXd y(64);
    for (long i = 0; i < y.size(); ++i) y[i] = gs.next();
    const DataRecord rec = DataRecord::from_real({8, 8}, y);
    const IndexSet set = IndexSet::box({2, 2});
    const HermitianSeq c = biased_cov(rec, set);
    for (int rep = 0; rep < 100; ++rep) {
        const HermitianSeq p = oracles::random_positive_poly({2, 2}, rng, 1e-6);
        CHECK(inner_product(c, p) > 0.0);
    }
}

TEST_CASE("unbiased white-noise estimate is unbiased in Monte-Carlo mean") {
    // lag 1 of unit white noise has true covariance 0; the Monte-Carlo mean
    // over many short records must sit within 3 standard errors of 0
    detail::GaussianStream gs(29);
    const IndexSet set = IndexSet::box({1});
    const int reps = 10000, n = 8;
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < reps; ++r) {
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = gs.next();
        const double est = unbiased_cov(DataRecord::from_real({n}, y), set).at({1}).real();
        sum += est;
        sumsq += est * est;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
    CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("short-record unbiased estimates leave the cone with positive frequency") {
    detail::GaussianStream gs(101);
    const IndexSet set = IndexSet::box({3});
    int violations = 0;
    for (int r = 0; r < 100; ++r) {
        Eigen::VectorXd y(5);
        for (int i = 0; i < 5; ++i) y[i] = gs.next();
        if (cone_test_toeplitz_1d(unbiased_cov(DataRecord::from_real({5}, y), set)) ==
            ConeLocation::outside)
            ++violations;
    }
    CHECK(violations >= 1);
}

TEST_CASE("complex data is supported") {
    Eigen::VectorXcd y(3);
    y << std::complex<double>(1, 1), std::complex<double>(0, -1), std::complex<double>(2, 0);
    const DataRecord rec({3}, y);
    const IndexSet set = IndexSet::box({1});
    const HermitianSeq c = biased_cov(rec, set);
    // c_1 = (y_1 conj(y_0) + y_2 conj(y_1)) / 3
    const std::complex<double> expect =
        (y[1] * std::conj(y[0]) + y[2] * std::conj(y[1])) / 3.0;
    CHECK(std::abs(c.at({1}) - expect) < 1e-14);
    CHECK(std::abs(c.at({-1}) - std::conj(expect)) < 1e-14);
}
