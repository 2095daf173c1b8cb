#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rcext/grid.hpp"
#include "rcext/trig.hpp"
#include "rcext/weight.hpp"

using namespace rcext;

namespace {
HermitianSeq seq1d(std::vector<std::complex<double>> vals) {
    const int n = (static_cast<int>(vals.size()) - 1) / 2;
    Eigen::VectorXcd v(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
    return {IndexSet::box({n}), std::move(v)};
}
}  // namespace

TEST_CASE("index set: box construction and symmetry bookkeeping") {
    const IndexSet set = IndexSet::box({2, 1});
    CHECK(set.dim() == 2);
    CHECK(set.size() == 15);
    CHECK(set.is_box());
    CHECK(set.exponent(0) == std::vector<int>{-2, -1});
    CHECK(set.exponent(set.size() - 1) == std::vector<int>{2, 1});
    const int z = set.zero_index();
    CHECK(set.exponent(z) == std::vector<int>{0, 0});
    for (int i = 0; i < set.size(); ++i) {
        const int j = set.conjugate_index(i);
        for (int a = 0; a < set.dim(); ++a)
            CHECK(set.exponent(j)[a] == -set.exponent(i)[a]);
    }
    CHECK(set.pair_representatives().size() == 7);
    CHECK(set.max_abs(0) == 2);
    CHECK(set.max_abs(1) == 1);
}

TEST_CASE("index set: rejects asymmetric and duplicate input") {
    CHECK_THROWS_AS(IndexSet({{0}, {1}}), std::invalid_argument);
    CHECK_THROWS_AS(IndexSet({{1}, {-1}}), std::invalid_argument);  // no zero
    CHECK_THROWS_AS(IndexSet({{0}, {1}, {1}, {-1}}), std::invalid_argument);
}

TEST_CASE("hermitian sequence: symmetry enforced, chart is an isometry") {
    const IndexSet set = IndexSet::box({1});
    Eigen::VectorXcd bad(3);
    bad << std::complex<double>(1, 0.5), 2.0, std::complex<double>(1, 0.4);
    CHECK_THROWS_AS(HermitianSeq(set, bad), std::invalid_argument);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    const IndexSet set2 = IndexSet::box({2, 1});
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd ua(set2.size()), ub(set2.size());
        for (int i = 0; i < set2.size(); ++i) {
            ua[i] = u(rng);
            ub[i] = u(rng);
        }
        const HermitianSeq a = HermitianSeq::from_real(set2, ua);
        const HermitianSeq b = HermitianSeq::from_real(set2, ub);
        CHECK(a.to_real().isApprox(ua, 1e-14));
        CHECK(inner_product(a, b) == doctest::Approx(ua.dot(ub)).epsilon(1e-12));
    }
}

TEST_CASE("inner product: unit sequence, half-diff pair, boundary example") {
    const IndexSet set = IndexSet::box({1});
    const HermitianSeq e = HermitianSeq::unit(set);
    CHECK(inner_product(e, e) == doctest::Approx(1.0));

    // c = (c1, 1, c1) against p = (-1/2, 1, -1/2): 1 - c1
    const HermitianSeq c = seq1d({0.5, 1.0, 0.5});
    const HermitianSeq p = seq1d({-0.5, 1.0, -0.5});
    CHECK(inner_product(c, p) == doctest::Approx(0.5).epsilon(1e-14));

    const HermitianSeq c2 = seq1d({1.0, 3.0, 1.0});
    const HermitianSeq p2 = seq1d({-2.0, 4.0, -2.0});
    CHECK(inner_product(c2, p2) == doctest::Approx(8.0).epsilon(1e-14));

    CHECK_THROWS_AS(inner_product(e, HermitianSeq::unit(IndexSet::box({2}))),
                    std::invalid_argument);
}

TEST_CASE("inner product is symmetric and matches the chart dot product") {
    std::mt19937_64 rng(3);
    const IndexSet set = IndexSet::box({2});
    std::uniform_real_distribution<double> u(-1, 1);
    for (int rep = 0; rep < 25; ++rep) {
        Eigen::VectorXd ua(set.size()), ub(set.size());
        for (int i = 0; i < set.size(); ++i) {
            ua[i] = u(rng);
            ub[i] = u(rng);
        }
        const HermitianSeq a = HermitianSeq::from_real(set, ua);
        const HermitianSeq b = HermitianSeq::from_real(set, ub);
        CHECK(inner_product(a, b) == doctest::Approx(inner_product(b, a)).epsilon(1e-13));
    }
}

TEST_CASE("eval_poly: unit, 1 - cos theta at 0 and pi") {
    const HermitianSeq e = HermitianSeq::unit(IndexSet::box({1}));
    Eigen::VectorXd theta(1);
    theta << 1.234;
    CHECK(eval_poly(e, theta) == doctest::Approx(1.0));

    const HermitianSeq p = seq1d({-0.5, 1.0, -0.5});
    theta << 0.0;
    CHECK(eval_poly(p, theta) == doctest::Approx(0.0).epsilon(1e-15));
    theta << std::numbers::pi;
    CHECK(eval_poly(p, theta) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("eval_poly agrees with the exponential-sequence inner product") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    const IndexSet set = IndexSet::box({2, 2});
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd uu(set.size());
        for (int i = 0; i < set.size(); ++i) uu[i] = u(rng);
        const HermitianSeq p = HermitianSeq::from_real(set, uu);
        Eigen::VectorXd theta(2);
        theta << u(rng) * 3, u(rng) * 3;
        const double direct = eval_poly(p, theta);
        const double via_ip = oracles::poly_by_inner_product(p, theta);
        CHECK(direct == doctest::Approx(via_ip).epsilon(1e-12));
    }
}

TEST_CASE("1-D Toeplitz cone test: interior, boundary, outside") {
    CHECK(cone_test_toeplitz_1d(seq1d({1, 3, 1})) == ConeLocation::interior);
    CHECK(cone_test_toeplitz_1d(seq1d({1, 1, 1})) == ConeLocation::boundary);
    CHECK(cone_test_toeplitz_1d(seq1d({-1, 1, -1})) == ConeLocation::boundary);
    CHECK(cone_test_toeplitz_1d(seq1d({-1.1, 1, -1.1})) == ConeLocation::outside);
    CHECK_THROWS_AS(cone_test_toeplitz_1d(HermitianSeq::unit(IndexSet::box({1, 1}))),
                    std::invalid_argument);
}

TEST_CASE("grid positivity surrogate") {
    const GridSpec grid(std::vector<int>{64}, false);
    const HermitianSeq e = HermitianSeq::unit(IndexSet::box({1}));
    auto rep = grid_positivity_test(e, grid);
    CHECK(rep.kind == Positivity::strictly_positive);
    CHECK(rep.min_value == doctest::Approx(1.0));

    // 1 - cos theta vanishes exactly at the theta = 0 node
    auto rep2 = grid_positivity_test(seq1d({-0.5, 1.0, -0.5}), grid);
    CHECK(rep2.kind == Positivity::nonnegative_with_zeros);
    CHECK(rep2.min_value == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rep2.argmin[0] == doctest::Approx(0.0));

    auto rep3 = grid_positivity_test(seq1d({-1.0, 1.0, -1.0}), grid);
    CHECK(rep3.kind == Positivity::negative_somewhere);

    CHECK_THROWS_AS(grid_positivity_test(seq1d({-0.5, 1.0, -0.5}),
                                         GridSpec(std::vector<int>{2}, false)),
                    std::invalid_argument);
}

TEST_CASE("positive polynomials pair positively with moment data") {
    // random strictly positive P and c built as moments of a positive density
    std::mt19937_64 rng(17);
    const std::vector<int> radii{2};
    const GridSpec grid(std::vector<int>{128}, true);
    for (int rep = 0; rep < 25; ++rep) {
        const HermitianSeq p = oracles::random_positive_poly(radii, rng);
        const HermitianSeq density = oracles::random_positive_poly(radii, rng);
        const HermitianSeq c = moments(synthesize(density, grid), p.index_set());
        CHECK(inner_product(c, p) > 0.0);
    }
}

TEST_CASE("weight matrix: construction guards and norms") {
    const IndexSet set = IndexSet::box({1});
    const WeightMatrix w = WeightMatrix::scalar(set, 0.5);
    CHECK(w.size() == 3);

    const HermitianSeq x = seq1d({0.5, 1.0, 0.5});
    CHECK(w.norm_w(x) == doctest::Approx(std::sqrt(0.5 * 1.5)).epsilon(1e-14));
    CHECK(w.norm_winv(x) == doctest::Approx(std::sqrt(1.5 / 0.5)).epsilon(1e-14));
    CHECK((w.apply(w.solve(x)) - x).norm2() < 1e-12);

    CHECK_THROWS_AS(WeightMatrix::scalar(set, -1.0), std::invalid_argument);
    Eigen::MatrixXcd notpd = -Eigen::MatrixXcd::Identity(3, 3);
    CHECK_THROWS_AS(WeightMatrix(set, notpd), std::invalid_argument);
    Eigen::MatrixXcd nothermitian = Eigen::MatrixXcd::Identity(3, 3);
    nothermitian(0, 1) = 2.0;
    CHECK_THROWS_AS(WeightMatrix(set, nothermitian), std::invalid_argument);
    // Hermitian PD but mixes conjugate pairs asymmetrically
    Eigen::MatrixXcd skew = Eigen::MatrixXcd::Identity(3, 3);
    skew(0, 1) = std::complex<double>(0, 0.2);
    skew(1, 0) = std::complex<double>(0, -0.2);
    CHECK_THROWS_AS(WeightMatrix(set, skew), std::invalid_argument);
}

TEST_CASE("weight matrix: real form reproduces the complex norm") {
    const IndexSet set = IndexSet::box({1});
    // a non-scalar admissible weight: diagonal in pair structure
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
    m(0, 0) = 2.0;
    m(2, 2) = 2.0;
    m(1, 1) = 3.0;
    m(0, 2) = 0.5;
    m(2, 0) = 0.5;
    const WeightMatrix w(set, m);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd uu(3);
        uu << u(rng), u(rng), u(rng);
        const HermitianSeq x = HermitianSeq::from_real(set, uu);
        const double via_chart = std::sqrt(uu.dot(w.real_form() * uu));
        CHECK(w.norm_w(x) == doctest::Approx(via_chart).epsilon(1e-13));
    }
}
