#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rcext/simulate.hpp"
#include "rcext/trig.hpp"

using namespace rcext;

TEST_CASE("default system coefficients") {
    const Arma2D sys = default_system();
    CHECK(sys.b(0, 0) == doctest::Approx(0.9));
    CHECK(sys.b(0, 2) == doctest::Approx(0.05));
    CHECK(sys.a(2, 0) == doctest::Approx(0.4));
    CHECK(sys.a(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("spectrum at the origin is the squared coefficient-sum ratio") {
    const Arma2D sys = default_system();
    const GridSpec g = GridSpec::uniform(2, 16, false);
    const GridField f = spectrum(sys, g);
    const double bsum = sys.b.sum(), asum = sys.a.sum();
    CHECK(f.values()[0] == doctest::Approx((bsum * bsum) / (asum * asum)).epsilon(1e-12));
}

TEST_CASE("zero input gives a zero field; recursion matches hand unrolling") {
    const Arma2D sys = default_system();
    const DataRecord zero = DataRecord::from_real({5, 5}, Eigen::VectorXd::Zero(25));
    const DataRecord out = filter_recursion(sys, zero);
    CHECK(out.values().norm() == doctest::Approx(0.0));

    // impulse response start: y_00 = b_00, y_01 = b_01 - a_01 y_00
    Eigen::VectorXd imp = Eigen::VectorXd::Zero(9);
    imp[0] = 1.0;
    const DataRecord resp = filter_recursion(sys, DataRecord::from_real({3, 3}, imp));
    CHECK(resp.at({0, 0}).real() == doctest::Approx(sys.b(0, 0)));
    CHECK(resp.at({0, 1}).real() ==
          doctest::Approx(sys.b(0, 1) - sys.a(0, 1) * sys.b(0, 0)));
}

TEST_CASE("fixed seed reproducibility, different seeds differ") {
    const Arma2D sys = default_system();
    const DataRecord a = simulate_field(sys, 20, 42);
    const DataRecord b = simulate_field(sys, 20, 42);
    const DataRecord c = simulate_field(sys, 20, 43);
    CHECK((a.values() - b.values()).norm() == 0.0);
    CHECK((a.values() - c.values()).norm() > 0.0);
}

TEST_CASE("unstable recursion is detected") {
    Arma2D sys = default_system();
    sys.a(1, 0) = -3.0;  // strong positive feedback
    CHECK_THROWS_AS(simulate_field(sys, 64, 1), std::runtime_error);
}

TEST_CASE("true covariances: flat spectrum for b = a, cone probes for default") {
    Arma2D flat = default_system();
    flat.b = flat.a;
    const IndexSet set = IndexSet::box({2, 2});
    const GridSpec g = GridSpec::uniform(2, 50, true);
    const HermitianSeq c_flat = true_covariances(flat, set, g);
    CHECK((c_flat - HermitianSeq::unit(set)).norm2() < 1e-12);

    const HermitianSeq c_true = true_covariances(default_system(), set, g);
    CHECK(c_true.at({0, 0}).real() > 0.0);
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const HermitianSeq p = oracles::random_positive_poly({2, 2}, rng, 1e-6);
        CHECK(inner_product(c_true, p) > 0.0);
    }
}

TEST_CASE("true covariances converge under grid refinement") {
    // the denominator has roots close to the torus, so the quadrature needs
    // a few hundred points per axis before the refinement deltas die out
    const IndexSet set = IndexSet::box({2, 2});
    auto at = [&](int n) {
        return true_covariances(default_system(), set, GridSpec::uniform(2, n, true));
    };
    const double d1 = (at(128) - at(256)).norm2();
    const double d2 = (at(256) - at(512)).norm2();
    const double d3 = (at(512) - at(1024)).norm2();
    CHECK(d2 < d1);
    CHECK(d3 < d2);
    CHECK(d3 < 1e-8);
}

TEST_CASE("sample variance approaches the spectrum integral") {
    const Arma2D sys = default_system();
    const GridSpec g = GridSpec::uniform(2, 128, true);
    const IndexSet set = IndexSet::box({0, 0});
    const double c00 = true_covariances(sys, set, g)
                           .at({0, 0})
                           .real();
    // large field, settled region only
    const DataRecord y = trailing_window(simulate_field(sys, 400, 5), 350);
    double var = 0.0;
    for (long j = 0; j < y.count(); ++j) var += std::norm(y.values()[j]);
    var /= static_cast<double>(y.count());
    CHECK(std::abs(var - c00) / c00 < 0.05);
}

TEST_CASE("biased estimates from longer simulations approach the truth") {
    const Arma2D sys = default_system();
    const IndexSet set = IndexSet::box({2, 2});
    const GridSpec g = GridSpec::uniform(2, 64, true);
    const HermitianSeq c_true = true_covariances(sys, set, g);
    auto mc_error = [&](int n) {
        double err = 0.0;
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            const DataRecord y = trailing_window(simulate_field(sys, n + 40, seed), n);
            err += (biased_cov(y, set) - c_true).norm2();
        }
        return err / 6.0;
    };
    const double e64 = mc_error(64), e128 = mc_error(128), e256 = mc_error(256);
    CHECK(e128 < e64);
    CHECK(e256 < e128);
}

TEST_CASE("trailing window picks the last samples") {
    Eigen::VectorXd v(16);
    for (int i = 0; i < 16; ++i) v[i] = i;
    const DataRecord rec = DataRecord::from_real({4, 4}, v);
    const DataRecord w = trailing_window(rec, 2);
    CHECK(w.shape() == std::vector<int>{2, 2});
    CHECK(w.at({0, 0}).real() == doctest::Approx(10.0));
    CHECK(w.at({1, 1}).real() == doctest::Approx(15.0));
    CHECK_THROWS_AS(trailing_window(rec, 5), std::invalid_argument);
}
