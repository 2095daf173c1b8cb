#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rcext/io.hpp"
#include "rcext/simulate.hpp"

using namespace rcext;

namespace {
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("rcext_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};
}  // namespace

TEST_CASE("sequence files roundtrip and reject malformed input") {
    TempDir tmp;
    std::mt19937_64 rng(3);
    const HermitianSeq seq = oracles::random_positive_poly({2, 1}, rng);
    write_sequence_file(tmp.file("c.txt"), seq);
    const HermitianSeq back = read_sequence_file(tmp.file("c.txt"));
    CHECK(back.index_set() == seq.index_set());
    CHECK((back - seq).norm2() < 1e-15 * seq.norm2());

    std::istringstream bad_dim("0 1\n");
    CHECK_THROWS_AS(read_sequence(bad_dim), FileFormatError);
    std::istringstream truncated("1 1\n-1 0.5 0\n");
    CHECK_THROWS_AS(read_sequence(truncated), FileFormatError);
    std::istringstream asymmetric("1 1\n-1 0.5 0.1\n0 1 0\n1 0.5 0.2\n");
    CHECK_THROWS_AS(read_sequence(asymmetric), FileFormatError);
    CHECK_THROWS_AS(read_sequence_file(tmp.file("missing.txt")), FileFormatError);
}

TEST_CASE("grid field: csv header and binary roundtrip") {
    TempDir tmp;
    const GridSpec g(std::vector<int>{3, 4}, true);
    Eigen::VectorXd v(12);
    for (int i = 0; i < 12; ++i) v[i] = 0.5 * i - 2;
    const GridField f(g, v);

    std::ostringstream csv;
    write_field_csv(csv, f);
    CHECK(csv.str().substr(0, 20) == std::string("theta1,theta2,value\n"));

    write_field_binary_file(tmp.file("f.bin"), f);
    const GridField back = read_field_binary_file(tmp.file("f.bin"));
    CHECK(back.grid() == g);
    CHECK((back.values() - v).norm() == 0.0);
}

TEST_CASE("data records: text and binary forms, format sniffing") {
    TempDir tmp;
    Eigen::VectorXcd v(6);
    for (int i = 0; i < 6; ++i) v[i] = std::complex<double>(i * 0.25, -i);
    const DataRecord rec({2, 3}, v);

    write_record_file(tmp.file("r.txt"), rec, false);
    const DataRecord t = read_record_file(tmp.file("r.txt"));
    CHECK(t.shape() == rec.shape());
    CHECK((t.values() - rec.values()).norm() == 0.0);

    write_record_file(tmp.file("r.bin"), rec, true);
    const DataRecord b = read_record_file(tmp.file("r.bin"));
    CHECK(b.shape() == rec.shape());
    CHECK((b.values() - rec.values()).norm() == 0.0);

    // real-only text (one value per line) is accepted
    {
        std::ofstream os(tmp.file("real.txt"));
        os << "1 3\n0.5\n1.5\n-2\n";
    }
    const DataRecord r = read_record_file(tmp.file("real.txt"));
    CHECK(r.values()[2].real() == doctest::Approx(-2.0));
    CHECK(r.values()[2].imag() == doctest::Approx(0.0));
}

TEST_CASE("weight files: scalar and matrix forms") {
    TempDir tmp;
    const IndexSet set = IndexSet::box({1});
    {
        std::ofstream os(tmp.file("w1.txt"));
        os << "scalar 0.25\n";
    }
    const WeightMatrix w = read_weight_file(tmp.file("w1.txt"), set);
    CHECK(w.matrix()(1, 1).real() == doctest::Approx(0.25));

    std::ostringstream ws;
    write_weight(ws, w, std::nullopt);
    std::istringstream win(ws.str());
    const WeightMatrix back = read_weight(win, set);
    CHECK((back.matrix() - w.matrix()).norm() < 1e-15);

    std::istringstream badkind("diagonal 3\n");
    CHECK_THROWS_AS(read_weight(badkind, set), FileFormatError);
    std::istringstream badsize("matrix 2\n1 0 0 0\n0 0 1 0\n");
    CHECK_THROWS_AS(read_weight(badsize, set), FileFormatError);
}

TEST_CASE("solution files roundtrip through the writer and reader") {
    TempDir tmp;
    std::mt19937_64 rng(11);
    const HermitianSeq p = oracles::random_positive_poly({1}, rng);
    const IndexSet& set = p.index_set();
    SolverConfig cfg = SolverConfig::for_dim(1);
    HermitianSeq c = moments(synthesize(p, cfg.grid), set);
    Eigen::VectorXd bump = Eigen::VectorXd::Zero(set.size());
    bump[1] = 0.05;
    c += HermitianSeq::from_real(set, bump);
    const WeightMatrix w = WeightMatrix::scalar(set, 0.6);
    const DualSolution sol = solve_soft(c, p, w, cfg);

    write_solution_file(tmp.file("s.txt"), sol, &w, 0.6);
    const SolutionFile back = read_solution_file(tmp.file("s.txt"));
    CHECK(back.solution.mode == MatchMode::soft);
    CHECK((back.solution.q - sol.q).norm2() < 1e-15);
    CHECK((back.solution.r - sol.r).norm2() < 1e-15);
    CHECK((back.solution.c_hat - sol.c_hat).norm2() < 1e-14);
    CHECK(back.solution.grid == sol.grid);
    CHECK(back.scalar_weight.has_value());
    CHECK(*back.scalar_weight == doctest::Approx(0.6));
    CHECK(back.solution.kkt.moment_residual ==
          doctest::Approx(sol.kkt.moment_residual).epsilon(1e-12));

    // atoms survive the roundtrip
    const HermitianSeq c2 = HermitianSeq(set, [] {
        Eigen::VectorXcd v(3);
        v << 0.5, 1.0, 0.5;
        return v;
    }());
    const HermitianSeq p2 = HermitianSeq(set, [] {
        Eigen::VectorXcd v(3);
        v << -0.5, 1.0, -0.5;
        return v;
    }());
    const DualSolution sol2 = solve_soft(c2, p2, WeightMatrix::scalar(set, 0.5), cfg);
    REQUIRE(sol2.atoms.size() == 1);
    write_solution_file(tmp.file("s2.txt"), sol2, nullptr, std::nullopt);
    const SolutionFile back2 = read_solution_file(tmp.file("s2.txt"));
    REQUIRE(back2.solution.atoms.size() == 1);
    CHECK(back2.solution.atoms[0].mass == doctest::Approx(sol2.atoms[0].mass));
    CHECK(back2.solution.atoms[0].theta[0] == doctest::Approx(sol2.atoms[0].theta[0]));
}

TEST_CASE("wiener model files roundtrip") {
    TempDir tmp;
    const IndexSet set = IndexSet::box({1, 1});
    FilterCoefficients f;
    f.shape = {4, 4};
    f.coeffs = Eigen::VectorXd::LinSpaced(16, -1.0, 2.0);
    f.reconstruction_error = 3e-7;
    WienerModel model(0.42, HermitianSeq::unit(set), HermitianSeq::unit(set), f);
    model.clamped_lags = 2;

    write_model_file(tmp.file("m.txt"), model);
    const WienerModel back = read_model_file(tmp.file("m.txt"));
    CHECK(back.tau == doctest::Approx(0.42));
    CHECK(back.clamped_lags == 2);
    CHECK(back.filter.shape == f.shape);
    CHECK((back.filter.coeffs - f.coeffs).norm() == 0.0);
    CHECK(back.filter.reconstruction_error == doctest::Approx(3e-7));
    CHECK((back.q - model.q).norm2() == 0.0);
}

TEST_CASE("images: p5 and p4 write/read, midpoint binarization") {
    TempDir tmp;
    Eigen::VectorXcd v(12);
    for (int i = 0; i < 12; ++i) v[i] = (i % 3 == 0) ? 1.0 : 0.0;
    const DataRecord binary({3, 4}, v);

    write_image_p4_file(tmp.file("b.pbm"), binary);
    const DataRecord back = read_image_file(tmp.file("b.pbm"));
    CHECK(back.shape() == binary.shape());
    CHECK((back.values() - binary.values()).norm() == 0.0);

    Eigen::VectorXcd gray(12);
    for (int i = 0; i < 12; ++i) gray[i] = i / 11.0;
    const DataRecord grayrec({3, 4}, gray);
    write_image_p5_file(tmp.file("g.pgm"), grayrec);
    const DataRecord gback = read_image_file(tmp.file("g.pgm"));
    CHECK(gback.values()[11].real() == doctest::Approx(255.0));
    CHECK(gback.values()[0].real() == doctest::Approx(0.0));

    const DataRecord bin = binarize_midpoint(gback);
    CHECK(bin.values()[0].real() == 0.0);
    CHECK(bin.values()[11].real() == 1.0);
    // midpoint of 0..255 is 127.5
    CHECK(bin.values()[6].real() == ((6 / 11.0) * 255 > 127.5 ? 1.0 : 0.0));

    {
        std::ofstream os(tmp.file("bad.pgm"), std::ios::binary);
        os << "P6\n2 2\n255\n";
    }
    CHECK_THROWS_AS(read_image_file(tmp.file("bad.pgm")), FileFormatError);
}
