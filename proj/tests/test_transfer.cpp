#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "rowiso/characteristic.hpp"
#include "rowiso/transfer.hpp"
#include "test_support.hpp"

using rowiso::CMatrix;
using rowiso::Complex;
using rowiso::RowContraction;
using rowiso::Word;

namespace {

RowContraction scalar(double t) { return RowContraction{1, {t * rowiso::identity_like(1)}}; }

Complex scalar_moebius(double t, Complex z) { return (z - t) / (1.0 - t * z); }

}  // namespace

TEST_CASE("system matrix read off the scalar dilation") {
    const auto dil = rowiso::nagy_foias_dilation(scalar(0.5), 4);
    const auto s = rowiso::system_matrix(dil.v, dil.i0, dil.j0);
    REQUIRE(s.d == 1);
    REQUIRE(std::abs(s.A[0](0, 0) - 0.5) <= 1e-12);
    REQUIRE(std::abs(s.B[0](0, 0) - std::sqrt(0.75)) <= 1e-12);
    REQUIRE(std::abs(s.C(0, 0) - std::sqrt(0.75)) <= 1e-12);
    REQUIRE(std::abs(s.D(0, 0) - (-0.5)) <= 1e-12);
}

TEST_CASE("scalar series coefficients") {
    const auto f = rowiso::characteristic_series(scalar(0.5), 5);
    REQUIRE(f.d == 1);
    REQUIRE(f.degree == 5);
    REQUIRE(std::abs(f.coeff(Word::empty())(0, 0) - (-0.5)) <= 1e-12);
    const auto s = rowiso::rotation_system(scalar(0.5));
    Word w;
    for (int n = 1; n <= 5; ++n) {
        w = w.append(1);
        const double expect = 0.75 * std::pow(0.5, n - 1);
        REQUIRE(std::abs(f.coeff(w)(0, 0) - expect) <= 1e-12);
        REQUIRE(rowiso::max_abs(rowiso::series_coefficient(s, w) - f.coeff(w)) <= 1e-12);
    }
    REQUIRE_THROWS_AS(f.coeff(w.append(1)), rowiso::ValidationError);
}

TEST_CASE("transfer function of the shift is z") {
    const auto s = rowiso::rotation_system(scalar(0.0));
    for (const Complex z : {Complex(0.3, 0.0), Complex(0.0, 0.7), Complex(-0.4, 0.25)}) {
        const CMatrix th = rowiso::eval_theta(s, z);
        REQUIRE(std::abs(th(0, 0) - z) <= 1e-12);
    }
}

TEST_CASE("scalar transfer function is the Moebius map") {
    const auto s = rowiso::rotation_system(scalar(0.5));
    REQUIRE(std::abs(rowiso::eval_theta(s, Complex(0.5, 0.0))(0, 0)) <= 1e-12);
    REQUIRE(std::abs(rowiso::eval_theta(s, Complex(0.0, 0.0))(0, 0) - (-0.5)) <= 1e-12);
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> radius(0.0, 0.95), angle(0.0, 2 * std::numbers::pi);
    for (int i = 0; i < 20; ++i) {
        const Complex z = std::polar(radius(rng), angle(rng));
        REQUIRE(std::abs(rowiso::eval_theta(s, z)(0, 0) - scalar_moebius(0.5, z)) <= 1e-10);
    }
}

TEST_CASE("truncated series evaluation approaches the closed form") {
    const int degree = 8;
    const auto s = rowiso::rotation_system(scalar(0.5));
    const auto f = rowiso::formal_series(s, degree);
    const Complex z(0.4, 0.0);
    const double diff = std::abs(rowiso::eval_series(f, z)(0, 0) - rowiso::eval_theta(s, z)(0, 0));
    // Tail of the geometric coefficient series: sum_{k > degree} 0.75 * 0.5^(k-1) |z|^k.
    const double tail = 0.75 * std::pow(0.5 * 0.4, degree) * 0.4 / (1.0 - 0.5 * 0.4);
    REQUIRE(diff <= tail + 1e-12);
}

TEST_CASE("realization identity for randomized dilations") {
    std::mt19937 rng(53);
    for (int d : {1, 2}) {
        const RowContraction t = testgen::random_row_contraction(d, 2, rng, 0.85);
        const auto dil = rowiso::nagy_foias_dilation(t, 3);
        const auto rep = rowiso::verify_realization(dil.v, dil.i0, dil.j0, 3);
        INFO("worst word " << rep.worst.str() << " dev " << rep.max_dev);
        REQUIRE(rep.analytic.pass);
        REQUIRE(rep.pass);
        REQUIRE(rep.max_dev <= 1e-10);
    }
}

TEST_CASE("evaluation guards") {
    rowiso::SystemMatrix s;
    s.d = 1;
    s.A = {rowiso::identity_like(1)};
    s.B = {rowiso::CMatrix::Zero(1, 1)};
    s.C = rowiso::CMatrix::Zero(1, 1);
    s.D = rowiso::CMatrix::Zero(1, 1);
    REQUIRE_THROWS_AS(rowiso::eval_theta(s, Complex(1.0, 0.0)), rowiso::SingularResolvent);

    std::mt19937 rng(59);
    const auto s2 = rowiso::rotation_system(testgen::random_row_contraction(2, 2, rng));
    REQUIRE_THROWS_AS(rowiso::eval_theta(s2, Complex(0.1, 0.0)), rowiso::ValidationError);
}

TEST_CASE("input embedding must behave like a wandering block") {
    const auto dil = rowiso::nagy_foias_dilation(scalar(0.5), 4);
    const auto bad = rowiso::Embedding::block(dil.v.space, Word{{1}});
    REQUIRE_THROWS_AS(rowiso::system_matrix(dil.v, bad, dil.j0), rowiso::UNotWandering);
}

TEST_CASE("unitary contraction has a trivial transfer function") {
    const auto f = rowiso::characteristic_series(RowContraction{1, {rowiso::identity_like(1)}}, 3);
    REQUIRE(f.rows() == 0);
    REQUIRE(f.cols() == 0);
    const auto s = rowiso::rotation_system(RowContraction{1, {rowiso::identity_like(1)}});
    const CMatrix th = rowiso::eval_theta(s, Complex(0.3, 0.2));
    REQUIRE(th.rows() == 0);
}
