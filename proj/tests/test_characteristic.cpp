#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "rowiso/characteristic.hpp"
#include "test_support.hpp"

using rowiso::CMatrix;
using rowiso::Complex;
using rowiso::RowContraction;
using rowiso::Word;

TEST_CASE("rotation colligation of the zero contraction") {
    const auto s = rowiso::rotation_system(RowContraction{1, {rowiso::CMatrix::Zero(1, 1)}});
    const CMatrix sigma = s.assemble();
    REQUIRE(sigma.rows() == 2);
    REQUIRE(sigma.cols() == 2);
    REQUIRE(std::abs(sigma(0, 0)) <= 1e-12);
    REQUIRE(std::abs(sigma(0, 1) - 1.0) <= 1e-12);
    REQUIRE(std::abs(sigma(1, 0) - 1.0) <= 1e-12);
    REQUIRE(std::abs(sigma(1, 1)) <= 1e-12);
}

TEST_CASE("rotation colligation is unitary for d = 1") {
    std::mt19937 rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Index n = 1 + trial % 4;
        const RowContraction t{1, {testgen::random_contraction(n, rng, 0.9)}};
        const CMatrix sigma = rowiso::rotation_system(t).assemble();
        REQUIRE(rowiso::max_abs(sigma * sigma.adjoint() - rowiso::identity_like(sigma.rows())) <= 1e-10);
        REQUIRE(rowiso::max_abs(sigma.adjoint() * sigma - rowiso::identity_like(sigma.cols())) <= 1e-10);
    }
}

TEST_CASE("rotation colligation is coisometric for d > 1") {
    std::mt19937 rng(67);
    for (int d : {2, 3}) {
        const RowContraction t = testgen::random_row_contraction(d, 2, rng, 0.85);
        const CMatrix sigma = rowiso::rotation_system(t).assemble();
        REQUIRE(rowiso::max_abs(sigma * sigma.adjoint() - rowiso::identity_like(sigma.rows())) <= 1e-10);
    }
}

TEST_CASE("unitary contraction collapses the colligation to its adjoint") {
    std::mt19937 rng(71);
    const CMatrix q = testgen::random_unitary(3, rng);
    const auto s = rowiso::rotation_system(RowContraction{1, {q}});
    REQUIRE(s.dim_u() == 0);
    REQUIRE(s.dim_y() == 0);
    const CMatrix sigma = s.assemble();
    REQUIRE(rowiso::max_abs(sigma - q.adjoint()) <= 1e-7);
}

TEST_CASE("scalar characteristic coefficients") {
    const double t = 0.3;
    const auto f = rowiso::characteristic_series(RowContraction{1, {t * rowiso::identity_like(1)}}, 5);
    REQUIRE(std::abs(f.coeff(Word::empty())(0, 0) - (-t)) <= 1e-12);
    Word w;
    for (int n = 1; n <= 5; ++n) {
        w = w.append(1);
        REQUIRE(std::abs(f.coeff(w)(0, 0) - (1.0 - t * t) * std::pow(t, n - 1)) <= 1e-12);
    }
}

TEST_CASE("characteristic function of the zero row pair is the coordinate row") {
    RowContraction t;
    t.d = 2;
    t.t = {rowiso::CMatrix::Zero(1, 1), rowiso::CMatrix::Zero(1, 1)};
    const auto f = rowiso::characteristic_series(t, 2);
    REQUIRE(f.rows() == 1);
    REQUIRE(f.cols() == 2);
    REQUIRE(rowiso::max_abs(f.coeff(Word::empty())) <= 1e-12);
    CMatrix e1(1, 2), e2(1, 2);
    e1 << 1, 0;
    e2 << 0, 1;
    REQUIRE(rowiso::max_abs(f.coeff(Word{{1}}) - e1) <= 1e-12);
    REQUIRE(rowiso::max_abs(f.coeff(Word{{2}}) - e2) <= 1e-12);
    for (const Word& w : rowiso::words_up_to(2, 2))
        if (w.length() == 2) REQUIRE(rowiso::max_abs(f.coeff(w)) <= 1e-12);
}

TEST_CASE("dilation geometry reproduces the colligation") {
    std::mt19937 rng(73);
    const RowContraction t = testgen::random_row_contraction(2, 2, rng, 0.8);
    const auto dil = rowiso::nagy_foias_dilation(t, 3);
    const auto direct = rowiso::rotation_system(t);
    const auto from_geometry = rowiso::system_matrix(dil.v, dil.i0, dil.j0);
    REQUIRE(rowiso::series_max_dev(rowiso::formal_series(direct, 3),
                                   rowiso::formal_series(from_geometry, 3)) <= 1e-10);
}

TEST_CASE("scalar characteristic function matches the Moebius map on the circle") {
    const double t = 0.9;
    const auto s = rowiso::rotation_system(RowContraction{1, {t * rowiso::identity_like(1)}});
    for (int i = 0; i < 20; ++i) {
        const Complex z = std::polar(0.9, 2 * std::numbers::pi * i / 20.0);
        const Complex expect = (z - t) / (1.0 - t * z);
        REQUIRE(std::abs(rowiso::eval_theta(s, z)(0, 0) - expect) <= 1e-9);
    }
}

TEST_CASE("row contraction validation") {
    RowContraction bad;
    bad.d = 2;
    bad.t = {rowiso::identity_like(2)};
    REQUIRE_THROWS_AS(bad.validate(), rowiso::ValidationError);

    bad.t = {rowiso::identity_like(2), rowiso::identity_like(2)};
    REQUIRE_THROWS_AS(bad.validate(), rowiso::NotContraction);

    RowContraction ragged;
    ragged.d = 2;
    ragged.t = {rowiso::identity_like(2), rowiso::identity_like(3)};
    REQUIRE_THROWS_AS(ragged.validate(), rowiso::ValidationError);
}
