#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rowiso/characteristic.hpp"
#include "rowiso/kernel.hpp"
#include "test_support.hpp"

using rowiso::CMatrix;
using rowiso::RowContraction;
using rowiso::ToeplitzKernel;
using rowiso::Word;

namespace {

ToeplitzKernel scalar_kernel(double t, int depth) {
    const RowContraction rc{1, {t * rowiso::identity_like(1)}};
    auto dil = rowiso::nagy_foias_dilation(rc, depth);
    return ToeplitzKernel(std::move(dil.v), std::move(dil.i0), std::move(dil.j0));
}

ToeplitzKernel random_kernel(int d, Eigen::Index n, int depth, std::mt19937& rng) {
    const RowContraction rc = testgen::random_row_contraction(d, n, rng, 0.85);
    auto dil = rowiso::nagy_foias_dilation(rc, depth);
    return ToeplitzKernel(std::move(dil.v), std::move(dil.i0), std::move(dil.j0));
}

}  // namespace

TEST_CASE("scalar kernel entries match the rational model") {
    const double t = 0.5;
    ToeplitzKernel k = scalar_kernel(t, 4);
    REQUIRE(k.budget_u() == 4);
    REQUIRE(k.budget_y() == 4);

    // Diagonal entry is the feedthrough -t; one-sided entries follow the
    // scalar coefficient formula (1 - t^2) t^(n-1).
    REQUIRE(std::abs(k.entry(Word::empty(), Word::empty())(0, 0) - (-t)) <= 1e-12);
    for (int n = 1; n <= 4; ++n) {
        const Word alpha{std::vector<int>(static_cast<std::size_t>(n), 1)};
        const double expect = (1.0 - t * t) * std::pow(t, n - 1);
        REQUIRE(std::abs(k.entry(alpha, Word::empty())(0, 0) - expect) <= 1e-12);
        // Opposite side vanishes: the kernel is multi-analytic.
        REQUIRE(rowiso::max_abs(k.entry(Word::empty(), alpha)) <= 1e-12);
    }
    // Free-function lookup is the same table.
    REQUIRE(rowiso::max_abs(rowiso::kernel_entry(k, Word{{1}}, Word::empty()) -
                            k.entry(Word{{1}}, Word::empty())) == 0.0);
}

TEST_CASE("kernel structure for randomized dilations") {
    std::mt19937 rng(31);
    for (int d : {1, 2}) {
        ToeplitzKernel k = random_kernel(d, 2, 3, rng);
        const auto rep = rowiso::verify_toeplitz_structure(k, 3);
        INFO("worst pair " << rep.worst_sigma.str() << ", " << rep.worst_omega.str());
        REQUIRE(rep.pass);
        REQUIRE(rep.max_dev <= 1e-10);
        REQUIRE(rowiso::max_entry_norm(k, 3) <= 1.0 + 1e-10);
    }
}

TEST_CASE("incomparable words pair to zero") {
    std::mt19937 rng(37);
    ToeplitzKernel k = random_kernel(2, 2, 3, rng);
    REQUIRE(rowiso::max_abs(k.entry(Word{{1}}, Word{{2}})) <= 1e-10);
    REQUIRE(rowiso::max_abs(k.entry(Word{{2, 1}}, Word{{2, 2}})) <= 1e-10);
}

TEST_CASE("kernel entries are shift invariant") {
    std::mt19937 rng(41);
    ToeplitzKernel k = random_kernel(2, 2, 3, rng);
    const auto words = rowiso::words_up_to(2, 2);
    for (int l = 1; l <= 2; ++l)
        for (const Word& s : words)
            for (const Word& o : words) {
                const double dev =
                    rowiso::max_abs(k.entry(s.prepend(l), o.prepend(l)) - k.entry(s, o));
                REQUIRE(dev <= 1e-10);
            }
}

TEST_CASE("analyticity battery passes on clean dilations") {
    std::mt19937 rng(43);
    ToeplitzKernel k = scalar_kernel(0.5, 4);
    auto rep = rowiso::analyticity_battery(k, 3);
    REQUIRE(rep.all_pass());

    ToeplitzKernel k2 = random_kernel(2, 2, 3, rng);
    rep = rowiso::analyticity_battery(k2, 3);
    for (int i = 1; i <= 6; ++i) {
        INFO("condition " << i << " dev " << rep.cond(i).max_dev);
        REQUIRE(rep.cond(i).pass);
    }
}

TEST_CASE("deep output block fails the battery coherently") {
    // Y_0 = U_11: still wandering, but the pairing conditions all fail and the
    // band commutation breaks at alpha = 11.
    const RowContraction rc{1, {0.5 * rowiso::identity_like(1)}};
    auto dil = rowiso::nagy_foias_dilation(rc, 4);
    const auto deep = rowiso::Embedding::block(dil.v.space, Word{{1, 1}});
    REQUIRE(rowiso::is_wandering(dil.v, deep, 2).wandering);

    ToeplitzKernel k(dil.v, dil.i0, deep);
    REQUIRE(k.budget_y() == 2);
    const auto rep = rowiso::analyticity_battery(k, 2);
    for (int i = 1; i <= 6; ++i) REQUIRE_FALSE(rep.cond(i).pass);
    REQUIRE(rep.cond(1).witness.has_value());
    REQUIRE(rep.cond(1).witness->length() == 2);
    REQUIRE(rep.cond(1).max_dev == Catch::Approx(1.0));
    REQUIRE(rep.cond(6).witness.has_value());
}

TEST_CASE("toeplitz matrix of the scalar model") {
    ToeplitzKernel k = scalar_kernel(0.5, 4);
    const CMatrix m = rowiso::toeplitz_matrix(k, 2);
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 3);
    // Word order (0, 1, 11): lower triangular with constant diagonals.
    REQUIRE(std::abs(m(0, 0) - (-0.5)) <= 1e-12);
    REQUIRE(std::abs(m(1, 1) - (-0.5)) <= 1e-12);
    REQUIRE(std::abs(m(1, 0) - 0.75) <= 1e-12);
    REQUIRE(std::abs(m(2, 1) - 0.75) <= 1e-12);
    REQUIRE(std::abs(m(2, 0) - 0.375) <= 1e-12);
    REQUIRE(rowiso::max_abs(m.triangularView<Eigen::StrictlyUpper>().toDenseMatrix()) <= 1e-12);
    REQUIRE(rowiso::spectral_norm(m) <= 1.0 + 1e-10);
}

TEST_CASE("toeplitz matrix requires wandering output translates") {
    const RowContraction rc{1, {0.5 * rowiso::identity_like(1)}};
    auto dil = rowiso::nagy_foias_dilation(rc, 4);
    ToeplitzKernel k(dil.v, dil.i0, rowiso::Embedding::h_block(dil.v.space));
    REQUIRE_THROWS_AS(rowiso::toeplitz_matrix(k, 2), rowiso::YNotWandering);
}

TEST_CASE("kernel respects its depth budgets") {
    ToeplitzKernel k = scalar_kernel(0.3, 3);
    REQUIRE_THROWS_AS(k.entry(Word{{1, 1, 1, 1}}, Word::empty()), rowiso::TruncationOverflow);
    REQUIRE_THROWS_AS(rowiso::verify_toeplitz_structure(k, 4), rowiso::TruncationOverflow);
    REQUIRE_THROWS_AS(rowiso::analyticity_battery(k, 4), rowiso::TruncationOverflow);
}
