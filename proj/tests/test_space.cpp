#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rowiso/characteristic.hpp"
#include "rowiso/space.hpp"
#include "test_support.hpp"

using rowiso::CMatrix;
using rowiso::CVector;
using rowiso::GradedSpace;
using rowiso::RowContraction;
using rowiso::Word;

namespace {

RowContraction scalar(double t) { return RowContraction{1, {t * rowiso::identity_like(1)}}; }

}  // namespace

TEST_CASE("graded space geometry") {
    const GradedSpace s = GradedSpace::make(2, 3, 2, 2);
    REQUIRE(s.words.size() == 7);
    REQUIRE(s.total_dim() == 2 + 7 * 3);
    REQUIRE(s.domain_dim() == 2 + 3 * 3);  // words of length <= 1 only
    REQUIRE(s.block_offset(Word::empty()) == 2);
    REQUIRE(s.block_offset(Word{{2}}) == 2 + 2 * 3);
    REQUIRE(s.level_of_rank(0) == 0);   // U_0 sits at level 0 alongside H
    REQUIRE(s.level_of_rank(3) == 2);
    REQUIRE(s.level_of_index(0) == 0);
    REQUIRE(s.level_of_index(s.total_dim() - 1) == 2);
    REQUIRE_THROWS_AS(GradedSpace::make(2, 3, 2, -1), rowiso::DepthTooSmall);
}

TEST_CASE("inclusions and embeddings") {
    const GradedSpace s = GradedSpace::make(2, 1, 2, 2);
    const CMatrix ih = rowiso::h_inclusion(s);
    REQUIRE(ih.rows() == s.total_dim());
    REQUIRE(ih.cols() == 2);
    REQUIRE(ih(0, 0).real() == 1.0);
    const CMatrix b = rowiso::block_inclusion(s, Word{{1, 2}});
    REQUIRE(b.cols() == 1);
    REQUIRE(b(s.block_offset(Word{{1, 2}}), 0).real() == 1.0);

    CMatrix bad = ih;
    bad.col(0) *= 0.5;
    REQUIRE_THROWS_AS(rowiso::Embedding(s, bad), rowiso::ValidationError);
}

TEST_CASE("shift dilation of the zero contraction") {
    const auto dil = rowiso::dilation_row_isometry(rowiso::rotation_system(scalar(0.0)), 4);
    const auto& v = dil.v;
    REQUIRE(rowiso::check_row_isometry(v).max_dev <= 1e-12);

    // V_1 maps H onto U_0 and each block U_w onto U_{1w}.
    const CMatrix vh = rowiso::apply_word_cols(v, Word{{1}}, rowiso::h_inclusion(v.space));
    REQUIRE(rowiso::max_abs(vh - rowiso::block_inclusion(v.space, Word::empty())) <= 1e-12);
    const CMatrix vb = rowiso::apply_word_cols(v, Word{{1}}, rowiso::block_inclusion(v.space, Word{{1, 1}}));
    REQUIRE(rowiso::max_abs(vb - rowiso::block_inclusion(v.space, Word{{1, 1, 1}})) <= 1e-12);

    // Composition: applying the word 11 equals applying 1 twice.
    const CMatrix x = rowiso::block_inclusion(v.space, Word{{1}});
    const CMatrix once = rowiso::apply_word_cols(v, Word{{1}}, rowiso::apply_word_cols(v, Word{{1}}, x));
    const CMatrix twice = rowiso::apply_word_cols(v, Word{{1, 1}}, x);
    REQUIRE(rowiso::max_abs(once - twice) <= 1e-12);

    // Content at the top level cannot be shifted further.
    const CMatrix top = rowiso::block_inclusion(v.space, Word{{1, 1, 1, 1}});
    REQUIRE_THROWS_AS(rowiso::apply_word_cols(v, Word{{1}}, top), rowiso::TruncationOverflow);

    // Adjoint drops the leading letter and lands back inside the domain.
    const CMatrix adj = rowiso::apply_word_adjoint_cols(v, Word{{1}}, rowiso::block_inclusion(v.space, Word::empty()));
    REQUIRE(rowiso::max_abs(adj - rowiso::h_inclusion(v.space)) <= 1e-12);
}

TEST_CASE("deficient generators are reported") {
    auto dil = rowiso::dilation_row_isometry(rowiso::rotation_system(scalar(0.0)), 3);
    dil.v.vk[0] *= 0.9;
    const auto rep = rowiso::check_row_isometry(dil.v);
    REQUIRE(rep.max_dev == Catch::Approx(0.19).epsilon(1e-9));
    REQUIRE(rep.worst_left == 1);
    REQUIRE(rep.worst_right == 1);
}

TEST_CASE("wandering subspaces for a scalar contraction") {
    const auto dil = rowiso::dilation_row_isometry(rowiso::rotation_system(scalar(0.5)), 4);
    const auto& v = dil.v;

    // V_1 h = 0.5 h (+) sqrt(0.75) U_0.
    const CMatrix vh = rowiso::apply_word_cols(v, Word{{1}}, rowiso::h_inclusion(v.space));
    REQUIRE(std::abs(vh(0, 0) - 0.5) <= 1e-12);
    REQUIRE(std::abs(vh(v.space.block_offset(Word::empty()), 0) - std::sqrt(0.75)) <= 1e-12);
    REQUIRE(rowiso::support_level(v.space, vh, 1e-12) == 0);

    // U_0 is wandering, H is not (<h, V_1 h> = 0.5).
    const auto good = rowiso::is_wandering(v, rowiso::Embedding::block(v.space, Word::empty()), 3);
    REQUIRE(good.wandering);
    REQUIRE(good.max_dev <= 1e-12);

    const auto bad = rowiso::is_wandering(v, rowiso::Embedding::h_block(v.space), 3);
    REQUIRE_FALSE(bad.wandering);
    REQUIRE(bad.max_dev == Catch::Approx(0.5));
    REQUIRE(bad.witness_a.is_empty());
    REQUIRE(bad.witness_b == Word{{1}});

    // Depth accounting: translates up to maxlen need base + maxlen <= depth.
    REQUIRE_THROWS_AS(rowiso::is_wandering(v, rowiso::Embedding::block(v.space, Word{{1, 1}}), 3),
                      rowiso::TruncationOverflow);
}

TEST_CASE("random multi-letter dilations are row isometries") {
    std::mt19937 rng(23);
    for (int d : {2, 3}) {
        const RowContraction t = testgen::random_row_contraction(d, 2, rng, 0.85);
        const auto dil = rowiso::dilation_row_isometry(rowiso::rotation_system(t), 3);
        REQUIRE(rowiso::check_row_isometry(dil.v).max_dev <= 1e-9);
        REQUIRE(rowiso::is_wandering(dil.v, dil.i0, 2).wandering);

        // V_k H stays inside H (+) U_0.
        for (int k = 1; k <= d; ++k) {
            const CMatrix vh =
                rowiso::apply_word_cols(dil.v, Word{{k}}, rowiso::h_inclusion(dil.v.space));
            REQUIRE(rowiso::support_level(dil.v.space, vh, 1e-9) == 0);
        }

        // The output embedding of the same colligation has orthonormal columns
        // (the Embedding constructor validates) and is orthogonal to V H.
        const auto j0 = rowiso::sigma_output_embedding(dil.v.space, rowiso::rotation_system(t));
        for (int k = 1; k <= d; ++k) {
            const CMatrix vh =
                rowiso::apply_word_cols(dil.v, Word{{k}}, rowiso::h_inclusion(dil.v.space));
            REQUIRE(rowiso::max_abs(j0.cols().adjoint() * vh) <= 1e-9);
        }
    }
}

TEST_CASE("dilation builder rejects bad input") {
    rowiso::SystemMatrix s;
    s.d = 1;
    s.A = {0.5 * rowiso::identity_like(1)};
    s.B = {0.5 * rowiso::identity_like(1)};
    s.C = 0.3 * rowiso::identity_like(1);
    s.D = 0.2 * rowiso::identity_like(1);
    REQUIRE_THROWS_AS(rowiso::dilation_row_isometry(s, 3), rowiso::NotCoisometry);

    REQUIRE_THROWS_AS(rowiso::dilation_row_isometry(rowiso::rotation_system(scalar(0.5)), 0),
                      rowiso::DepthTooSmall);
}
